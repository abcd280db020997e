#include "psa/checkpoint.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "psa/blob.hpp"
#include "json_util.hpp"

namespace psa::train {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr const char* kManifestName = "checkpoint_manifest.json";
constexpr const char* kFormat = "psa-checkpoint";
constexpr int kFormatVersion = 1;

json counts_json(const std::map<std::string, std::int64_t>& counts) {
    json j = json::object();
    for (const auto& [k, v] : counts) j[k] = v;
    return j;
}

void write_manifest(const fs::path& dir, const json& manifest) {
    std::ofstream out(dir / kManifestName);
    if (!out) throw std::runtime_error("checkpoint: cannot write manifest in " + dir.string());
    out << manifest.dump(2) << "\n";
}

json read_manifest(const fs::path& dir) {
    std::ifstream in(dir / kManifestName);
    if (!in)
        throw std::runtime_error("checkpoint: missing manifest " + (dir / kManifestName).string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw std::runtime_error("checkpoint: malformed manifest: " + std::string(e.what()));
    }
    return j;
}

std::vector<double> read_blob_checked(const fs::path& file, std::uint32_t crc,
                                      std::size_t expected_size, const std::string& what) {
    std::vector<double> v = blob::read_f64(file, crc);
    if (v.size() != expected_size)
        throw std::runtime_error("checkpoint: " + what + " has " + std::to_string(v.size()) +
                                 " values, manifest says " + std::to_string(expected_size));
    return v;
}

}  // namespace

void save_checkpoint(const fs::path& dir, const TrainedModel& model, const AdamState* opt,
                     int next_epoch) {
    fs::create_directories(dir / "params");
    if (opt) fs::create_directories(dir / "opt");

    json manifest;
    manifest["format"] = kFormat;
    manifest["version"] = kFormatVersion;
    manifest["kind"] = model.kind;
    manifest["next_epoch"] = next_epoch;
    manifest["dataset_hash"] = model.dataset_hash;
    manifest["initial_loss"] = model.initial_loss;
    manifest["final_loss"] = model.final_loss;
    manifest["net"] = net_config_json(model.net);
    manifest["train"] = train_config_json(model.train);
    manifest["update_counts"] = counts_json(model.update_counts);
    manifest["frozen"] = model.params.frozen_groups();
    manifest["adapt"] = {{"mixed_decoder", model.adapt_mixed_decoder},
                         {"style_decoder", model.adapt_style_decoder},
                         {"target_style", model.adapt_target_style}};

    json arrays = json::array();
    for (const nets::ParamArray& a : model.params.arrays()) {
        const std::string file = "params/" + a.name + ".blob";
        const std::uint32_t crc = blob::write_f64(dir / file, a.v);
        arrays.push_back({{"name", a.name},
                          {"group", a.group},
                          {"ch", a.ch},
                          {"h", a.h},
                          {"w", a.w},
                          {"file", file},
                          {"crc32", crc}});
    }
    manifest["arrays"] = std::move(arrays);

    if (opt) {
        json t = json::object();
        for (const auto& [group, step] : opt->t) t[group] = step;
        json moments = json::array();
        for (const auto& [name, m] : opt->m) {
            const auto vit = opt->v.find(name);
            if (vit == opt->v.end())
                throw std::runtime_error("checkpoint: optimizer moments incomplete for " + name);
            const std::string mf = "opt/" + name + ".m.blob";
            const std::string vf = "opt/" + name + ".v.blob";
            moments.push_back({{"name", name},
                               {"m_file", mf},
                               {"m_crc32", blob::write_f64(dir / mf, m)},
                               {"v_file", vf},
                               {"v_crc32", blob::write_f64(dir / vf, vit->second)}});
        }
        manifest["opt"] = {{"t", std::move(t)}, {"arrays", std::move(moments)}};
    } else {
        manifest["opt"] = nullptr;
    }

    write_manifest(dir, manifest);
}

Checkpoint load_checkpoint(const fs::path& dir) {
    const json j = read_manifest(dir);
    if (j.value("format", "") != kFormat || j.value("version", 0) != kFormatVersion)
        throw std::runtime_error("checkpoint: unrecognized format in " + dir.string());

    Checkpoint ck;
    TrainedModel& m = ck.model;
    try {
        m.kind = j.at("kind").get<std::string>();
        ck.next_epoch = j.at("next_epoch").get<int>();
        m.dataset_hash = j.at("dataset_hash").get<std::uint32_t>();
        m.initial_loss = j.at("initial_loss").get<double>();
        m.final_loss = j.at("final_loss").get<double>();
        m.net = net_config_from_json(j.at("net"));
        m.train = train_config_from_json(j.at("train"));
        for (const auto& [k, v] : j.at("update_counts").items())
            m.update_counts[k] = v.get<std::int64_t>();
        const auto& adapt = j.at("adapt");
        m.adapt_mixed_decoder = adapt.at("mixed_decoder").get<int>();
        m.adapt_style_decoder = adapt.at("style_decoder").get<int>();
        m.adapt_target_style = adapt.at("target_style").get<int>();

        for (const auto& e : j.at("arrays")) {
            nets::ParamArray& a =
                m.params.add(e.at("name").get<std::string>(), e.at("group").get<std::string>(),
                             e.at("ch").get<int>(), e.at("h").get<int>(), e.at("w").get<int>());
            a.v = read_blob_checked(dir / e.at("file").get<std::string>(),
                                    e.at("crc32").get<std::uint32_t>(), a.v.size(), a.name);
        }
        for (const auto& g : j.at("frozen")) m.params.freeze_group(g.get<std::string>());

        if (!j.at("opt").is_null()) {
            const auto& opt = j.at("opt");
            for (const auto& [group, step] : opt.at("t").items())
                ck.opt.t[group] = step.get<std::int64_t>();
            for (const auto& e : opt.at("arrays")) {
                const std::string name = e.at("name").get<std::string>();
                if (!m.params.has(name))
                    throw std::runtime_error("checkpoint: optimizer moments for unknown array " +
                                             name);
                const std::size_t n = m.params.at(name).v.size();
                ck.opt.m[name] =
                    read_blob_checked(dir / e.at("m_file").get<std::string>(),
                                      e.at("m_crc32").get<std::uint32_t>(), n, name + ".m");
                ck.opt.v[name] =
                    read_blob_checked(dir / e.at("v_file").get<std::string>(),
                                      e.at("v_crc32").get<std::uint32_t>(), n, name + ".v");
            }
            ck.has_opt = true;
        }
    } catch (const json::exception& e) {
        throw std::runtime_error("checkpoint: manifest field error: " + std::string(e.what()));
    } catch (const std::invalid_argument& e) {
        throw std::runtime_error("checkpoint: invalid manifest contents: " + std::string(e.what()));
    }
    return ck;
}

void save_model(const fs::path& dir, const TrainedModel& model) {
    save_checkpoint(dir, model, nullptr, model.train.epochs);
}

TrainedModel load_model(const fs::path& dir) { return load_checkpoint(dir).model; }

}  // namespace psa::train
