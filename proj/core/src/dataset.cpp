#include "psa/dataset.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "psa/blob.hpp"

namespace psa {

using nlohmann::json;

std::string to_string(Split s) {
    switch (s) {
        case Split::Train: return "train";
        case Split::Val: return "val";
        case Split::Test: return "test";
    }
    throw std::logic_error("unknown split");
}

Split split_from_string(const std::string& s) {
    if (s == "train") return Split::Train;
    if (s == "val") return Split::Val;
    if (s == "test") return Split::Test;
    throw std::runtime_error("manifest: unknown split tag '" + s + "'");
}

void StyledSample::validate(int num_styles) const {
    image.validate();
    if (static_cast<int>(ctv_by_style.size()) != num_styles) {
        throw std::runtime_error("sample: ctv mask count does not match num_styles");
    }
    if (assigned_style < 1 || assigned_style > num_styles) {
        throw std::invalid_argument("sample: assigned_style out of range");
    }
    if (!bladder.grid().same_shape(image) || !rectum.grid().same_shape(image)) {
        throw std::runtime_error("sample: organ mask dimensions differ from image");
    }
    for (const auto& m : ctv_by_style) {
        if (!m.grid().same_shape(image)) {
            throw std::runtime_error("sample: ctv mask dimensions differ from image");
        }
        if (m.count() == 0) throw std::runtime_error("sample: empty ctv mask");
    }
}

std::vector<std::size_t> Dataset::indices(Split s) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (split_tags[i] == s) out.push_back(i);
    }
    return out;
}

void Dataset::validate() const {
    if (num_styles < 1) throw std::runtime_error("dataset: num_styles must be >= 1");
    if (split_tags.size() != samples.size()) {
        throw std::runtime_error("dataset: split tag count does not match sample count");
    }
    for (const auto& s : samples) s.validate(num_styles);
}

std::uint32_t Dataset::content_hash() const {
    std::uint32_t crc = 0;
    auto mix_u32 = [&crc](std::uint32_t v) {
        std::uint8_t b[4] = {static_cast<std::uint8_t>(v), static_cast<std::uint8_t>(v >> 8),
                             static_cast<std::uint8_t>(v >> 16), static_cast<std::uint8_t>(v >> 24)};
        crc = blob::crc32(b, 4, crc);
    };
    auto mix_grid = [&](const Grid& g) {
        const auto bytes = blob::encode_grid(g);
        crc = blob::crc32(bytes.data(), bytes.size(), crc);
    };
    mix_u32(static_cast<std::uint32_t>(num_styles));
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto& s = samples[i];
        mix_u32(static_cast<std::uint32_t>(s.assigned_style));
        mix_u32(static_cast<std::uint32_t>(split_tags[i]));
        mix_grid(s.image);
        mix_grid(s.bladder.grid());
        mix_grid(s.rectum.grid());
        for (const auto& m : s.ctv_by_style) mix_grid(m.grid());
    }
    return crc;
}

namespace {

std::string sample_id(std::size_t i) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "s%04zu", i);
    return buf;
}

}  // namespace

void save_dataset(const Dataset& d, const std::filesystem::path& dir) {
    d.validate();
    std::filesystem::create_directories(dir);

    json samples = json::array();
    for (std::size_t i = 0; i < d.samples.size(); ++i) {
        const auto& s = d.samples[i];
        const std::string id = sample_id(i);

        json blobs = json::object();
        auto add = [&](const std::string& name, const Grid& g) {
            const std::string file = id + "_" + name + ".psag";
            const std::uint32_t crc = blob::write_grid(dir / file, g);
            blobs[name] = {{"file", file}, {"crc32", crc}};
        };
        add("image", s.image);
        add("bladder", s.bladder.grid());
        add("rectum", s.rectum.grid());
        for (std::size_t k = 0; k < s.ctv_by_style.size(); ++k) {
            add("ctv_style_" + std::to_string(k + 1), s.ctv_by_style[k].grid());
        }

        samples.push_back({{"id", id},
                           {"height", s.image.height()},
                           {"width", s.image.width()},
                           {"assigned_style", s.assigned_style},
                           {"split", to_string(d.split_tags[i])},
                           {"blobs", blobs}});
    }

    const json manifest = {{"format", "psa-dataset"},
                           {"version", 1},
                           {"num_styles", d.num_styles},
                           {"samples", samples}};

    std::ofstream out(dir / "manifest.json", std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write manifest: " + (dir / "manifest.json").string());
    out << manifest.dump(2) << "\n";
}

Dataset load_dataset(const std::filesystem::path& dir) {
    std::ifstream in(dir / "manifest.json");
    if (!in) throw std::runtime_error("missing manifest: " + (dir / "manifest.json").string());
    json manifest;
    try {
        in >> manifest;
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("manifest: parse error: ") + e.what());
    }

    if (manifest.value("format", "") != "psa-dataset" || manifest.value("version", 0) != 1) {
        throw std::runtime_error("manifest: unrecognized format or version");
    }

    Dataset d;
    try {
        d.num_styles = manifest.at("num_styles").get<int>();

        for (const auto& js : manifest.at("samples")) {
            const auto& blobs = js.at("blobs");
            auto read = [&](const std::string& name) {
                if (!blobs.contains(name)) {
                    throw std::runtime_error("manifest: sample missing blob '" + name + "'");
                }
                const auto& b = blobs.at(name);
                return blob::read_grid(dir / b.at("file").get<std::string>(),
                                       b.at("crc32").get<std::uint32_t>());
            };

            StyledSample s;
            s.image = read("image");
            s.bladder = BinaryMask(read("bladder"));
            s.rectum = BinaryMask(read("rectum"));
            for (int k = 1; k <= d.num_styles; ++k) {
                s.ctv_by_style.emplace_back(read("ctv_style_" + std::to_string(k)));
            }
            if (blobs.contains("ctv_style_" + std::to_string(d.num_styles + 1))) {
                throw std::runtime_error("manifest: sample has more ctv masks than num_styles");
            }
            s.assigned_style = js.at("assigned_style").get<int>();
            const int h = js.at("height").get<int>();
            const int w = js.at("width").get<int>();
            if (h != s.image.height() || w != s.image.width()) {
                throw std::runtime_error("manifest: declared dims disagree with image blob");
            }

            d.samples.push_back(std::move(s));
            d.split_tags.push_back(split_from_string(js.at("split").get<std::string>()));
        }
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("manifest: schema violation: ") + e.what());
    }

    d.validate();
    return d;
}

}  // namespace psa
