#include "psa/training.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "json_util.hpp"
#include "psa/checkpoint.hpp"

namespace psa::train {
namespace {

constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// One sample's contribution: a scalar loss node plus the groups its
/// gradients are routed into.
struct StepPlan {
    int loss_node = -1;
    double loss_value = 0.0;
    std::vector<std::string> update_groups;
    std::string log_extra;  // extra CSV columns, leading comma included
};

using StepBuilder = std::function<StepPlan(nets::Tape&, const nets::ParamLeaves&, std::size_t)>;

struct RunSpec {
    std::string kind;
    std::vector<std::size_t> train_indices;
    StepBuilder builder;
    std::string log_header;  // columns after epoch,step,sample,style,total
    int adapt_mixed_decoder = -1;
    int adapt_style_decoder = -1;
    int adapt_target_style = -1;
};

void adam_step(nets::ParamStore& store, AdamState& opt, const std::set<std::string>& groups,
               const std::map<std::string, std::vector<double>>& grad_sums, int batch_n,
               double lr) {
    for (const std::string& group : groups) {
        const std::int64_t t = ++opt.t[group];
        const double c1 = 1.0 - std::pow(kBeta1, double(t));
        const double c2 = 1.0 - std::pow(kBeta2, double(t));
        for (const std::string& name : store.group_members(group)) {
            nets::ParamArray& a = store.at(name);
            auto& m = opt.m[name];
            auto& v = opt.v[name];
            if (m.empty()) m.assign(a.v.size(), 0.0);
            if (v.empty()) v.assign(a.v.size(), 0.0);
            const auto it = grad_sums.find(name);
            const std::vector<double>* gs = it == grad_sums.end() ? nullptr : &it->second;
            for (std::size_t j = 0; j < a.v.size(); ++j) {
                const double g = gs ? (*gs)[j] / double(batch_n) : 0.0;
                m[j] = kBeta1 * m[j] + (1.0 - kBeta1) * g;
                v[j] = kBeta2 * v[j] + (1.0 - kBeta2) * g * g;
                a.v[j] -= lr * (m[j] / c1) / (std::sqrt(v[j] / c2) + kAdamEps);
            }
        }
    }
}

TrainedModel run_training(nets::ParamStore store, const nets::NetConfig& net,
                          const TrainConfig& cfg, const Dataset& ds, const RunSpec& spec,
                          AdamState opt, int start_epoch,
                          std::map<std::string, std::int64_t> counts, double initial_loss,
                          double final_loss) {
    cfg.validate();
    if (counts.empty())
        for (const std::string& g : store.groups())
            if (!store.frozen(g)) counts[g] = 0;

    std::ofstream log;
    if (!cfg.loss_log.empty()) {
        const bool fresh = !std::filesystem::exists(cfg.loss_log) ||
                           std::filesystem::file_size(cfg.loss_log) == 0;
        log.open(cfg.loss_log, std::ios::app);
        if (!log) throw std::runtime_error("training: cannot open loss log " + cfg.loss_log);
        if (fresh) log << "epoch,step,sample,style,total" << spec.log_header << "\n";
    }

    auto snapshot = [&](double final_mean) {
        TrainedModel m;
        m.params = store;
        m.net = net;
        m.kind = spec.kind;
        m.train = cfg;
        m.dataset_hash = ds.content_hash();
        m.initial_loss = initial_loss;
        m.final_loss = final_mean;
        m.update_counts = counts;
        m.adapt_mixed_decoder = spec.adapt_mixed_decoder;
        m.adapt_style_decoder = spec.adapt_style_decoder;
        m.adapt_target_style = spec.adapt_target_style;
        return m;
    };

    const SeededRng base(cfg.seed);
    for (int epoch = start_epoch; epoch < cfg.epochs; ++epoch) {
        std::vector<std::size_t> order = spec.train_indices;
        SeededRng erng = base.fork(std::uint64_t(epoch));
        erng.shuffle(order);

        double loss_sum = 0.0;
        std::map<std::string, std::vector<double>> grad_sums;
        std::set<std::string> batch_groups;
        int batch_n = 0;
        auto flush = [&]() {
            if (batch_n == 0) return;
            adam_step(store, opt, batch_groups, grad_sums, batch_n, cfg.learning_rate);
            grad_sums.clear();
            batch_groups.clear();
            batch_n = 0;
        };

        for (std::size_t pos = 0; pos < order.size(); ++pos) {
            const std::size_t idx = order[pos];
            nets::Tape tape;
            nets::ParamLeaves leaves(tape, store);
            const StepPlan plan = spec.builder(tape, leaves, idx);
            if (!std::isfinite(plan.loss_value))
                throw std::runtime_error("training diverged: non-finite loss at epoch " +
                                         std::to_string(epoch) + " step " + std::to_string(pos) +
                                         " (" + spec.kind + ")");
            tape.backward(plan.loss_node);

            for (const std::string& group : plan.update_groups) {
                if (store.frozen(group)) continue;
                counts[group] += 1;
                batch_groups.insert(group);
                for (const std::string& name : store.group_members(group)) {
                    const std::vector<double>& g = leaves.grad(name);
                    if (g.empty()) continue;
                    auto& slot = grad_sums[name];
                    if (slot.empty()) slot.assign(g.size(), 0.0);
                    for (std::size_t j = 0; j < g.size(); ++j) slot[j] += g[j];
                }
            }
            ++batch_n;
            if (batch_n == cfg.batch_size) flush();

            loss_sum += plan.loss_value;
            if (log)
                log << epoch << ',' << pos << ',' << idx << ','
                    << ds.samples[idx].assigned_style << ',' << fmt17(plan.loss_value)
                    << plan.log_extra << "\n";
        }
        flush();

        const double mean = order.empty() ? 0.0 : loss_sum / double(order.size());
        if (epoch == 0) initial_loss = mean;
        final_loss = mean;

        if (cfg.checkpoint_every > 0 && (epoch + 1) % cfg.checkpoint_every == 0) {
            char sub[24];
            std::snprintf(sub, sizeof(sub), "epoch_%04d", epoch + 1);
            save_checkpoint(std::filesystem::path(cfg.checkpoint_dir) / sub,
                            snapshot(final_loss), &opt, epoch + 1);
        }
    }
    return snapshot(final_loss);
}

std::vector<std::size_t> style_train_indices(const Dataset& ds, int style) {
    if (style < 1 || style > ds.num_styles)
        throw std::invalid_argument("training: style index out of range");
    std::vector<std::size_t> out;
    for (std::size_t i : ds.indices(Split::Train))
        if (ds.samples[i].assigned_style == style) out.push_back(i);
    if (out.empty())
        throw std::invalid_argument("training: style " + std::to_string(style) +
                                    " has no training samples");
    return out;
}

nets::Tensor overlap_net_input(const StyledSample& s) {
    const Grid& img = s.assigned_ctv().grid();
    nets::Tensor t(3, img.height(), img.width());
    for (int r = 0; r < img.height(); ++r)
        for (int c = 0; c < img.width(); ++c) {
            t.at(0, r, c) = s.assigned_ctv().at(r, c) ? 1.0 : 0.0;
            t.at(1, r, c) = s.bladder.at(r, c) ? 1.0 : 0.0;
            t.at(2, r, c) = s.rectum.at(r, c) ? 1.0 : 0.0;
        }
    return t;
}

StepBuilder make_pretrain_builder(const Dataset& ds, const maps::MapsStore& maps,
                                  nets::PerceptualKind kind, nets::NetConfig net,
                                  nets::LossWeights w) {
    return [&ds, &maps, kind, net, w](nets::Tape& tape, const nets::ParamLeaves& leaves,
                                      std::size_t idx) {
        const StyledSample& s = ds.samples[idx];
        const maps::SampleMaps& target = maps.per_sample[idx];
        StepPlan plan;
        if (kind == nets::PerceptualKind::shape) {
            const int in = tape.leaf(nets::Tensor::from_mask(s.assigned_ctv()), false);
            const auto acts = nets::perceptual_graph(tape, leaves, kind, in, net);
            const int edge = tape.leaf(nets::Tensor::from_mask(target.edge), false);
            plan.loss_node = tape.soft_dice_loss(acts.back(), edge, w.epsilon);
        } else {
            const int in = tape.leaf(overlap_net_input(s), false);
            const auto acts = nets::perceptual_graph(tape, leaves, kind, in, net);
            const int db = tape.soft_dice_loss(
                tape.slice_channel(acts.back(), 0),
                tape.leaf(nets::Tensor::from_mask(target.overlap_bladder), false), w.epsilon);
            const int dr = tape.soft_dice_loss(
                tape.slice_channel(acts.back(), 1),
                tape.leaf(nets::Tensor::from_mask(target.overlap_rectum), false), w.epsilon);
            plan.loss_node = tape.weighted_sum({db, dr}, {1.0, 1.0});
        }
        plan.loss_value = tape.scalar(plan.loss_node);
        plan.update_groups = {nets::perceptual_group(kind)};
        return plan;
    };
}

StepBuilder make_psa_builder(const Dataset& ds, nets::NetConfig net, nets::LossWeights w) {
    return [&ds, net, w](nets::Tape& tape, const nets::ParamLeaves& leaves, std::size_t idx) {
        const StyledSample& s = ds.samples[idx];
        const int input = tape.leaf(nets::seg_input(s.image, s.bladder, s.rectum), false);
        const auto enc = nets::encode_graph(tape, leaves, input, net);
        std::vector<int> preds;
        for (int k = 0; k <= net.num_styles; ++k)
            preds.push_back(nets::decode_graph(tape, leaves, enc, k, net));
        const auto loss = nets::total_loss_graph(tape, leaves, net, w, preds, s.assigned_style,
                                                 s.assigned_ctv(), s.bladder, s.rectum);
        StepPlan plan;
        plan.loss_node = loss.node;
        plan.loss_value = loss.breakdown.total;
        plan.update_groups = {"encoder", nets::decoder_group(0),
                              nets::decoder_group(s.assigned_style),
                              nets::attention_group(s.assigned_style)};
        const auto& b = loss.breakdown;
        plan.log_extra = ',' + fmt17(b.dsc[0]) + ',' + fmt17(b.dsc[std::size_t(b.active_style)]) +
                         ',' + fmt17(b.shape[std::size_t(b.active_style)]) + ',' +
                         fmt17(b.overlap[std::size_t(b.active_style)]);
        return plan;
    };
}

StepBuilder make_single_decoder_builder(const Dataset& ds, nets::NetConfig net,
                                        nets::LossWeights w) {
    return [&ds, net, w](nets::Tape& tape, const nets::ParamLeaves& leaves, std::size_t idx) {
        const StyledSample& s = ds.samples[idx];
        const int input = tape.leaf(nets::seg_input(s.image, s.bladder, s.rectum), false);
        const auto enc = nets::encode_graph(tape, leaves, input, net);
        const int pred = nets::decode_graph(tape, leaves, enc, 0, net);
        StepPlan plan;
        plan.loss_node = tape.soft_dice_loss(
            pred, tape.leaf(nets::Tensor::from_mask(s.assigned_ctv()), false), w.epsilon);
        plan.loss_value = tape.scalar(plan.loss_node);
        plan.update_groups = {"encoder", nets::decoder_group(0)};
        return plan;
    };
}

StepBuilder make_adapt_builder(const Dataset& ds, nets::NetConfig net, nets::LossWeights w,
                               int mixed_decoder, int style_decoder, int target_style) {
    return [&ds, net, w, mixed_decoder, style_decoder, target_style](
               nets::Tape& tape, const nets::ParamLeaves& leaves, std::size_t idx) {
        const StyledSample& s = ds.samples[idx];
        const int input = tape.leaf(nets::seg_input(s.image, s.bladder, s.rectum), false);
        const auto enc = nets::encode_graph(tape, leaves, input, net);
        const int gt = tape.leaf(nets::Tensor::from_mask(s.assigned_ctv()), false);
        const int mixed_pred = nets::decode_graph(tape, leaves, enc, mixed_decoder, net);
        const int mixed_dice = tape.soft_dice_loss(mixed_pred, gt, w.epsilon);

        StepPlan plan;
        plan.update_groups = {nets::decoder_group(mixed_decoder)};
        if (style_decoder >= 0) {
            // forward the gated decoder every step, connect it when routed
            const int style_pred = nets::decode_graph(tape, leaves, enc, style_decoder, net);
            if (s.assigned_style == target_style) {
                const int style_dice = tape.soft_dice_loss(style_pred, gt, w.epsilon);
                plan.loss_node = tape.weighted_sum({mixed_dice, style_dice}, {1.0, 1.0});
                plan.update_groups.push_back(nets::decoder_group(style_decoder));
                plan.update_groups.push_back(nets::attention_group(style_decoder));
            } else {
                plan.loss_node = mixed_dice;
            }
        } else {
            plan.loss_node = mixed_dice;
        }
        plan.loss_value = tape.scalar(plan.loss_node);
        return plan;
    };
}

StepBuilder make_classifier_builder(const Dataset& ds, const maps::MapsStore& maps,
                                    nets::NetConfig net) {
    return [&ds, &maps, net](nets::Tape& tape, const nets::ParamLeaves& leaves,
                             std::size_t idx) {
        const StyledSample& s = ds.samples[idx];
        const int input = tape.leaf(
            nets::classifier_input(s.image, maps.per_sample[idx].distance), false);
        const int logits = nets::classifier_logits_graph(tape, leaves, input, net);
        StepPlan plan;
        plan.loss_node = tape.softmax_cross_entropy(logits, s.assigned_style - 1);
        plan.loss_value = tape.scalar(plan.loss_node);
        plan.update_groups = {"classifier"};
        return plan;
    };
}

void merge_group(nets::ParamStore& dst, const nets::ParamStore& src, const std::string& group) {
    bool found = false;
    for (const nets::ParamArray& a : src.arrays())
        if (a.group == group) {
            dst.add(a.name, a.group, a.ch, a.h, a.w).v = a.v;
            found = true;
        }
    if (!found) throw std::invalid_argument("training: source model lacks group " + group);
}

void require_perceptual_compat(const nets::NetConfig& a, const nets::NetConfig& b,
                               const char* which) {
    if (a.perceptual_layers != b.perceptual_layers ||
        a.perceptual_channels != b.perceptual_channels || a.kernel != b.kernel)
        throw std::invalid_argument(std::string("training: ") + which +
                                    " net was pretrained with an incompatible config");
}

void require_maps(const Dataset& ds, const maps::MapsStore& maps) {
    if (maps.per_sample.size() != ds.samples.size())
        throw std::invalid_argument("training: maps not precomputed for this dataset");
}

int dominant_style(const Dataset& ds) {
    std::vector<std::int64_t> counts(std::size_t(ds.num_styles) + 1, 0);
    for (std::size_t i : ds.indices(Split::Train))
        counts[std::size_t(ds.samples[i].assigned_style)] += 1;
    int best = 1;
    for (int k = 2; k <= ds.num_styles; ++k)
        if (counts[std::size_t(k)] > counts[std::size_t(best)]) best = k;
    return best;
}

}  // namespace

void TrainConfig::validate() const {
    if (epochs < 0) throw std::invalid_argument("train config: epochs must be >= 0");
    if (batch_size < 1) throw std::invalid_argument("train config: batch_size must be >= 1");
    if (!(learning_rate > 0.0))
        throw std::invalid_argument("train config: learning_rate must be positive");
    loss.validate();
    if (checkpoint_every < 0)
        throw std::invalid_argument("train config: checkpoint_every must be >= 0");
    if (checkpoint_every > 0 && checkpoint_dir.empty())
        throw std::invalid_argument("train config: checkpointing requires checkpoint_dir");
}

TrainedModel pretrain_perceptual(const Dataset& ds, const maps::MapsStore& maps,
                                 nets::PerceptualKind kind, const nets::NetConfig& net,
                                 const TrainConfig& cfg) {
    net.validate();
    require_maps(ds, maps);
    SeededRng rng(cfg.seed);
    nets::ParamStore store;
    nets::add_perceptual_params(store, net, kind, rng);

    RunSpec spec;
    spec.kind = kind == nets::PerceptualKind::shape ? "pretrain:shape" : "pretrain:overlap";
    spec.train_indices = ds.indices(Split::Train);
    spec.builder = make_pretrain_builder(ds, maps, kind, net, cfg.loss);
    return run_training(std::move(store), net, cfg, ds, spec, {}, 0, {}, 0.0, 0.0);
}

TrainedModel train_psa(const Dataset& ds, const TrainedModel& shape_model,
                       const TrainedModel& overlap_model, const nets::NetConfig& net,
                       const TrainConfig& cfg) {
    net.validate();
    if (ds.num_styles != net.num_styles)
        throw std::invalid_argument("training: dataset style count differs from net config");
    require_perceptual_compat(shape_model.net, net, "shape");
    require_perceptual_compat(overlap_model.net, net, "overlap");

    SeededRng rng(cfg.seed);
    nets::ParamStore store = nets::init_segmentation_params(net, rng);
    merge_group(store, shape_model.params, "shapenet");
    merge_group(store, overlap_model.params, "overlapnet");
    store.freeze_group("shapenet");
    store.freeze_group("overlapnet");

    RunSpec spec;
    spec.kind = "psa";
    spec.train_indices = ds.indices(Split::Train);
    spec.builder = make_psa_builder(ds, net, cfg.loss);
    spec.log_header = ",dsc_mixed,dsc_style,shape,overlap";
    return run_training(std::move(store), net, cfg, ds, spec, {}, 0, {}, 0.0, 0.0);
}

TrainedModel train_baseline(const Dataset& ds, BaselineKind kind, int style,
                            const nets::NetConfig& net, const TrainConfig& cfg,
                            const TrainedModel* source) {
    net.validate();
    RunSpec spec;
    nets::ParamStore store;
    switch (kind) {
        case BaselineKind::mixed: {
            SeededRng rng(cfg.seed);
            store = nets::init_single_decoder_params(net, rng);
            spec.kind = "mixed";
            spec.train_indices = ds.indices(Split::Train);
            break;
        }
        case BaselineKind::substyle: {
            SeededRng rng(cfg.seed);
            store = nets::init_single_decoder_params(net, rng);
            spec.kind = "substyle:" + std::to_string(style);
            spec.train_indices = style_train_indices(ds, style);
            break;
        }
        case BaselineKind::transfer: {
            if (source == nullptr)
                throw std::invalid_argument("training: transfer baseline requires a source model");
            if (!source->params.has_group("encoder") ||
                !source->params.has_group(nets::decoder_group(0)))
                throw std::invalid_argument("training: transfer source is not a mixed model");
            store = source->params;
            spec.kind = "transfer:" + std::to_string(style);
            spec.train_indices = style_train_indices(ds, style);
            break;
        }
    }
    spec.builder = make_single_decoder_builder(ds, net, cfg.loss);
    return run_training(std::move(store), net, cfg, ds, spec, {}, 0, {}, 0.0, 0.0);
}

TrainedModel adapt_new_style(const TrainedModel& source, const Dataset& new_ds, AdaptMode mode,
                             const TrainConfig& cfg) {
    source.net.validate();
    nets::ParamStore store = source.params;
    if (!store.has_group("encoder"))
        throw std::invalid_argument("training: source model has no encoder to freeze");
    store.freeze_group("encoder");

    SeededRng rng(cfg.seed);
    RunSpec spec;
    spec.adapt_mixed_decoder = nets::add_style_decoder(store, source.net, rng, false);
    if (mode == AdaptMode::decoder_plus_mixed) {
        spec.adapt_target_style = dominant_style(new_ds);
        spec.adapt_style_decoder = nets::add_style_decoder(store, source.net, rng, true);
        spec.kind = "adapt:decoder_plus_mixed";
    } else {
        spec.kind = "adapt:decoder_only";
    }
    spec.train_indices = new_ds.indices(Split::Train);
    spec.builder = make_adapt_builder(new_ds, source.net, cfg.loss, spec.adapt_mixed_decoder,
                                      spec.adapt_style_decoder, spec.adapt_target_style);
    return run_training(std::move(store), source.net, cfg, new_ds, spec, {}, 0, {}, 0.0, 0.0);
}

TrainedModel train_classifier(const Dataset& ds, const maps::MapsStore& maps,
                              const nets::NetConfig& net, const TrainConfig& cfg) {
    net.validate();
    require_maps(ds, maps);
    if (ds.num_styles != net.num_styles)
        throw std::invalid_argument("training: dataset style count differs from net config");
    SeededRng rng(cfg.seed);
    nets::ParamStore store = nets::init_classifier_params(net, rng);

    RunSpec spec;
    spec.kind = "classifier";
    spec.train_indices = ds.indices(Split::Train);
    spec.builder = make_classifier_builder(ds, maps, net);
    return run_training(std::move(store), net, cfg, ds, spec, {}, 0, {}, 0.0, 0.0);
}

TrainedModel resume_training(const std::string& checkpoint_dir, const Dataset& ds,
                             const maps::MapsStore* maps) {
    Checkpoint ck = load_checkpoint(checkpoint_dir);
    if (!ck.has_opt)
        throw std::runtime_error("resume: checkpoint has no optimizer state");
    if (ck.model.dataset_hash != ds.content_hash())
        throw std::runtime_error("resume: dataset does not match checkpoint provenance");

    const TrainConfig& cfg = ck.model.train;
    const nets::NetConfig& net = ck.model.net;
    const std::string& kind = ck.model.kind;

    RunSpec spec;
    spec.kind = kind;
    spec.adapt_mixed_decoder = ck.model.adapt_mixed_decoder;
    spec.adapt_style_decoder = ck.model.adapt_style_decoder;
    spec.adapt_target_style = ck.model.adapt_target_style;
    spec.train_indices = ds.indices(Split::Train);

    auto needs_maps = [&]() {
        if (maps == nullptr)
            throw std::invalid_argument("resume: this checkpoint kind requires precomputed maps");
        require_maps(ds, *maps);
    };

    if (kind == "pretrain:shape" || kind == "pretrain:overlap") {
        needs_maps();
        const auto pk = kind == "pretrain:shape" ? nets::PerceptualKind::shape
                                                 : nets::PerceptualKind::overlap;
        spec.builder = make_pretrain_builder(ds, *maps, pk, net, cfg.loss);
    } else if (kind == "psa") {
        spec.builder = make_psa_builder(ds, net, cfg.loss);
        spec.log_header = ",dsc_mixed,dsc_style,shape,overlap";
    } else if (kind == "mixed") {
        spec.builder = make_single_decoder_builder(ds, net, cfg.loss);
    } else if (kind.rfind("substyle:", 0) == 0 || kind.rfind("transfer:", 0) == 0) {
        const int style = std::stoi(kind.substr(kind.find(':') + 1));
        spec.train_indices = style_train_indices(ds, style);
        spec.builder = make_single_decoder_builder(ds, net, cfg.loss);
    } else if (kind == "adapt:decoder_only" || kind == "adapt:decoder_plus_mixed") {
        spec.builder = make_adapt_builder(ds, net, cfg.loss, spec.adapt_mixed_decoder,
                                          spec.adapt_style_decoder, spec.adapt_target_style);
    } else if (kind == "classifier") {
        needs_maps();
        spec.builder = make_classifier_builder(ds, *maps, net);
    } else {
        throw std::runtime_error("resume: unknown training kind '" + kind + "'");
    }

    return run_training(std::move(ck.model.params), net, cfg, ds, spec, std::move(ck.opt),
                        ck.next_epoch, std::move(ck.model.update_counts), ck.model.initial_loss,
                        ck.model.final_loss);
}

namespace {

nlohmann::json parse_config_file(const std::filesystem::path& file, const char* what) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error(std::string(what) + ": cannot open " + file.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(std::string(what) + ": parse error: " + e.what());
    }
    return j;
}

void write_config_file(const nlohmann::json& j, const std::filesystem::path& file,
                       const char* what) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error(std::string(what) + ": cannot write " + file.string());
    out << j.dump(2) << '\n';
}

}  // namespace

nets::NetConfig load_net_config(const std::filesystem::path& file) {
    return net_config_from_json(parse_config_file(file, "net config"));
}

void save_net_config(const nets::NetConfig& cfg, const std::filesystem::path& file) {
    write_config_file(net_config_json(cfg), file, "net config");
}

TrainConfig load_train_config(const std::filesystem::path& file) {
    return train_config_from_json(parse_config_file(file, "train config"));
}

void save_train_config(const TrainConfig& cfg, const std::filesystem::path& file) {
    write_config_file(train_config_json(cfg), file, "train config");
}

}  // namespace psa::train
