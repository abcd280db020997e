#include "psa/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "json_util.hpp"
#include "psa/maps.hpp"
#include "psa/stats.hpp"

namespace psa::experiments {

namespace {

using nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// One role per trained model inside an experiment seed.
enum : std::uint64_t {
    kRoleShape = 1,
    kRoleOverlap = 2,
    kRolePsa = 3,
    kRoleMixed = 4,
    kRoleScratch = 5,
    kRoleAdaptDecoder = 6,
    kRoleAdaptPlusMixed = 7,
    kRoleClassifier = 8,
    kRoleSubstyle = 16,  // + style
    kRoleTransfer = 64,  // + style
};

std::string fmt4(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

/// Training config for one model run: reseeded, never checkpointing, loss log
/// routed into cfg.log_dir when set.
train::TrainConfig prepared(const ExperimentConfig& cfg, const train::TrainConfig& base,
                            std::uint64_t exp_seed, std::uint64_t role,
                            const std::string& model) {
    train::TrainConfig c = base;
    c.seed = derive_seed(exp_seed, role);
    c.checkpoint_every = 0;
    c.checkpoint_dir.clear();
    c.loss_log.clear();
    if (!cfg.log_dir.empty()) {
        std::filesystem::create_directories(cfg.log_dir);
        c.loss_log = (std::filesystem::path(cfg.log_dir) /
                      (model + "_seed" + std::to_string(exp_seed) + ".csv"))
                         .string();
    }
    return c;
}

std::vector<double> column(const report::MetricReport& rep, const std::string& model, int style,
                           double metrics::SegScores::*field) {
    std::vector<double> out;
    for (const auto& r : rep.rows)
        if (r.model == model && r.style == style) out.push_back(r.scores.*field);
    return out;
}

report::TableRow table_row(const report::MetricReport& rep, const std::string& model,
                           int style) {
    using metrics::SegScores;
    report::TableRow row;
    row.model = model;
    row.style = style;
    const auto dsc = column(rep, model, style, &SegScores::dsc);
    row.n = int(dsc.size());
    row.dsc = report::aggregate(dsc);
    row.hd95 = report::aggregate(column(rep, model, style, &SegScores::hd95));
    row.asd = report::aggregate(column(rep, model, style, &SegScores::asd));
    row.assd = report::aggregate(column(rep, model, style, &SegScores::assd));
    row.tpr = report::aggregate(column(rep, model, style, &SegScores::tpr));
    row.tnr = report::aggregate(column(rep, model, style, &SegScores::tnr));
    return row;
}

/// Paired comparison columns against a reference model scored on the same
/// samples and ground truth.
void attach_pairing(report::TableRow& row, const report::MetricReport& rep,
                    const std::string& baseline_model, int baseline_style) {
    using metrics::SegScores;
    const auto base = column(rep, baseline_model, baseline_style, &SegScores::dsc);
    const auto mine = column(rep, row.model, row.style, &SegScores::dsc);
    row.baseline_dsc = report::aggregate(base).mean;
    row.delta_dsc = row.dsc.mean - row.baseline_dsc;
    row.p_dsc = stats::paired_t_test(mine, base).p;
}

std::ofstream open_text(const std::filesystem::path& file) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("experiments: cannot write " + file.string());
    return out;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t role) {
    // splitmix64 on seed + role: decorrelates roles even for adjacent seeds
    std::uint64_t z = seed + role * 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

metrics::SegScores guarded_scores(const BinaryMask& pred, const BinaryMask& ref) {
    metrics::SegScores s;
    s.dsc = metrics::dsc(pred, ref);
    const bool pred_empty = pred.count() == 0;
    const bool ref_empty = ref.count() == 0;
    if (!pred_empty && !ref_empty) {
        s.hd95 = metrics::hd95(pred, ref);
        s.asd = metrics::asd(pred, ref);
        s.assd = metrics::assd(pred, ref);
    } else {
        s.hd95 = s.asd = s.assd = kNaN;
    }
    s.tpr = ref_empty ? kNaN : metrics::tpr(pred, ref);
    s.tnr = ref.count() == ref.grid().size() ? kNaN : metrics::tnr(pred, ref);
    return s;
}

void ExperimentConfig::validate() const {
    phantom.validate();
    phantom_b.validate();
    net.validate();
    pretrain.validate();
    train.validate();
    adapt.validate();
    classifier.validate();
    if (seeds.empty()) throw std::invalid_argument("experiments: need at least one seed");
    if (thresholds.comparison_styles < 0)
        throw std::invalid_argument("experiments: comparison_styles must be >= 0");
    if (!(thresholds.classifier_accuracy >= 0.0 && thresholds.classifier_accuracy <= 1.0))
        throw std::invalid_argument("experiments: classifier_accuracy must lie in [0, 1]");
    if (!std::isfinite(thresholds.comparison_gain) || !std::isfinite(thresholds.adaptation_gain))
        throw std::invalid_argument("experiments: gain thresholds must be finite");
}

ExperimentConfig load_experiment_config(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("experiment config: cannot open " + file.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("experiment config: parse error: ") + e.what());
    }

    ExperimentConfig cfg;
    try {
        if (j.contains("phantom")) cfg.phantom = phantom::phantom_config_from_json(j.at("phantom"));
        if (j.contains("phantom_b"))
            cfg.phantom_b = phantom::phantom_config_from_json(j.at("phantom_b"));
        if (j.contains("net")) cfg.net = train::net_config_from_json(j.at("net"));
        if (j.contains("train")) {
            const auto& t = j.at("train");
            if (t.contains("pretrain")) cfg.pretrain = train::train_config_from_json(t.at("pretrain"));
            if (t.contains("main")) cfg.train = train::train_config_from_json(t.at("main"));
            if (t.contains("adapt")) cfg.adapt = train::train_config_from_json(t.at("adapt"));
            if (t.contains("classifier"))
                cfg.classifier = train::train_config_from_json(t.at("classifier"));
        }
        if (j.contains("seeds")) cfg.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
        if (j.contains("thresholds")) {
            const auto& t = j.at("thresholds");
            cfg.thresholds.comparison_gain =
                t.value("comparison_gain", cfg.thresholds.comparison_gain);
            cfg.thresholds.comparison_styles =
                t.value("comparison_styles", cfg.thresholds.comparison_styles);
            cfg.thresholds.adaptation_gain =
                t.value("adaptation_gain", cfg.thresholds.adaptation_gain);
            cfg.thresholds.classifier_accuracy =
                t.value("classifier_accuracy", cfg.thresholds.classifier_accuracy);
        }
        cfg.log_dir = j.value("log_dir", cfg.log_dir);
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("experiment config: schema violation: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

void save_experiment_config(const ExperimentConfig& cfg, const std::filesystem::path& file) {
    json j;
    j["phantom"] = phantom::phantom_config_json(cfg.phantom);
    j["phantom_b"] = phantom::phantom_config_json(cfg.phantom_b);
    j["net"] = train::net_config_json(cfg.net);
    j["train"] = {{"pretrain", train::train_config_json(cfg.pretrain)},
                  {"main", train::train_config_json(cfg.train)},
                  {"adapt", train::train_config_json(cfg.adapt)},
                  {"classifier", train::train_config_json(cfg.classifier)}};
    j["seeds"] = cfg.seeds;
    j["thresholds"] = {{"comparison_gain", cfg.thresholds.comparison_gain},
                       {"comparison_styles", cfg.thresholds.comparison_styles},
                       {"adaptation_gain", cfg.thresholds.adaptation_gain},
                       {"classifier_accuracy", cfg.thresholds.classifier_accuracy}};
    j["log_dir"] = cfg.log_dir;

    std::ofstream out(file);
    if (!out) throw std::runtime_error("experiment config: cannot write " + file.string());
    out << j.dump(2) << '\n';
}

ComparisonOutcome run_model_comparison(const ExperimentConfig& cfg) {
    cfg.validate();
    if (cfg.phantom.num_styles != cfg.net.num_styles)
        throw std::invalid_argument("experiments: phantom styles differ from net style decoders");

    const Dataset ds = phantom::build_dataset(cfg.phantom);
    const maps::MapsStore maps = maps::precompute(ds);
    const auto test_idx = ds.indices(Split::Test);
    if (test_idx.size() < 2)
        throw std::invalid_argument("experiments: need at least two test samples");
    const int n_styles = ds.num_styles;

    ComparisonOutcome out;
    out.thresholds_met = true;
    for (const std::uint64_t s : cfg.seeds) {
        ComparisonSeedRun run;
        run.seed = s;

        const auto shape =
            train::pretrain_perceptual(ds, maps, nets::PerceptualKind::shape, cfg.net,
                                       prepared(cfg, cfg.pretrain, s, kRoleShape, "shape"));
        const auto overlap =
            train::pretrain_perceptual(ds, maps, nets::PerceptualKind::overlap, cfg.net,
                                       prepared(cfg, cfg.pretrain, s, kRoleOverlap, "overlap"));
        const auto psa = train::train_psa(ds, shape, overlap, cfg.net,
                                          prepared(cfg, cfg.train, s, kRolePsa, "psa"));
        const auto mixed = train::train_baseline(ds, train::BaselineKind::mixed, 0, cfg.net,
                                                 prepared(cfg, cfg.train, s, kRoleMixed, "mixed"));
        std::vector<train::TrainedModel> substyle, transfer;
        for (int k = 1; k <= n_styles; ++k) {
            const std::string suffix = std::to_string(k);
            substyle.push_back(train::train_baseline(
                ds, train::BaselineKind::substyle, k, cfg.net,
                prepared(cfg, cfg.train, s, kRoleSubstyle + std::uint64_t(k),
                         "substyle" + suffix)));
            transfer.push_back(train::train_baseline(
                ds, train::BaselineKind::transfer, k, cfg.net,
                prepared(cfg, cfg.train, s, kRoleTransfer + std::uint64_t(k),
                         "transfer" + suffix),
                &mixed));
        }

        for (const std::size_t i : test_idx) {
            const auto& smp = ds.samples[i];
            auto predict = [&](const train::TrainedModel& m, int style) {
                return binarize(
                    nets::predict_ctv(m.params, cfg.net, smp.image, smp.bladder, smp.rectum, style),
                    0.5);
            };
            const BinaryMask pred_mixed = predict(mixed, 0);
            run.per_sample.rows.push_back(
                {"mixed", 0, i, guarded_scores(pred_mixed, smp.assigned_ctv())});
            for (int k = 1; k <= n_styles; ++k) {
                const BinaryMask& gt = smp.ctv_by_style[std::size_t(k - 1)];
                run.per_sample.rows.push_back({"mixed", k, i, guarded_scores(pred_mixed, gt)});
                run.per_sample.rows.push_back(
                    {"substyle", k, i, guarded_scores(predict(substyle[std::size_t(k - 1)], 0), gt)});
                run.per_sample.rows.push_back(
                    {"transfer", k, i, guarded_scores(predict(transfer[std::size_t(k - 1)], 0), gt)});
                run.per_sample.rows.push_back({"psa", k, i, guarded_scores(predict(psa, k), gt)});
            }
        }

        run.table.name = "model_comparison_seed" + std::to_string(s);
        run.table.rows.push_back(table_row(run.per_sample, "mixed", 0));
        for (int k = 1; k <= n_styles; ++k)
            run.table.rows.push_back(table_row(run.per_sample, "substyle", k));
        for (int k = 1; k <= n_styles; ++k)
            run.table.rows.push_back(table_row(run.per_sample, "transfer", k));
        for (int k = 1; k <= n_styles; ++k) {
            report::TableRow row = table_row(run.per_sample, "psa", k);
            attach_pairing(row, run.per_sample, "mixed", k);
            run.style_gain.push_back(row.delta_dsc);
            run.table.rows.push_back(std::move(row));
        }

        int cleared = 0;
        for (const double g : run.style_gain)
            if (g >= cfg.thresholds.comparison_gain) ++cleared;
        if (cleared < cfg.thresholds.comparison_styles) out.thresholds_met = false;
        out.runs.push_back(std::move(run));
    }
    return out;
}

AdaptationOutcome run_adaptation_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const std::uint64_t s = cfg.seeds.front();
    const Dataset ds_a = phantom::build_dataset(cfg.phantom);
    const Dataset ds_b = phantom::build_dataset(cfg.phantom_b);
    const auto test_idx = ds_b.indices(Split::Test);
    if (test_idx.size() < 2)
        throw std::invalid_argument("experiments: need at least two test samples");

    const auto source = train::train_baseline(ds_a, train::BaselineKind::mixed, 0, cfg.net,
                                              prepared(cfg, cfg.train, s, kRoleMixed, "source"));
    const auto scratch =
        train::train_baseline(ds_b, train::BaselineKind::mixed, 0, cfg.net,
                              prepared(cfg, cfg.train, s, kRoleScratch, "scratch"));
    const auto decoder_cfg = prepared(cfg, cfg.adapt, s, kRoleAdaptDecoder, "decoder_only");
    // Same seed, zero epochs: the frozen-encoder model exactly as adaptation
    // would start it, before any update.
    auto init_cfg = decoder_cfg;
    init_cfg.epochs = 0;
    init_cfg.loss_log.clear();
    const auto adapted_init =
        train::adapt_new_style(source, ds_b, train::AdaptMode::decoder_only, init_cfg);
    const auto adapted_dec =
        train::adapt_new_style(source, ds_b, train::AdaptMode::decoder_only, decoder_cfg);
    const auto adapted_plus = train::adapt_new_style(
        source, ds_b, train::AdaptMode::decoder_plus_mixed,
        prepared(cfg, cfg.adapt, s, kRoleAdaptPlusMixed, "decoder_plus_mixed"));

    AdaptationOutcome out;
    auto add_rows = [&](const std::string& model, const train::TrainedModel& m,
                        auto&& decoder_of) {
        for (const std::size_t i : test_idx) {
            const auto& smp = ds_b.samples[i];
            const BinaryMask pred =
                binarize(nets::predict_ctv(m.params, m.net, smp.image, smp.bladder, smp.rectum,
                                           decoder_of(smp)),
                         0.5);
            out.per_sample.rows.push_back({model, 0, i, guarded_scores(pred, smp.assigned_ctv())});
        }
    };
    auto mixed_decoder = [](const StyledSample&) { return 0; };
    add_rows("source_direct", source, mixed_decoder);
    add_rows("scratch", scratch, mixed_decoder);
    add_rows("decoder_init", adapted_init,
             [&](const StyledSample&) { return adapted_init.adapt_mixed_decoder; });
    add_rows("decoder_only", adapted_dec,
             [&](const StyledSample&) { return adapted_dec.adapt_mixed_decoder; });
    add_rows("decoder_plus_mixed", adapted_plus, [&](const StyledSample& smp) {
        return smp.assigned_style == adapted_plus.adapt_target_style
                   ? adapted_plus.adapt_style_decoder
                   : adapted_plus.adapt_mixed_decoder;
    });

    out.table.name = "adaptation";
    for (const char* model :
         {"source_direct", "scratch", "decoder_init", "decoder_only", "decoder_plus_mixed"}) {
        report::TableRow row = table_row(out.per_sample, model, 0);
        if (row.model != "source_direct") attach_pairing(row, out.per_sample, "source_direct", 0);
        out.table.rows.push_back(std::move(row));
    }

    out.direct_dsc = out.table.rows.front().dsc.mean;
    out.adapted_dsc = out.table.rows.back().dsc.mean;
    out.thresholds_met = out.adapted_dsc >= out.direct_dsc + cfg.thresholds.adaptation_gain;
    return out;
}

ClassifierOutcome run_classifier_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    if (cfg.phantom.num_styles != cfg.net.num_styles)
        throw std::invalid_argument("experiments: phantom styles differ from net style count");

    const Dataset ds = phantom::build_dataset(cfg.phantom);
    const maps::MapsStore maps = maps::precompute(ds);
    const auto model = train::train_classifier(
        ds, maps, cfg.net,
        prepared(cfg, cfg.classifier, cfg.seeds.front(), kRoleClassifier, "classifier"));

    const int n = ds.num_styles;
    ClassifierOutcome out;
    out.confusion.assign(std::size_t(n), std::vector<int>(std::size_t(n), 0));
    int correct = 0;
    for (const std::size_t i : ds.indices(Split::Test)) {
        const auto& smp = ds.samples[i];
        const auto probs =
            nets::classify(model.params, cfg.net, smp.image, maps.per_sample[i].distance);
        const int pred =
            int(std::max_element(probs.begin(), probs.end()) - probs.begin());
        ++out.confusion[std::size_t(smp.assigned_style - 1)][std::size_t(pred)];
        if (pred == smp.assigned_style - 1) ++correct;
        ++out.test_count;
    }
    if (out.test_count == 0) throw std::invalid_argument("experiments: empty test split");

    out.accuracy = double(correct) / double(out.test_count);
    out.recall.assign(std::size_t(n), kNaN);
    for (int k = 0; k < n; ++k) {
        int row_total = 0;
        for (const int c : out.confusion[std::size_t(k)]) row_total += c;
        if (row_total > 0)
            out.recall[std::size_t(k)] =
                double(out.confusion[std::size_t(k)][std::size_t(k)]) / double(row_total);
    }
    out.thresholds_met = out.accuracy >= cfg.thresholds.classifier_accuracy;
    return out;
}

void emit_report(const ComparisonOutcome& out, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    for (const auto& run : out.runs) {
        const std::string tag = "_seed" + std::to_string(run.seed);
        report::write_table_csv(run.table, dir / ("comparison_table" + tag + ".csv"));
        report::write_metric_csv(run.per_sample, dir / ("comparison_samples" + tag + ".csv"));
        report::write_boxplot_csv(run.per_sample, dir / ("comparison_boxplot" + tag + ".csv"));
    }
    auto txt = open_text(dir / "comparison_summary.txt");
    txt << "Model comparison: style decoders vs mixed baseline (test-split DSC)\n";
    for (const auto& run : out.runs) {
        txt << "seed " << run.seed << ":\n";
        for (std::size_t k = 0; k < run.style_gain.size(); ++k)
            txt << "  style " << k + 1 << ": gain " << fmt4(run.style_gain[k]) << '\n';
    }
    txt << (out.thresholds_met ? "PASS" : "FAIL") << ": per-style gain gate\n";
}

void emit_report(const AdaptationOutcome& out, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    report::write_table_csv(out.table, dir / "adaptation_table.csv");
    report::write_metric_csv(out.per_sample, dir / "adaptation_samples.csv");
    report::write_boxplot_csv(out.per_sample, dir / "adaptation_boxplot.csv");
    auto txt = open_text(dir / "adaptation_summary.txt");
    txt << "Institution adaptation (test-split DSC on the second institution)\n";
    for (const auto& row : out.table.rows)
        txt << "  " << row.model << ": " << fmt4(row.dsc.mean) << " +/- " << fmt4(row.dsc.sd)
            << '\n';
    txt << (out.thresholds_met ? "PASS" : "FAIL")
        << ": decoder_plus_mixed vs source_direct gain " << fmt4(out.adapted_dsc - out.direct_dsc)
        << '\n';
}

void emit_report(const ClassifierOutcome& out, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    {
        auto csv = open_text(dir / "classifier_report.csv");
        csv << "metric,style,value\n";
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", out.accuracy);
        csv << "accuracy,0," << buf << '\n';
        for (std::size_t k = 0; k < out.recall.size(); ++k) {
            std::snprintf(buf, sizeof buf, "%.17g", out.recall[k]);
            csv << "recall," << k + 1 << ',' << buf << '\n';
        }
    }
    {
        auto csv = open_text(dir / "classifier_confusion.csv");
        csv << "true_style";
        for (std::size_t k = 0; k < out.confusion.size(); ++k) csv << ",pred_" << k + 1;
        csv << '\n';
        for (std::size_t r = 0; r < out.confusion.size(); ++r) {
            csv << r + 1;
            for (const int c : out.confusion[r]) csv << ',' << c;
            csv << '\n';
        }
    }
    auto txt = open_text(dir / "classifier_summary.txt");
    txt << "Style classifier: test accuracy " << fmt4(out.accuracy) << " over " << out.test_count
        << " samples\n";
    for (std::size_t k = 0; k < out.recall.size(); ++k)
        txt << "  style " << k + 1 << " recall: " << fmt4(out.recall[k]) << '\n';
    txt << (out.thresholds_met ? "PASS" : "FAIL") << ": accuracy gate\n";
}

}  // namespace psa::experiments
