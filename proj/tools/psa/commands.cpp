#include "commands.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "psa/checkpoint.hpp"
#include "psa/dataset.hpp"
#include "psa/experiments.hpp"
#include "psa/maps.hpp"
#include "psa/nets.hpp"
#include "psa/phantom.hpp"
#include "psa/report.hpp"
#include "psa/survival.hpp"
#include "psa/training.hpp"

namespace psa::cli {

namespace {

namespace fs = std::filesystem;

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Options shared by every training subcommand: a JSON config file plus
/// individual flag overrides.
struct TrainOpts {
    std::string config_file;
    std::optional<int> epochs;
    std::optional<int> batch_size;
    std::optional<double> learning_rate;
    std::optional<std::uint64_t> seed;
    std::optional<int> checkpoint_every;
    std::optional<std::string> checkpoint_dir;
    std::optional<std::string> loss_log;
};

void add_train_opts(CLI::App* cmd, TrainOpts& o) {
    cmd->add_option("--train-config", o.config_file, "training config JSON file");
    cmd->add_option("--epochs", o.epochs, "override epoch count");
    cmd->add_option("--batch-size", o.batch_size, "override batch size");
    cmd->add_option("--learning-rate", o.learning_rate, "override Adam learning rate");
    cmd->add_option("--seed", o.seed, "override training seed");
    cmd->add_option("--checkpoint-every", o.checkpoint_every,
                    "write a resumable checkpoint every N epochs");
    cmd->add_option("--checkpoint-dir", o.checkpoint_dir, "checkpoint directory");
    cmd->add_option("--loss-log", o.loss_log, "per-step loss CSV path");
}

train::TrainConfig resolve_train(const TrainOpts& o) {
    train::TrainConfig c =
        o.config_file.empty() ? train::TrainConfig{} : train::load_train_config(o.config_file);
    if (o.epochs) c.epochs = *o.epochs;
    if (o.batch_size) c.batch_size = *o.batch_size;
    if (o.learning_rate) c.learning_rate = *o.learning_rate;
    if (o.seed) c.seed = *o.seed;
    if (o.checkpoint_every) c.checkpoint_every = *o.checkpoint_every;
    if (o.checkpoint_dir) c.checkpoint_dir = *o.checkpoint_dir;
    if (o.loss_log) c.loss_log = *o.loss_log;
    c.validate();
    return c;
}

nets::NetConfig resolve_net(const std::string& file) {
    return file.empty() ? nets::NetConfig{} : train::load_net_config(file);
}

void report_training(const train::TrainedModel& m, const fs::path& out) {
    train::save_model(out, m);
    std::cout << m.kind << ": loss " << fmt17(m.initial_loss) << " -> " << fmt17(m.final_loss)
              << ", saved to " << out.string() << '\n';
}

/// Which decoder scores a sample, given how the model was trained.
int routed_decoder(const train::TrainedModel& m, const StyledSample& s) {
    if (m.kind == "psa") return s.assigned_style;
    if (m.kind == "adapt:decoder_only") return m.adapt_mixed_decoder;
    if (m.kind == "adapt:decoder_plus_mixed")
        return s.assigned_style == m.adapt_target_style ? m.adapt_style_decoder
                                                        : m.adapt_mixed_decoder;
    if (m.kind == "mixed" || m.kind.rfind("substyle:", 0) == 0 ||
        m.kind.rfind("transfer:", 0) == 0)
        return 0;
    throw std::runtime_error("eval: '" + m.kind + "' is not a segmentation model");
}

// --- subcommand bodies -----------------------------------------------------

struct PhantomArgs {
    std::string config_file;
    bool institution_b = false;
    std::string out;
};

void cmd_phantom_generate(const PhantomArgs& a) {
    phantom::PhantomConfig cfg = a.institution_b ? phantom::PhantomConfig::institution_b_defaults()
                                                 : phantom::PhantomConfig::defaults();
    if (!a.config_file.empty()) cfg = phantom::load_phantom_config(a.config_file);
    const Dataset ds = phantom::build_dataset(cfg);
    fs::create_directories(a.out);
    save_dataset(ds, a.out);
    phantom::save_phantom_config(cfg, fs::path(a.out) / "phantom_config.json");
    std::cout << "dataset: " << ds.samples.size() << " samples, " << ds.num_styles << " styles ("
              << ds.indices(Split::Train).size() << " train / " << ds.indices(Split::Val).size()
              << " val / " << ds.indices(Split::Test).size() << " test) -> " << a.out << '\n';
}

struct MapsArgs {
    std::string dataset;
    std::string out;
};

void cmd_maps_precompute(const MapsArgs& a) {
    const Dataset ds = load_dataset(a.dataset);
    const maps::MapsStore store = maps::precompute(ds);
    fs::create_directories(a.out);
    maps::save_maps(store, a.out);
    std::cout << "maps: " << store.per_sample.size() << " samples -> " << a.out << '\n';
}

struct PretrainArgs {
    std::string dataset, maps_dir, kind, net_file, out;
    TrainOpts train;
};

void cmd_pretrain(const PretrainArgs& a) {
    const Dataset ds = load_dataset(a.dataset);
    const maps::MapsStore store = maps::load_maps(a.maps_dir, ds);
    nets::PerceptualKind kind;
    if (a.kind == "shape")
        kind = nets::PerceptualKind::shape;
    else if (a.kind == "overlap")
        kind = nets::PerceptualKind::overlap;
    else
        throw std::invalid_argument("pretrain: kind must be shape or overlap");
    const auto model =
        train::pretrain_perceptual(ds, store, kind, resolve_net(a.net_file), resolve_train(a.train));
    report_training(model, a.out);
}

struct TrainArgs {
    std::string model, dataset, out, shape_dir, overlap_dir, source_dir, resume_dir, maps_dir,
        net_file;
    TrainOpts train;
};

void cmd_train(const TrainArgs& a) {
    const Dataset ds = load_dataset(a.dataset);

    if (!a.resume_dir.empty()) {
        std::optional<maps::MapsStore> store;
        if (!a.maps_dir.empty()) store = maps::load_maps(a.maps_dir, ds);
        const auto model = train::resume_training(a.resume_dir, ds, store ? &*store : nullptr);
        report_training(model, a.out);
        return;
    }

    const nets::NetConfig net = resolve_net(a.net_file);
    const train::TrainConfig cfg = resolve_train(a.train);
    train::TrainedModel model;
    if (a.model == "psa") {
        if (a.shape_dir.empty() || a.overlap_dir.empty())
            throw std::invalid_argument("train: --model psa needs --shape and --overlap");
        model = train::train_psa(ds, train::load_model(a.shape_dir),
                                 train::load_model(a.overlap_dir), net, cfg);
    } else if (a.model == "mixed") {
        model = train::train_baseline(ds, train::BaselineKind::mixed, 0, net, cfg);
    } else if (a.model.rfind("substyle:", 0) == 0) {
        const int style = std::stoi(a.model.substr(9));
        model = train::train_baseline(ds, train::BaselineKind::substyle, style, net, cfg);
    } else if (a.model.rfind("transfer:", 0) == 0) {
        if (a.source_dir.empty())
            throw std::invalid_argument("train: --model transfer:K needs --source");
        const int style = std::stoi(a.model.substr(9));
        const auto source = train::load_model(a.source_dir);
        model = train::train_baseline(ds, train::BaselineKind::transfer, style, net, cfg, &source);
    } else {
        throw std::invalid_argument(
            "train: --model must be psa, mixed, substyle:K or transfer:K");
    }
    report_training(model, a.out);
}

struct AdaptArgs {
    std::string source_dir, dataset, mode, out;
    TrainOpts train;
};

void cmd_adapt(const AdaptArgs& a) {
    const Dataset ds = load_dataset(a.dataset);
    const auto source = train::load_model(a.source_dir);
    train::AdaptMode mode;
    if (a.mode == "decoder-only")
        mode = train::AdaptMode::decoder_only;
    else if (a.mode == "decoder-plus-mixed")
        mode = train::AdaptMode::decoder_plus_mixed;
    else
        throw std::invalid_argument("adapt: mode must be decoder-only or decoder-plus-mixed");
    report_training(train::adapt_new_style(source, ds, mode, resolve_train(a.train)), a.out);
}

struct ClassifyArgs {
    std::string dataset, maps_dir, net_file, out;
    TrainOpts train;
};

void cmd_classify_train(const ClassifyArgs& a) {
    const Dataset ds = load_dataset(a.dataset);
    const maps::MapsStore store = maps::load_maps(a.maps_dir, ds);
    report_training(
        train::train_classifier(ds, store, resolve_net(a.net_file), resolve_train(a.train)),
        a.out);
}

struct EvalArgs {
    std::string model_dir, dataset, out, split = "test";
    bool style_matched = false;
};

void cmd_eval(const EvalArgs& a) {
    const Dataset ds = load_dataset(a.dataset);
    const auto model = train::load_model(a.model_dir);
    const auto idx = ds.indices(split_from_string(a.split));
    if (idx.empty()) throw std::invalid_argument("eval: empty split");

    report::MetricReport rep;
    for (const std::size_t i : idx) {
        const auto& s = ds.samples[i];
        auto predict = [&](int decoder) {
            return binarize(nets::predict_ctv(model.params, model.net, s.image, s.bladder,
                                              s.rectum, decoder),
                            0.5);
        };
        rep.rows.push_back(
            {model.kind, 0, i, experiments::guarded_scores(predict(routed_decoder(model, s)),
                                                           s.assigned_ctv())});
        if (a.style_matched)
            for (int k = 1; k <= ds.num_styles; ++k)
                rep.rows.push_back({model.kind, k, i,
                                    experiments::guarded_scores(
                                        predict(model.kind == "psa" ? k : routed_decoder(model, s)),
                                        s.ctv_by_style[std::size_t(k - 1)])});
    }

    report::Table table;
    table.name = "eval";
    auto add_row = [&](int style) {
        report::TableRow row;
        row.model = model.kind;
        row.style = style;
        std::vector<double> dsc, hd95, asd, assd, tpr, tnr;
        for (const auto& r : rep.rows)
            if (r.style == style) {
                dsc.push_back(r.scores.dsc);
                hd95.push_back(r.scores.hd95);
                asd.push_back(r.scores.asd);
                assd.push_back(r.scores.assd);
                tpr.push_back(r.scores.tpr);
                tnr.push_back(r.scores.tnr);
            }
        row.n = int(dsc.size());
        row.dsc = report::aggregate(dsc);
        row.hd95 = report::aggregate(hd95);
        row.asd = report::aggregate(asd);
        row.assd = report::aggregate(assd);
        row.tpr = report::aggregate(tpr);
        row.tnr = report::aggregate(tnr);
        table.rows.push_back(std::move(row));
    };
    add_row(0);
    if (a.style_matched)
        for (int k = 1; k <= ds.num_styles; ++k) add_row(k);

    fs::create_directories(a.out);
    report::write_metric_csv(rep, fs::path(a.out) / "eval_samples.csv");
    report::write_table_csv(table, fs::path(a.out) / "eval_table.csv");
    std::cout << "eval " << model.kind << " on " << a.split << ": mean DSC "
              << fmt17(table.rows[0].dsc.mean) << " over " << table.rows[0].n << " samples -> "
              << a.out << '\n';
}

struct SurvivalArgs {
    std::string records, out;
};

std::vector<surv::SurvivalRecord> read_records_csv(const fs::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("survival: cannot open " + file.string());
    std::string line;
    if (!std::getline(in, line) || line != "time,event,group")
        throw std::runtime_error("survival: expected header time,event,group in " +
                                 file.string());
    std::vector<surv::SurvivalRecord> records;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos)
            throw std::runtime_error("survival: malformed row '" + line + "'");
        surv::SurvivalRecord r;
        r.time = std::stod(line.substr(0, c1));
        const std::string ev = line.substr(c1 + 1, c2 - c1 - 1);
        if (ev != "0" && ev != "1")
            throw std::runtime_error("survival: event must be 0 or 1, got '" + ev + "'");
        r.event = ev == "1";
        r.group = std::stoi(line.substr(c2 + 1));
        records.push_back(r);
    }
    if (records.empty()) throw std::runtime_error("survival: no records in " + file.string());
    return records;
}

void cmd_survival(const SurvivalArgs& a) {
    const auto records = read_records_csv(a.records);
    std::vector<int> groups;
    for (const auto& r : records)
        if (std::find(groups.begin(), groups.end(), r.group) == groups.end())
            groups.push_back(r.group);
    std::sort(groups.begin(), groups.end());

    fs::create_directories(a.out);
    for (const int g : groups) {
        std::vector<surv::SurvivalRecord> sub;
        for (const auto& r : records)
            if (r.group == g) sub.push_back(r);
        const auto curve = surv::km_estimate(sub);
        const fs::path file = fs::path(a.out) / ("km_group_" + std::to_string(g) + ".csv");
        std::ofstream out(file);
        if (!out) throw std::runtime_error("survival: cannot write " + file.string());
        out << "time,survival,at_risk,events\n";
        for (std::size_t i = 0; i < curve.times.size(); ++i)
            out << fmt17(curve.times[i]) << ',' << fmt17(curve.survival[i]) << ','
                << curve.at_risk[i] << ',' << curve.events[i] << '\n';
    }

    nlohmann::json j;
    j["groups"] = groups;
    j["n"] = records.size();
    if (groups.size() == 2) {
        std::vector<surv::SurvivalRecord> a_grp, b_grp;
        for (const auto& r : records) (r.group == groups[0] ? a_grp : b_grp).push_back(r);
        const auto lr = surv::logrank_test(a_grp, b_grp);
        j["logrank"] = {{"statistic", lr.statistic}, {"p", lr.p}};
        std::cout << "logrank groups " << groups[0] << " vs " << groups[1] << ": statistic "
                  << fmt17(lr.statistic) << ", p " << fmt17(lr.p) << '\n';
    } else {
        j["logrank"] = nullptr;
        std::cout << "logrank skipped: need exactly 2 groups, found " << groups.size() << '\n';
    }
    std::ofstream out(fs::path(a.out) / "survival_tests.json");
    if (!out) throw std::runtime_error("survival: cannot write test results");
    out << j.dump(2) << '\n';
}

struct ExperimentArgs {
    std::string config_file, out;
};

experiments::ExperimentConfig experiment_setup(const ExperimentArgs& a) {
    experiments::ExperimentConfig cfg = experiments::load_experiment_config(a.config_file);
    fs::create_directories(a.out);
    if (cfg.log_dir.empty()) cfg.log_dir = (fs::path(a.out) / "logs").string();
    experiments::save_experiment_config(cfg, fs::path(a.out) / "experiment_config.json");
    return cfg;
}

int finish_experiment(bool thresholds_met, const std::string& what) {
    std::cout << what << ": " << (thresholds_met ? "PASS" : "FAIL") << '\n';
    return thresholds_met ? 0 : 1;
}

}  // namespace

int run_cli(int argc, char** argv) {
    CLI::App app{"Style-aware contour segmentation workbench"};
    app.require_subcommand(1);
    int rc = 0;

    // phantom generate
    auto phantom_args = std::make_shared<PhantomArgs>();
    CLI::App* phantom_cmd = app.add_subcommand("phantom", "synthetic dataset tools");
    phantom_cmd->require_subcommand(1);
    CLI::App* generate = phantom_cmd->add_subcommand("generate", "build and save a dataset");
    generate->add_option("--config", phantom_args->config_file, "phantom config JSON");
    generate->add_flag("--institution-b", phantom_args->institution_b,
                       "use the second-institution default config");
    generate->add_option("--out", phantom_args->out, "output dataset directory")->required();
    generate->callback([phantom_args] { cmd_phantom_generate(*phantom_args); });

    // maps precompute
    auto maps_args = std::make_shared<MapsArgs>();
    CLI::App* maps_cmd = app.add_subcommand("maps", "precomputed training targets");
    maps_cmd->require_subcommand(1);
    CLI::App* precompute = maps_cmd->add_subcommand("precompute", "derive per-sample maps");
    precompute->add_option("--dataset", maps_args->dataset, "dataset directory")->required();
    precompute->add_option("--out", maps_args->out, "output maps directory")->required();
    precompute->callback([maps_args] { cmd_maps_precompute(*maps_args); });

    // pretrain
    auto pre_args = std::make_shared<PretrainArgs>();
    CLI::App* pretrain = app.add_subcommand("pretrain", "train a frozen perceptual net");
    pretrain->add_option("--dataset", pre_args->dataset, "dataset directory")->required();
    pretrain->add_option("--maps", pre_args->maps_dir, "precomputed maps directory")->required();
    pretrain->add_option("--kind", pre_args->kind, "shape or overlap")->required();
    pretrain->add_option("--net-config", pre_args->net_file, "net config JSON");
    pretrain->add_option("--out", pre_args->out, "output model directory")->required();
    add_train_opts(pretrain, pre_args->train);
    pretrain->callback([pre_args] { cmd_pretrain(*pre_args); });

    // train
    auto train_args = std::make_shared<TrainArgs>();
    CLI::App* train_cmd = app.add_subcommand("train", "train a segmentation model");
    train_cmd->add_option("--model", train_args->model,
                          "psa, mixed, substyle:K or transfer:K");
    train_cmd->add_option("--dataset", train_args->dataset, "dataset directory")->required();
    train_cmd->add_option("--shape", train_args->shape_dir, "pretrained shape net directory");
    train_cmd->add_option("--overlap", train_args->overlap_dir,
                          "pretrained overlap net directory");
    train_cmd->add_option("--source", train_args->source_dir, "source model for transfer:K");
    train_cmd->add_option("--resume", train_args->resume_dir,
                          "resume from a checkpoint directory (ignores --model)");
    train_cmd->add_option("--maps", train_args->maps_dir,
                          "maps directory (only needed when resuming map-consuming kinds)");
    train_cmd->add_option("--net-config", train_args->net_file, "net config JSON");
    train_cmd->add_option("--out", train_args->out, "output model directory")->required();
    add_train_opts(train_cmd, train_args->train);
    train_cmd->callback([train_args] {
        if (train_args->model.empty() && train_args->resume_dir.empty())
            throw CLI::ValidationError("train", "needs --model or --resume");
        cmd_train(*train_args);
    });

    // adapt
    auto adapt_args = std::make_shared<AdaptArgs>();
    CLI::App* adapt_cmd = app.add_subcommand("adapt", "adapt a model to a new institution");
    adapt_cmd->add_option("--source", adapt_args->source_dir, "source model directory")
        ->required();
    adapt_cmd->add_option("--dataset", adapt_args->dataset, "new-institution dataset directory")
        ->required();
    adapt_cmd->add_option("--mode", adapt_args->mode, "decoder-only or decoder-plus-mixed")
        ->required();
    adapt_cmd->add_option("--out", adapt_args->out, "output model directory")->required();
    add_train_opts(adapt_cmd, adapt_args->train);
    adapt_cmd->callback([adapt_args] { cmd_adapt(*adapt_args); });

    // classify-train
    auto cls_args = std::make_shared<ClassifyArgs>();
    CLI::App* cls_cmd = app.add_subcommand("classify-train", "train the style classifier");
    cls_cmd->add_option("--dataset", cls_args->dataset, "dataset directory")->required();
    cls_cmd->add_option("--maps", cls_args->maps_dir, "precomputed maps directory")->required();
    cls_cmd->add_option("--net-config", cls_args->net_file, "net config JSON");
    cls_cmd->add_option("--out", cls_args->out, "output model directory")->required();
    add_train_opts(cls_cmd, cls_args->train);
    cls_cmd->callback([cls_args] { cmd_classify_train(*cls_args); });

    // eval
    auto eval_args = std::make_shared<EvalArgs>();
    CLI::App* eval_cmd = app.add_subcommand("eval", "score a model on a dataset split");
    eval_cmd->add_option("--model", eval_args->model_dir, "model directory")->required();
    eval_cmd->add_option("--dataset", eval_args->dataset, "dataset directory")->required();
    eval_cmd->add_option("--split", eval_args->split, "train, val or test (default test)");
    eval_cmd->add_flag("--style-matched", eval_args->style_matched,
                       "also score against every style's contour");
    eval_cmd->add_option("--out", eval_args->out, "output report directory")->required();
    eval_cmd->callback([eval_args] { cmd_eval(*eval_args); });

    // survival
    auto surv_args = std::make_shared<SurvivalArgs>();
    CLI::App* surv_cmd =
        app.add_subcommand("survival", "Kaplan-Meier curves and logrank test from records");
    surv_cmd->add_option("--records", surv_args->records, "CSV with columns time,event,group")
        ->required();
    surv_cmd->add_option("--out", surv_args->out, "output directory")->required();
    surv_cmd->callback([surv_args] { cmd_survival(*surv_args); });

    // experiment compare|adapt|classify
    auto exp_args = std::make_shared<ExperimentArgs>();
    CLI::App* exp_cmd = app.add_subcommand("experiment", "run a full experiment protocol");
    exp_cmd->require_subcommand(1);
    for (const auto& [name, desc] :
         {std::pair{"compare", "style decoders vs baselines"},
          std::pair{"adapt", "institution adaptation protocol"},
          std::pair{"classify", "style classifier accuracy"}}) {
        CLI::App* sub = exp_cmd->add_subcommand(name, desc);
        sub->add_option("--config", exp_args->config_file, "experiment config JSON")->required();
        sub->add_option("--out", exp_args->out, "output report directory")->required();
    }
    exp_cmd->get_subcommand("compare")->callback([exp_args, &rc] {
        const auto cfg = experiment_setup(*exp_args);
        const auto out = experiments::run_model_comparison(cfg);
        experiments::emit_report(out, exp_args->out);
        rc = finish_experiment(out.thresholds_met, "model comparison");
    });
    exp_cmd->get_subcommand("adapt")->callback([exp_args, &rc] {
        const auto cfg = experiment_setup(*exp_args);
        const auto out = experiments::run_adaptation_experiment(cfg);
        experiments::emit_report(out, exp_args->out);
        rc = finish_experiment(out.thresholds_met, "adaptation");
    });
    exp_cmd->get_subcommand("classify")->callback([exp_args, &rc] {
        const auto cfg = experiment_setup(*exp_args);
        const auto out = experiments::run_classifier_experiment(cfg);
        experiments::emit_report(out, exp_args->out);
        rc = finish_experiment(out.thresholds_met, "classifier");
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return rc;
}

}  // namespace psa::cli
