#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "psa/nets.hpp"
#include "psa/phantom.hpp"
#include "psa/report.hpp"
#include "psa/training.hpp"

namespace psa::experiments {

/// Gates that decide an experiment's pass/fail verdict (and the CLI exit
/// code). Gains are differences of mean test DSC.
struct Thresholds {
    double comparison_gain = 0.02;  // style decoder vs mixed baseline, per style
    int comparison_styles = 3;      // styles that must clear comparison_gain
    double adaptation_gain = 0.03;  // adapted model vs direct source application
    double classifier_accuracy = 0.90;
};

struct ExperimentConfig {
    phantom::PhantomConfig phantom = phantom::PhantomConfig::defaults();
    phantom::PhantomConfig phantom_b = phantom::PhantomConfig::institution_b_defaults();
    nets::NetConfig net;
    train::TrainConfig pretrain;    // frozen perceptual nets
    train::TrainConfig train;       // segmentation models, incl. the scratch model
    train::TrainConfig adapt;       // frozen-encoder adaptation
    train::TrainConfig classifier;
    std::vector<std::uint64_t> seeds = {7};
    Thresholds thresholds;
    /// Per-step loss CSVs land here as <model>_seed<seed>.csv; empty disables
    /// them. Checkpointing fields of the nested train configs are ignored:
    /// experiment runs are self-contained.
    std::string log_dir;

    void validate() const;
};

ExperimentConfig load_experiment_config(const std::filesystem::path& file);
void save_experiment_config(const ExperimentConfig& cfg, const std::filesystem::path& file);

/// Each training inside an experiment reseeds from (experiment seed, role) so
/// repeated roles stay decorrelated but reproducible.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t role);

/// Like metrics::evaluate_pair but tolerant of degenerate masks: scores that
/// would throw on an empty (or full) mask come back NaN, so an untrained
/// model yields a row instead of aborting an evaluation sweep.
metrics::SegScores guarded_scores(const BinaryMask& pred, const BinaryMask& ref);

/// --- model comparison ------------------------------------------------------
/// Per seed: trains the mixed baseline once, a per-style baseline and a
/// transfer baseline (mixed weights fine-tuned on one style) per style, and
/// the multi-decoder model once. Every model is evaluated on the test split
/// against each style's contour, so differences measure style fidelity rather
/// than sample difficulty. Table rows: (mixed, assigned) plus (substyle, k),
/// (transfer, k), (psa, k) for every style k; the psa rows carry the paired
/// two-tailed t-test against the mixed baseline's DSC on the same samples.

struct ComparisonSeedRun {
    std::uint64_t seed = 0;
    report::MetricReport per_sample;
    report::Table table;
    std::vector<double> style_gain;  // mean DSC, style decoder minus mixed; [k-1]
};

struct ComparisonOutcome {
    std::vector<ComparisonSeedRun> runs;
    bool thresholds_met = false;  // every seed clears the per-style gain gate
};

ComparisonOutcome run_model_comparison(const ExperimentConfig& cfg);

/// --- institution adaptation ------------------------------------------------
/// Source model: mixed baseline on the first institution. Rows, all evaluated
/// on the second institution's test split against assigned contours:
///   source_direct      the source model applied unchanged
///   scratch            trained from scratch on the second institution
///   decoder_init       frozen encoder + untrained fresh decoder (sanity row)
///   decoder_only       frozen encoder + retrained decoder
///   decoder_plus_mixed frozen encoder + two added decoders, the gated one
///                      serving its dominant style
/// Uses seeds.front(); the gate compares decoder_plus_mixed to source_direct.

struct AdaptationOutcome {
    report::MetricReport per_sample;
    report::Table table;
    double direct_dsc = 0.0;
    double adapted_dsc = 0.0;
    bool thresholds_met = false;
};

AdaptationOutcome run_adaptation_experiment(const ExperimentConfig& cfg);

/// --- style classification ----------------------------------------------
/// Trains the style classifier with seeds.front() and scores the test split.

struct ClassifierOutcome {
    double accuracy = 0.0;
    std::vector<double> recall;              // per style; NaN when unrepresented
    std::vector<std::vector<int>> confusion;  // [true style - 1][predicted - 1]
    int test_count = 0;
    bool thresholds_met = false;
};

ClassifierOutcome run_classifier_experiment(const ExperimentConfig& cfg);

/// --- report emission -------------------------------------------------------
/// Writes CSV tables, per-sample logs, box-plot summaries and a human-readable
/// summary into `dir`. Re-parsing any CSV reproduces the reported values.

void emit_report(const ComparisonOutcome& out, const std::filesystem::path& dir);
void emit_report(const AdaptationOutcome& out, const std::filesystem::path& dir);
void emit_report(const ClassifierOutcome& out, const std::filesystem::path& dir);

}  // namespace psa::experiments
