#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "psa/dataset.hpp"
#include "psa/losses.hpp"
#include "psa/maps.hpp"
#include "psa/nets.hpp"
#include "psa/params.hpp"

namespace psa::train {

struct TrainConfig {
    int epochs = 10;
    int batch_size = 1;
    double learning_rate = 1e-3;
    std::uint64_t seed = 7;
    nets::LossWeights loss;
    int checkpoint_every = 0;     // epochs between snapshots; 0 disables
    std::string checkpoint_dir;   // snapshots land in <dir>/epoch_NNNN; required
                                  // when checkpoint_every > 0
    std::string loss_log;         // per-step CSV appended here when nonempty

    void validate() const;  // throws std::invalid_argument
};

/// Adaptive-moment optimizer state: first/second moments per parameter
/// array plus one timestep per group, so routed groups bias-correct by their
/// own update count.
struct AdamState {
    std::map<std::string, std::vector<double>> m;
    std::map<std::string, std::vector<double>> v;
    std::map<std::string, std::int64_t> t;
};

struct TrainedModel {
    nets::ParamStore params;
    nets::NetConfig net;
    std::string kind;  // psa | mixed | substyle:K | transfer:K | pretrain:shape |
                       // pretrain:overlap | classifier | adapt:decoder_only |
                       // adapt:decoder_plus_mixed
    TrainConfig train;
    std::uint32_t dataset_hash = 0;
    double initial_loss = 0.0;  // mean step loss over the first epoch
    double final_loss = 0.0;    // mean step loss over the last epoch
    /// Steps each group was routed into; the audit trail for gated training.
    std::map<std::string, std::int64_t> update_counts;

    // Adaptation bookkeeping (-1 where not applicable).
    int adapt_mixed_decoder = -1;   // ungated decoder trained on all new data
    int adapt_style_decoder = -1;   // gated decoder for the dominant new style
    int adapt_target_style = -1;    // style routed to the gated decoder
};

/// Trains the edge net ("shape") on edge maps or the overlap net on per-organ
/// overlap maps, from the precomputed targets. Returned groups are unfrozen.
TrainedModel pretrain_perceptual(const Dataset& ds, const maps::MapsStore& maps,
                                 nets::PerceptualKind kind, const nets::NetConfig& net,
                                 const TrainConfig& cfg);

/// Full routed training: every step forwards all decoders, the loss couples
/// the mixed decoder plus the sample's style decoder, and only the routed
/// groups step. The pretrained nets are folded into the returned parameter
/// store and stay frozen (bit-identical) throughout.
TrainedModel train_psa(const Dataset& ds, const TrainedModel& shape_model,
                       const TrainedModel& overlap_model, const nets::NetConfig& net,
                       const TrainConfig& cfg);

enum class BaselineKind { mixed, substyle, transfer };

/// mixed: one ungated decoder on all data. substyle: same architecture on
/// style-k samples only. transfer: start from `source` (a mixed model) and
/// fine-tune on style-k samples.
TrainedModel train_baseline(const Dataset& ds, BaselineKind kind, int style,
                            const nets::NetConfig& net, const TrainConfig& cfg,
                            const TrainedModel* source = nullptr);

enum class AdaptMode { decoder_only, decoder_plus_mixed };

/// Freezes the source encoder and appends fresh decoders trained on the new
/// dataset: one ungated decoder over everything (decoder_only), or that plus
/// a gated decoder routed to the new dataset's most common style
/// (decoder_plus_mixed). Source decoders are left untouched.
TrainedModel adapt_new_style(const TrainedModel& source, const Dataset& new_ds, AdaptMode mode,
                             const TrainConfig& cfg);

/// Cross-entropy over (image, distance map) -> assigned style.
TrainedModel train_classifier(const Dataset& ds, const maps::MapsStore& maps,
                              const nets::NetConfig& net, const TrainConfig& cfg);

/// Continues an interrupted run from its checkpoint directory up to the
/// stored config's epoch target. `maps` is required for the pretraining and
/// classifier kinds. The dataset must hash-match the checkpoint provenance.
TrainedModel resume_training(const std::string& checkpoint_dir, const Dataset& ds,
                             const maps::MapsStore* maps = nullptr);

/// JSON files for the two config structs; missing fields keep their
/// defaults, unknown values fail validation.
nets::NetConfig load_net_config(const std::filesystem::path& file);
void save_net_config(const nets::NetConfig& cfg, const std::filesystem::path& file);
TrainConfig load_train_config(const std::filesystem::path& file);
void save_train_config(const TrainConfig& cfg, const std::filesystem::path& file);

}  // namespace psa::train
