#pragma once

#include <filesystem>
#include <string>

#include "psa/training.hpp"

namespace psa::train {

struct Checkpoint {
    TrainedModel model;
    AdamState opt;
    int next_epoch = 0;
    bool has_opt = false;
};

/// Writes checkpoint_manifest.json plus one float64 blob per parameter array
/// (and per optimizer moment when `opt` is given) under `dir`. Reloading
/// reproduces every array bitwise.
void save_checkpoint(const std::filesystem::path& dir, const TrainedModel& model,
                     const AdamState* opt, int next_epoch);

/// Throws std::runtime_error on missing files, checksum mismatches, or a
/// manifest that disagrees with the blobs.
Checkpoint load_checkpoint(const std::filesystem::path& dir);

/// Final-model persistence: a checkpoint without optimizer state.
void save_model(const std::filesystem::path& dir, const TrainedModel& model);
TrainedModel load_model(const std::filesystem::path& dir);

}  // namespace psa::train
