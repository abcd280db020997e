#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "psa/dataset.hpp"
#include "psa/grid.hpp"

namespace psa::maps {

using EdgeMap = BinaryMask;
using OverlapMap = BinaryMask;
using DistanceMap = Grid;

/// Semantic edge map: pixel is 1 iff some 8-neighbor carries the other
/// label. Out-of-bounds neighbors take the center pixel's label, so uniform
/// regions touching the border stay edge-free.
EdgeMap edge_map(const BinaryMask& m);

/// Pixelwise product of the CTV mask with an organ mask.
OverlapMap overlap_map(const BinaryMask& ctv, const BinaryMask& organ);

/// Exact Euclidean distance from every pixel to the nearest foreground
/// pixel (0 on foreground). Two-pass parabolic envelope transform.
Grid distance_to_foreground(const BinaryMask& m);

/// Same transform at full precision: exact integer squared distances,
/// row-major. Callers needing sub-float accuracy take the square root
/// themselves.
std::vector<double> squared_distance_to_foreground(const BinaryMask& m);

/// Signed exact Euclidean distance to the nearest opposite-label pixel:
/// negative inside the mask, positive outside. Requires both labels present.
DistanceMap signed_distance_transform(const BinaryMask& m);

/// Process-wide call counters, used to audit that training loops consume
/// precomputed targets instead of recomputing them.
struct CallCounters {
    std::uint64_t edge_map = 0;
    std::uint64_t overlap_map = 0;
    std::uint64_t signed_distance_transform = 0;
};
CallCounters call_counters();

/// Precomputed per-sample training targets, all derived from the
/// assigned-style ground-truth CTV.
struct SampleMaps {
    EdgeMap edge;
    OverlapMap overlap_bladder;
    OverlapMap overlap_rectum;
    DistanceMap distance;
};

struct MapsStore {
    std::vector<SampleMaps> per_sample;  // indexed like Dataset::samples
};

MapsStore precompute(const Dataset& d);

/// Blob files alongside the dataset plus maps_manifest.json with CRCs.
void save_maps(const MapsStore& store, const std::filesystem::path& dir);
MapsStore load_maps(const std::filesystem::path& dir, const Dataset& d);

}  // namespace psa::maps
