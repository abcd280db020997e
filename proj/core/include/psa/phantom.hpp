#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "psa/dataset.hpp"
#include "psa/grid.hpp"
#include "psa/rng.hpp"

namespace psa::phantom {

/// One contouring style: a deterministic transform of the base target mask.
/// Ops apply in a fixed order: superior margin shift, lateral rescale,
/// morphological closing, and bladder-overlap carving last (so carve = 1
/// always yields zero bladder overlap).
struct StyleSpec {
    int style_id = 0;           // 1-based
    int margin_shift = 0;       // pixels added (+) or removed (-) at the superior extent
    double organ_carve = 0.0;   // fraction of the bladder-overlap pixels removed
    int smoothing_radius = 0;   // disk radius for morphological closing, 0 = none
    double lateral_scale = 1.0; // multiplier on the horizontal half-width

    bool same_transform(const StyleSpec& o) const;
    bool is_identity() const;
};

struct Range {
    double lo = 0.0;
    double hi = 0.0;
    double sample(SeededRng& rng) const { return lo + rng.uniform() * (hi - lo); }
};

/// Randomization ranges for organ/target geometry, in fractions of the grid
/// dimensions (wobble amplitudes in pixels).
struct AnatomyRanges {
    Range bladder_row{0.27, 0.33}, bladder_col{0.45, 0.55};
    Range bladder_row_axis{0.10, 0.13}, bladder_col_axis{0.13, 0.18};
    Range rectum_row{0.72, 0.78}, rectum_col{0.45, 0.55};
    Range rectum_row_axis{0.055, 0.085}, rectum_col_axis{0.08, 0.11};
    Range ctv_row{0.45, 0.50}, ctv_col{0.46, 0.54};
    Range ctv_half_height{0.12, 0.15}, ctv_half_width{0.14, 0.18};
    Range wobble_amplitude{0.5, 1.8};  // pixels
    Range wobble_frequency{0.6, 1.1};  // radians per pixel
};

struct SplitFractions {
    double train = 0.7;
    double val = 0.1;
    double test = 0.2;
};

struct PhantomConfig {
    int height = 64;
    int width = 64;
    int num_styles = 4;
    int num_samples = 200;
    std::uint64_t seed = 1;
    double noise_sigma = 0.05;
    double background_intensity = 0.2;
    double bladder_intensity = 0.8;
    double rectum_intensity = 0.6;
    AnatomyRanges ranges;
    std::vector<StyleSpec> styles;       // size num_styles, ids 1..N
    std::vector<double> style_probs;     // categorical assignment weights
    SplitFractions split;

    void validate() const;

    /// Four styles: superior margin +4; bladder carve 0.9; closing radius 2
    /// with margin -2; lateral widening 1.3. Uniform assignment.
    static PhantomConfig defaults();

    /// A second institution drawing systematically smaller targets:
    /// two styles with full/heavy carving, negative margins, and lateral
    /// shrinking, assigned 0.8/0.2.
    static PhantomConfig institution_b_defaults();
};

PhantomConfig load_phantom_config(const std::filesystem::path& file);
void save_phantom_config(const PhantomConfig& cfg, const std::filesystem::path& file);

struct Anatomy {
    Grid image;
    BinaryMask bladder;
    BinaryMask rectum;
    BinaryMask base_ctv;
};

/// Deterministic in (rng construction seed, index); the rng's draw position
/// is not consumed.
Anatomy generate_anatomy(const PhantomConfig& cfg, int index, const SeededRng& rng);

BinaryMask apply_style(const BinaryMask& base_ctv, const BinaryMask& bladder,
                       const BinaryMask& rectum, const StyleSpec& spec);

// Morphology on binary masks with a Euclidean disk structuring element.
// Erosion treats out-of-bounds as foreground so closing never eats borders.
BinaryMask dilate_disk(const BinaryMask& m, int radius);
BinaryMask erode_disk(const BinaryMask& m, int radius);
BinaryMask closing_disk(const BinaryMask& m, int radius);

Dataset build_dataset(const PhantomConfig& cfg);

}  // namespace psa::phantom
