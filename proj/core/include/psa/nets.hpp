#pragma once

#include <string>
#include <vector>

#include "psa/grid.hpp"
#include "psa/params.hpp"
#include "psa/rng.hpp"
#include "psa/tape.hpp"
#include "psa/tensor.hpp"

namespace psa::nets {

/// Architecture knobs shared by the segmentation net, the frozen perceptual
/// nets and the style classifier.
struct NetConfig {
    int depth = 3;            // encoder levels; spatial dims shrink by 2^depth
    int base_channels = 16;   // channels of the first encoder level
    int kernel = 3;           // conv kernel (odd)
    int num_styles = 4;       // style decoders 1..N next to the mixed decoder 0
    int perceptual_layers = 4;      // stages in the shape/overlap nets
    int perceptual_channels = 8;    // width of their hidden stages
    int classifier_branch_channels = 4;  // per-branch width inside inception blocks
    int classifier_blocks = 3;

    void validate() const;  // throws std::invalid_argument
    static NetConfig defaults() { return {}; }
};

/// Node ids of one encoder pass: per-level skip features (index l-1 = level
/// l, full resolution at level 1) plus the bottleneck.
struct EncoderOutput {
    int bottleneck = -1;
    std::vector<int> skips;
};

enum class PerceptualKind { shape, overlap };

/// Canonical group labels.
std::string decoder_group(int style);
std::string attention_group(int style);
std::string perceptual_group(PerceptualKind kind);

/// --- parameter construction -------------------------------------------
/// All arrays are He-initialized (normal with sd sqrt(2/fan_in)) in a fixed
/// registration order, biases zero, attention gate logits constant 2.0.

/// Encoder + decoders 0..num_styles + attention gates 1..num_styles.
ParamStore init_segmentation_params(const NetConfig& cfg, SeededRng& rng);
/// Encoder + the ungated decoder 0 only (the single-decoder baselines).
ParamStore init_single_decoder_params(const NetConfig& cfg, SeededRng& rng);
/// Adds the "shapenet" (1 in / 1 out) or "overlapnet" (3 in / 2 out) stack.
void add_perceptual_params(ParamStore& store, const NetConfig& cfg, PerceptualKind kind,
                           SeededRng& rng);
ParamStore init_classifier_params(const NetConfig& cfg, SeededRng& rng);
/// Appends one more decoder (with gates when `gated`); returns its style
/// index, one past the highest existing decoder.
int add_style_decoder(ParamStore& store, const NetConfig& cfg, SeededRng& rng, bool gated);
/// Number of decoder groups present (mixed decoder included).
int num_decoders(const ParamStore& store);

/// --- graph builders (shared by training and inference) ------------------

/// input3: (3,h,w) tensor leaf of image, bladder, rectum. Dims must be
/// divisible by 2^depth.
EncoderOutput encode_graph(Tape& tape, const ParamLeaves& leaves, int input3,
                           const NetConfig& cfg);
/// Soft CTV probability map (1,h,w) for one decoder. Style 0 consumes raw
/// skips; styles with attention params consume sigmoid-gated skips.
int decode_graph(Tape& tape, const ParamLeaves& leaves, const EncoderOutput& enc, int style,
                 const NetConfig& cfg);
/// All L stage activations; the last entry is the sigmoid prediction map.
std::vector<int> perceptual_graph(Tape& tape, const ParamLeaves& leaves, PerceptualKind kind,
                                  int input, const NetConfig& cfg);
/// Logits vector (num_styles,1,1) from a (2,h,w) input.
int classifier_logits_graph(Tape& tape, const ParamLeaves& leaves, int input,
                            const NetConfig& cfg);

/// --- inference wrappers --------------------------------------------------

/// Stacks (image, bladder, rectum) into the 3-channel segmentation input.
Tensor seg_input(const Grid& image, const BinaryMask& bladder, const BinaryMask& rectum);
/// Stacks (image, distance/16) into the 2-channel classifier input.
Tensor classifier_input(const Grid& image, const Grid& distance);

Grid predict_ctv(const ParamStore& params, const NetConfig& cfg, const Grid& image,
                 const BinaryMask& bladder, const BinaryMask& rectum, int style);
std::vector<Tensor> perceptual_forward(const ParamStore& params, const NetConfig& cfg,
                                       PerceptualKind kind, const Tensor& input);
/// Softmax style probabilities; sums to 1.
std::vector<double> classify(const ParamStore& params, const NetConfig& cfg, const Grid& image,
                             const Grid& distance);

}  // namespace psa::nets
