#include "psa/nets.hpp"

#include <cmath>
#include <stdexcept>

namespace psa::nets {
namespace {

int enc_out_channels(const NetConfig& cfg, int level) {
    return cfg.base_channels << (level - 1);
}

std::string idx(const std::string& stem, int i) { return stem + std::to_string(i); }

/// Registers a He-initialized conv weight plus zero bias.
void add_conv(ParamStore& store, SeededRng& rng, const std::string& name,
              const std::string& group, int out_ch, int in_ch, int k) {
    ParamArray& w = store.add(name + "_w", group, out_ch, in_ch, k * k);
    const double sd = std::sqrt(2.0 / (double(in_ch) * k * k));
    for (double& v : w.v) v = sd * rng.normal();
    store.add(name + "_b", group, out_ch, 1, 1);
}

void add_dense(ParamStore& store, SeededRng& rng, const std::string& name,
               const std::string& group, int out, int in) {
    ParamArray& w = store.add(name + "_w", group, out, in, 1);
    const double sd = std::sqrt(2.0 / double(in));
    for (double& v : w.v) v = sd * rng.normal();
    store.add(name + "_b", group, out, 1, 1);
}

void add_decoder_params(ParamStore& store, const NetConfig& cfg, SeededRng& rng, int style,
                        bool gated) {
    const std::string dgroup = decoder_group(style);
    const std::string stem = "dec" + std::to_string(style);
    for (int level = cfg.depth; level >= 1; --level) {
        const int out_ch = enc_out_channels(cfg, level);
        add_conv(store, rng, idx(stem + "_l", level), dgroup, out_ch, 3 * out_ch, cfg.kernel);
    }
    add_conv(store, rng, stem + "_head", dgroup, 1, cfg.base_channels, 1);
    if (gated) {
        const std::string agroup = attention_group(style);
        for (int level = 1; level <= cfg.depth; ++level) {
            ParamArray& g = store.add(idx("att" + std::to_string(style) + "_l", level), agroup,
                                      enc_out_channels(cfg, level), 1, 1);
            // logit 2 ~ gate 0.88: open but adjustable in either direction
            for (double& v : g.v) v = 2.0;
        }
    }
}

int conv_relu(Tape& tape, const ParamLeaves& leaves, const std::string& name, int x, int k) {
    return tape.relu(tape.conv2d(x, leaves.id(name + "_w"), leaves.id(name + "_b"), k));
}

/// Channel-preserving 3x3 box filter as a constant-weight convolution
/// (zero padding, so border pixels average padded zeros in).
int avg3x3(Tape& tape, int x) {
    const Tensor& xv = tape.value(x);
    Tensor w(xv.ch, xv.ch, 9);
    for (int c = 0; c < xv.ch; ++c)
        for (int j = 0; j < 9; ++j) w.at(c, c, j) = 1.0 / 9.0;
    const int wid = tape.leaf(std::move(w), false);
    const int bid = tape.leaf(Tensor(xv.ch, 1, 1), false);
    return tape.conv2d(x, wid, bid, 3);
}

struct PerceptualSpec {
    std::string stem;
    int in_ch;
    int out_ch;
};

PerceptualSpec perceptual_spec(PerceptualKind kind) {
    if (kind == PerceptualKind::shape) return {"shp_l", 1, 1};
    return {"ovl_l", 3, 2};
}

}  // namespace

void NetConfig::validate() const {
    if (depth < 2) throw std::invalid_argument("net config: depth must be >= 2");
    if (base_channels < 1) throw std::invalid_argument("net config: base_channels must be >= 1");
    if (kernel < 1 || kernel % 2 == 0)
        throw std::invalid_argument("net config: kernel must be odd and positive");
    if (num_styles < 1) throw std::invalid_argument("net config: num_styles must be >= 1");
    if (perceptual_layers < 2)
        throw std::invalid_argument("net config: perceptual_layers must be >= 2");
    if (perceptual_channels < 1)
        throw std::invalid_argument("net config: perceptual_channels must be >= 1");
    if (classifier_branch_channels < 1)
        throw std::invalid_argument("net config: classifier_branch_channels must be >= 1");
    if (classifier_blocks < 1)
        throw std::invalid_argument("net config: classifier_blocks must be >= 1");
}

std::string decoder_group(int style) { return "decoder_" + std::to_string(style); }
std::string attention_group(int style) { return "attention_" + std::to_string(style); }
std::string perceptual_group(PerceptualKind kind) {
    return kind == PerceptualKind::shape ? "shapenet" : "overlapnet";
}

namespace {

ParamStore init_encoder_params(const NetConfig& cfg, SeededRng& rng) {
    ParamStore store;
    for (int level = 1; level <= cfg.depth; ++level) {
        const int in_ch = level == 1 ? 3 : enc_out_channels(cfg, level - 1);
        add_conv(store, rng, idx("enc", level), "encoder", enc_out_channels(cfg, level), in_ch,
                 cfg.kernel);
    }
    add_conv(store, rng, "bott", "encoder", cfg.base_channels << cfg.depth,
             enc_out_channels(cfg, cfg.depth), cfg.kernel);
    return store;
}

}  // namespace

ParamStore init_segmentation_params(const NetConfig& cfg, SeededRng& rng) {
    cfg.validate();
    ParamStore store = init_encoder_params(cfg, rng);
    for (int style = 0; style <= cfg.num_styles; ++style)
        add_decoder_params(store, cfg, rng, style, style >= 1);
    return store;
}

ParamStore init_single_decoder_params(const NetConfig& cfg, SeededRng& rng) {
    cfg.validate();
    ParamStore store = init_encoder_params(cfg, rng);
    add_decoder_params(store, cfg, rng, 0, false);
    return store;
}

void add_perceptual_params(ParamStore& store, const NetConfig& cfg, PerceptualKind kind,
                           SeededRng& rng) {
    cfg.validate();
    const PerceptualSpec spec = perceptual_spec(kind);
    const std::string group = perceptual_group(kind);
    for (int layer = 1; layer <= cfg.perceptual_layers; ++layer) {
        const int in_ch = layer == 1 ? spec.in_ch : cfg.perceptual_channels;
        const int out_ch = layer == cfg.perceptual_layers ? spec.out_ch : cfg.perceptual_channels;
        add_conv(store, rng, idx(spec.stem, layer), group, out_ch, in_ch, cfg.kernel);
    }
}

ParamStore init_classifier_params(const NetConfig& cfg, SeededRng& rng) {
    cfg.validate();
    ParamStore store;
    const int b = cfg.classifier_branch_channels;
    int ch = 2;
    for (int block = 1; block <= cfg.classifier_blocks; ++block) {
        const std::string stem = idx("cls", block);
        add_conv(store, rng, stem + "_1x1", "classifier", b, ch, 1);
        add_conv(store, rng, stem + "_3x3", "classifier", b, ch, 3);
        add_conv(store, rng, stem + "_5x5", "classifier", b, ch, 5);
        add_conv(store, rng, stem + "_pool", "classifier", b, ch, 1);
        ch = 4 * b;
    }
    add_dense(store, rng, "cls_head", "classifier", cfg.num_styles, ch);
    return store;
}

int num_decoders(const ParamStore& store) {
    int n = 0;
    while (store.has_group(decoder_group(n))) ++n;
    return n;
}

int add_style_decoder(ParamStore& store, const NetConfig& cfg, SeededRng& rng, bool gated) {
    cfg.validate();
    const int style = num_decoders(store);
    if (style == 0) throw std::logic_error("add_style_decoder: store has no decoders");
    add_decoder_params(store, cfg, rng, style, gated);
    return style;
}

EncoderOutput encode_graph(Tape& tape, const ParamLeaves& leaves, int input3,
                           const NetConfig& cfg) {
    const Tensor& in = tape.value(input3);
    if (in.ch != 3) throw std::invalid_argument("encode: input must have 3 channels");
    const int div = 1 << cfg.depth;
    if (in.h % div || in.w % div)
        throw std::invalid_argument("encode: input dims must be divisible by 2^depth");

    EncoderOutput out;
    int x = input3;
    for (int level = 1; level <= cfg.depth; ++level) {
        x = conv_relu(tape, leaves, idx("enc", level), x, cfg.kernel);
        out.skips.push_back(x);
        x = tape.avgpool2(x);
    }
    out.bottleneck = conv_relu(tape, leaves, "bott", x, cfg.kernel);
    return out;
}

int decode_graph(Tape& tape, const ParamLeaves& leaves, const EncoderOutput& enc, int style,
                 const NetConfig& cfg) {
    const std::string stem = "dec" + std::to_string(style);
    if (style < 0 || !leaves.has(stem + "_head_w"))
        throw std::invalid_argument("decode: no decoder for style " + std::to_string(style));
    if (int(enc.skips.size()) != cfg.depth)
        throw std::invalid_argument("decode: encoder output depth mismatch");

    int x = enc.bottleneck;
    for (int level = cfg.depth; level >= 1; --level) {
        int skip = enc.skips[std::size_t(level - 1)];
        const std::string gate_name = idx("att" + std::to_string(style) + "_l", level);
        if (style >= 1 && leaves.has(gate_name))
            skip = tape.scale_channels(skip, tape.sigmoid(leaves.id(gate_name)));
        x = tape.concat(tape.upsample2(x), skip);
        x = conv_relu(tape, leaves, idx(stem + "_l", level), x, cfg.kernel);
    }
    return tape.sigmoid(
        tape.conv2d(x, leaves.id(stem + "_head_w"), leaves.id(stem + "_head_b"), 1));
}

std::vector<int> perceptual_graph(Tape& tape, const ParamLeaves& leaves, PerceptualKind kind,
                                  int input, const NetConfig& cfg) {
    const PerceptualSpec spec = perceptual_spec(kind);
    if (tape.value(input).ch != spec.in_ch)
        throw std::invalid_argument("perceptual net: wrong input channel count");
    std::vector<int> acts;
    int x = input;
    for (int layer = 1; layer <= cfg.perceptual_layers; ++layer) {
        const std::string name = idx(spec.stem, layer);
        x = tape.conv2d(x, leaves.id(name + "_w"), leaves.id(name + "_b"), cfg.kernel);
        x = layer == cfg.perceptual_layers ? tape.sigmoid(x) : tape.relu(x);
        acts.push_back(x);
    }
    return acts;
}

int classifier_logits_graph(Tape& tape, const ParamLeaves& leaves, int input,
                            const NetConfig& cfg) {
    if (tape.value(input).ch != 2)
        throw std::invalid_argument("classifier: input must have 2 channels");
    int x = input;
    for (int block = 1; block <= cfg.classifier_blocks; ++block) {
        const std::string stem = idx("cls", block);
        auto branch = [&](const std::string& name, int src, int k) {
            return tape.conv2d(src, leaves.id(stem + name + "_w"), leaves.id(stem + name + "_b"),
                               k);
        };
        const int b1 = branch("_1x1", x, 1);
        const int b3 = branch("_3x3", x, 3);
        const int b5 = branch("_5x5", x, 5);
        const int bp = branch("_pool", avg3x3(tape, x), 1);
        x = tape.avgpool2(tape.relu(tape.concat(tape.concat(b1, b3), tape.concat(b5, bp))));
    }
    return tape.dense(tape.global_avg_pool(x), leaves.id("cls_head_w"), leaves.id("cls_head_b"));
}

Tensor seg_input(const Grid& image, const BinaryMask& bladder, const BinaryMask& rectum) {
    if (!bladder.grid().same_shape(image) || !rectum.grid().same_shape(image))
        throw std::invalid_argument("seg_input: dimension mismatch");
    Tensor t(3, image.height(), image.width());
    for (int r = 0; r < image.height(); ++r)
        for (int c = 0; c < image.width(); ++c) {
            t.at(0, r, c) = double(image.at(r, c));
            t.at(1, r, c) = bladder.at(r, c) ? 1.0 : 0.0;
            t.at(2, r, c) = rectum.at(r, c) ? 1.0 : 0.0;
        }
    return t;
}

Tensor classifier_input(const Grid& image, const Grid& distance) {
    if (!distance.same_shape(image))
        throw std::invalid_argument("classifier_input: dimension mismatch");
    Tensor t(2, image.height(), image.width());
    for (int r = 0; r < image.height(); ++r)
        for (int c = 0; c < image.width(); ++c) {
            t.at(0, r, c) = double(image.at(r, c));
            // signed distances span tens of pixels; rescale near unit range
            t.at(1, r, c) = double(distance.at(r, c)) / 16.0;
        }
    return t;
}

Grid predict_ctv(const ParamStore& params, const NetConfig& cfg, const Grid& image,
                 const BinaryMask& bladder, const BinaryMask& rectum, int style) {
    Tape tape;
    ParamLeaves leaves(tape, params);
    const int input = tape.leaf(seg_input(image, bladder, rectum), false);
    const EncoderOutput enc = encode_graph(tape, leaves, input, cfg);
    return tape.value(decode_graph(tape, leaves, enc, style, cfg)).to_grid(0);
}

std::vector<Tensor> perceptual_forward(const ParamStore& params, const NetConfig& cfg,
                                       PerceptualKind kind, const Tensor& input) {
    Tape tape;
    ParamLeaves leaves(tape, params);
    std::vector<int> ids =
        perceptual_graph(tape, leaves, kind, tape.leaf(input, false), cfg);
    std::vector<Tensor> maps;
    maps.reserve(ids.size());
    for (int id : ids) maps.push_back(tape.value(id));
    return maps;
}

std::vector<double> classify(const ParamStore& params, const NetConfig& cfg, const Grid& image,
                             const Grid& distance) {
    Tape tape;
    ParamLeaves leaves(tape, params);
    const int logits =
        classifier_logits_graph(tape, leaves, tape.leaf(classifier_input(image, distance), false),
                                cfg);
    const Tensor& z = tape.value(logits);
    double m = z.v[0];
    for (double v : z.v) m = std::max(m, v);
    double sum = 0.0;
    std::vector<double> probs(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
        probs[i] = std::exp(z.v[i] - m);
        sum += probs[i];
    }
    for (double& p : probs) p /= sum;
    return probs;
}

}  // namespace psa::nets
