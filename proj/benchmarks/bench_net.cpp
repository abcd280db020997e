#include <benchmark/benchmark.h>

#include <cmath>
#include <utility>
#include <vector>

#include "psa/losses.hpp"
#include "psa/maps.hpp"
#include "psa/nets.hpp"
#include "psa/params.hpp"
#include "psa/rng.hpp"
#include "psa/tape.hpp"

namespace {

using namespace psa;

struct Scene {
    Grid image;
    BinaryMask gt;
    BinaryMask bladder;
    BinaryMask rectum;
};

BinaryMask disk(int n, double fr, double fc, double frad) {
    Grid g(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
            g.at(r, c) = std::hypot(r - fr * n, c - fc * n) < frad * n ? 1.0f : 0.0f;
    return BinaryMask(std::move(g));
}

/// Noisy two-organ scene of the kind the phantoms produce; exact content is
/// irrelevant as long as all three structures are nonempty.
Scene make_scene(int n) {
    SeededRng rng(99);
    Scene s;
    s.gt = disk(n, 0.5, 0.5, 0.22);
    s.bladder = disk(n, 0.32, 0.45, 0.14);
    s.rectum = disk(n, 0.7, 0.55, 0.1);
    s.image = Grid(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            double v = 0.2;
            if (s.bladder.at(r, c)) v = 0.7;
            if (s.rectum.at(r, c)) v = 0.5;
            s.image.at(r, c) = float(v + 0.05 * rng.normal());
        }
    return s;
}

nets::NetConfig config(int base_channels) {
    nets::NetConfig cfg;
    cfg.depth = 3;
    cfg.base_channels = base_channels;
    cfg.num_styles = 4;
    cfg.perceptual_layers = 3;
    cfg.perceptual_channels = 4;
    return cfg;
}

void bm_predict_ctv(benchmark::State& state) {
    const int n = int(state.range(0));
    const auto cfg = config(int(state.range(1)));
    SeededRng rng(1);
    const nets::ParamStore params = nets::init_segmentation_params(cfg, rng);
    const Scene s = make_scene(n);
    for (auto _ : state)
        benchmark::DoNotOptimize(
            nets::predict_ctv(params, cfg, s.image, s.bladder, s.rectum, 1));
}
BENCHMARK(bm_predict_ctv)->Args({48, 4})->Args({64, 8})->Args({64, 16});

/// One full training step for the multi-decoder net: forward through every
/// decoder, routed dice + perceptual loss, backward to all trainable leaves.
/// Optimizer updates are O(params) and negligible next to this.
void bm_seg_train_step(benchmark::State& state) {
    const int n = int(state.range(0));
    const auto cfg = config(int(state.range(1)));
    SeededRng rng(1);
    nets::ParamStore params = nets::init_segmentation_params(cfg, rng);
    nets::add_perceptual_params(params, cfg, nets::PerceptualKind::shape, rng);
    nets::add_perceptual_params(params, cfg, nets::PerceptualKind::overlap, rng);
    params.freeze_group(nets::perceptual_group(nets::PerceptualKind::shape));
    params.freeze_group(nets::perceptual_group(nets::PerceptualKind::overlap));
    const Scene s = make_scene(n);
    const nets::Tensor input = nets::seg_input(s.image, s.bladder, s.rectum);
    const nets::LossWeights w;
    for (auto _ : state) {
        nets::Tape tape;
        nets::ParamLeaves leaves(tape, params);
        const int in = tape.leaf(input, false);
        const auto enc = nets::encode_graph(tape, leaves, in, cfg);
        std::vector<int> preds;
        for (int k = 0; k <= cfg.num_styles; ++k)
            preds.push_back(nets::decode_graph(tape, leaves, enc, k, cfg));
        const auto loss =
            nets::total_loss_graph(tape, leaves, cfg, w, preds, 1, s.gt, s.bladder, s.rectum);
        tape.backward(loss.node);
        benchmark::DoNotOptimize(loss.breakdown.total);
    }
}
BENCHMARK(bm_seg_train_step)->Args({48, 4})->Args({64, 8})->Unit(benchmark::kMillisecond);

void bm_classifier_train_step(benchmark::State& state) {
    const int n = int(state.range(0));
    const auto cfg = config(8);
    SeededRng rng(1);
    const nets::ParamStore params = nets::init_classifier_params(cfg, rng);
    const Scene s = make_scene(n);
    const nets::Tensor input =
        nets::classifier_input(s.image, maps::signed_distance_transform(s.gt));
    for (auto _ : state) {
        nets::Tape tape;
        nets::ParamLeaves leaves(tape, params);
        const int in = tape.leaf(input, false);
        const int logits = nets::classifier_logits_graph(tape, leaves, in, cfg);
        const int loss = tape.softmax_cross_entropy(logits, 2);
        tape.backward(loss);
        benchmark::DoNotOptimize(tape.scalar(loss));
    }
}
BENCHMARK(bm_classifier_train_step)->Arg(48)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace
