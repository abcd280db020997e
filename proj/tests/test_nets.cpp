#include <doctest.h>

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "psa/nets.hpp"
#include "psa/params.hpp"
#include "psa/rng.hpp"
#include "psa/tape.hpp"
#include "psa/tensor.hpp"
#include "test_util.hpp"

using psa::BinaryMask;
using psa::Grid;
using psa::SeededRng;
using psa::nets::NetConfig;
using psa::nets::ParamLeaves;
using psa::nets::ParamStore;
using psa::nets::PerceptualKind;
using psa::nets::Tape;
using psa::nets::Tensor;
using psa::testutil::check_gradients;
using psa::testutil::check_param_gradients;
using psa::testutil::random_tensor;

namespace {

// Small enough for finite differences, deep enough to exercise every op.
NetConfig micro_config() {
    NetConfig cfg;
    cfg.depth = 2;
    cfg.base_channels = 2;
    cfg.kernel = 1;
    cfg.num_styles = 2;
    cfg.perceptual_layers = 2;
    cfg.perceptual_channels = 2;
    cfg.classifier_branch_channels = 2;
    cfg.classifier_blocks = 1;
    return cfg;
}

}  // namespace

TEST_CASE("finite differences validate conv2d gradients for data, weights and bias") {
    SeededRng rng(101);
    const int in_ch = 2, out_ch = 3, k = 3;
    std::vector<Tensor> inputs = {
        random_tensor(rng, in_ch, 5, 4),
        random_tensor(rng, out_ch, in_ch, k * k, -0.5, 0.5),
        random_tensor(rng, out_ch, 1, 1, -0.2, 0.2),
    };
    check_gradients(inputs, [&](Tape& t, const std::vector<int>& id) {
        const int y = t.conv2d(id[0], id[1], id[2], k);
        const int s = t.sigmoid(y);
        Tensor target(out_ch, 5, 4);
        for (std::size_t i = 0; i < target.size(); ++i) target.v[i] = (i % 3 == 0) ? 1.0 : 0.0;
        return t.soft_dice_loss(s, t.leaf(target, false), 1.0);
    });
}

TEST_CASE("finite differences validate 1x1 and 5x5 convolutions") {
    SeededRng rng(102);
    for (int k : {1, 5}) {
        std::vector<Tensor> inputs = {
            random_tensor(rng, 1, 6, 6),
            random_tensor(rng, 2, 1, k * k, -0.5, 0.5),
            random_tensor(rng, 2, 1, 1),
        };
        check_gradients(inputs, [&](Tape& t, const std::vector<int>& id) {
            const int y = t.conv2d(id[0], id[1], id[2], k);
            const int g = t.global_avg_pool(t.relu(y));
            return t.weighted_sum({t.l2_diff_norm(g, t.leaf(Tensor(2, 1, 1), false))}, {1.0});
        });
    }
}

TEST_CASE("finite differences validate pooling, upsampling, concat and channel scaling") {
    SeededRng rng(103);
    std::vector<Tensor> inputs = {
        random_tensor(rng, 2, 4, 4),
        random_tensor(rng, 1, 2, 2),
        random_tensor(rng, 3, 1, 1),  // gates
    };
    check_gradients(inputs, [&](Tape& t, const std::vector<int>& id) {
        const int pooled = t.avgpool2(id[0]);            // (2,2,2)
        const int up = t.upsample2(id[1]);               // (1,4,4)
        const int both = t.concat(t.upsample2(pooled), up);  // (3,4,4)
        const int gated = t.scale_channels(both, t.sigmoid(id[2]));
        Tensor target(3, 4, 4);
        for (std::size_t i = 0; i < target.size(); ++i) target.v[i] = double((i * 7) % 5) / 4.0;
        return t.soft_dice_loss(t.sigmoid(gated), t.leaf(target, false), 1.0);
    });
}

TEST_CASE("finite differences validate dense, softmax cross-entropy and weighted sums") {
    SeededRng rng(104);
    std::vector<Tensor> inputs = {
        random_tensor(rng, 4, 1, 1),
        random_tensor(rng, 3, 4, 1, -0.7, 0.7),
        random_tensor(rng, 3, 1, 1),
    };
    check_gradients(inputs, [&](Tape& t, const std::vector<int>& id) {
        const int logits = t.dense(id[0], id[1], id[2]);
        const int xa = t.softmax_cross_entropy(logits, 1);
        const int xb = t.softmax_cross_entropy(logits, 2);
        return t.weighted_sum({xa, xb}, {0.75, 0.25});
    });
}

TEST_CASE("finite differences validate the dice loss with gradients flowing to both arguments") {
    SeededRng rng(105);
    std::vector<Tensor> inputs = {
        random_tensor(rng, 1, 3, 3, 0.05, 0.95),
        random_tensor(rng, 1, 3, 3, 0.05, 0.95),
    };
    check_gradients(inputs, [&](Tape& t, const std::vector<int>& id) {
        return t.soft_dice_loss(id[0], id[1], 0.5);
    });
}

TEST_CASE("finite differences validate the normalized l2 difference") {
    SeededRng rng(106);
    std::vector<Tensor> inputs = {
        random_tensor(rng, 2, 3, 2),
        random_tensor(rng, 2, 3, 2),
    };
    check_gradients(inputs, [&](Tape& t, const std::vector<int>& id) {
        return t.l2_diff_norm(id[0], id[1]);
    });
}

TEST_CASE("l2 difference of identical tensors has zero value and zero subgradient") {
    SeededRng rng(107);
    const Tensor a = random_tensor(rng, 1, 4, 4);
    Tape tape;
    const int x = tape.leaf(a, true);
    const int y = tape.leaf(a, true);
    const int d = tape.l2_diff_norm(x, y);
    CHECK(tape.scalar(d) == 0.0);
    tape.backward(d);
    for (double g : tape.grad(x)) CHECK(g == 0.0);
    for (double g : tape.grad(y)) CHECK(g == 0.0);
}

TEST_CASE("soft dice on a hand example: four-pixel target, half confidence") {
    // p = 0.5 on the 4 target pixels and 0 elsewhere:
    // 1 - (2*2 + 1) / (2 + 4 + 1) = 1 - 5/7 = 2/7.
    Tensor p(1, 4, 4), g(1, 4, 4);
    for (int i = 0; i < 4; ++i) {
        p.v[std::size_t(i)] = 0.5;
        g.v[std::size_t(i)] = 1.0;
    }
    Tape tape;
    const int loss = tape.soft_dice_loss(tape.leaf(p, false), tape.leaf(g, false), 1.0);
    CHECK(tape.scalar(loss) == doctest::Approx(2.0 / 7.0).epsilon(1e-12));
}

TEST_CASE("soft dice of a tensor with itself falls to zero as the overlap saturates") {
    Tensor p(1, 8, 8);
    for (std::size_t i = 0; i < p.size(); ++i) p.v[i] = 1.0;
    Tape tape;
    const int id = tape.leaf(p, false);
    const int loss = tape.soft_dice_loss(id, id, 1.0);
    // 1 - (2*64+1)/(128+1) = 0
    CHECK(tape.scalar(loss) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("softmax cross-entropy matches a direct log-softmax computation") {
    Tensor z(5, 1, 1);
    z.v = {1.5, -0.25, 3.0, 0.0, -2.0};
    Tape tape;
    const int logits = tape.leaf(z, false);
    double lse = 0.0;
    for (double v : z.v) lse += std::exp(v);
    for (int label = 0; label < 5; ++label) {
        Tape t2;
        const int loss = t2.softmax_cross_entropy(t2.leaf(z, false), label);
        CHECK(t2.scalar(loss) ==
              doctest::Approx(std::log(lse) - z.v[std::size_t(label)]).epsilon(1e-12));
    }
    CHECK_THROWS_AS(tape.softmax_cross_entropy(logits, 5), std::invalid_argument);
}

TEST_CASE("tape rejects shape mismatches and double backward") {
    Tape tape;
    const int a = tape.leaf(Tensor(2, 4, 4), true);
    const int w = tape.leaf(Tensor(3, 2, 9), true);
    const int b = tape.leaf(Tensor(3, 1, 1), true);
    CHECK_THROWS_AS(tape.conv2d(a, w, b, 4), std::invalid_argument);  // even kernel
    CHECK_THROWS_AS(tape.conv2d(w, w, b, 3), std::invalid_argument);  // in_ch mismatch
    const int y = tape.conv2d(a, w, b, 3);
    CHECK(tape.value(y).ch == 3);
    const int odd = tape.leaf(Tensor(1, 3, 4), false);
    CHECK_THROWS_AS(tape.avgpool2(odd), std::invalid_argument);
    CHECK_THROWS_AS(tape.concat(a, odd), std::invalid_argument);
    CHECK_THROWS_AS(tape.weighted_sum({}, {}), std::invalid_argument);
    CHECK_THROWS_AS(tape.weighted_sum({a}, {1.0}), std::invalid_argument);  // non-scalar

    const int s = tape.global_avg_pool(y);
    const int loss = tape.l2_diff_norm(s, tape.leaf(Tensor(3, 1, 1), false));
    tape.backward(loss);
    CHECK_THROWS_AS(tape.backward(loss), std::logic_error);
}

TEST_CASE("gradients do not flow into leaves that opted out") {
    SeededRng rng(108);
    Tape tape;
    const int p = tape.leaf(random_tensor(rng, 1, 4, 4, 0.1, 0.9), true);
    const int g = tape.leaf(random_tensor(rng, 1, 4, 4, 0.0, 1.0), false);
    const int loss = tape.soft_dice_loss(p, g, 1.0);
    tape.backward(loss);
    CHECK(!tape.grad(p).empty());
    CHECK(tape.grad(g).empty());
}

TEST_CASE("parameter stores register, group, freeze and hash arrays") {
    ParamStore store;
    auto& w1 = store.add("enc1_w", "encoder", 4, 3, 9);
    store.add("enc1_b", "encoder", 4, 1, 1);
    store.add("dec0_w", "decoder_0", 2, 8, 9);
    CHECK_THROWS_AS(store.add("enc1_w", "encoder", 1, 1, 1), std::invalid_argument);
    CHECK_THROWS_AS(store.add("bad", "encoder", 0, 1, 1), std::invalid_argument);

    CHECK(store.groups() == std::vector<std::string>{"decoder_0", "encoder"});
    CHECK(store.group_members("encoder") == std::vector<std::string>{"enc1_w", "enc1_b"});
    CHECK(store.total_values() == 4 * 3 * 9 + 4 + 2 * 8 * 9);

    const auto h0 = store.content_hash();
    const auto he = store.group_hash("encoder");
    w1.v[5] = 0.125;
    CHECK(store.content_hash() != h0);
    CHECK(store.group_hash("encoder") != he);
    CHECK_THROWS_AS(store.group_hash("nope"), std::invalid_argument);

    CHECK(!store.frozen("encoder"));
    store.freeze_group("encoder");
    CHECK(store.frozen("encoder"));
    CHECK_THROWS_AS(store.freeze_group("nope"), std::invalid_argument);
    store.unfreeze_group("encoder");
    CHECK(!store.frozen("encoder"));
}

TEST_CASE("param leaves mirror freeze state onto the tape") {
    ParamStore store;
    auto& a = store.add("a", "encoder", 2, 1, 1);
    auto& b = store.add("b", "decoder_0", 2, 1, 1);
    a.v = {0.3, -0.2};
    b.v = {0.1, 0.4};
    store.freeze_group("decoder_0");

    Tape tape;
    ParamLeaves leaves(tape, store);
    CHECK(tape.requires_grad(leaves.id("a")));
    CHECK(!tape.requires_grad(leaves.id("b")));
    CHECK(tape.value(leaves.id("b")).v == b.v);

    const int diff = tape.l2_diff_norm(leaves.id("a"), leaves.id("b"));
    tape.backward(diff);
    CHECK(!leaves.grad("a").empty());
    CHECK(leaves.grad("b").empty());
    CHECK_THROWS_AS(leaves.id("zzz"), std::out_of_range);
}

TEST_CASE("finite differences validate channel slicing") {
    SeededRng rng(109);
    std::vector<Tensor> inputs = {random_tensor(rng, 3, 3, 3)};
    check_gradients(inputs, [&](Tape& t, const std::vector<int>& id) {
        const int a = t.slice_channel(id[0], 0);
        const int b = t.slice_channel(id[0], 2);
        return t.soft_dice_loss(t.sigmoid(a), t.sigmoid(b), 1.0);
    });
    Tape tape;
    const int x = tape.leaf(Tensor(2, 2, 2), false);
    CHECK_THROWS_AS(tape.slice_channel(x, 2), std::invalid_argument);
}

TEST_CASE("segmentation parameters cover encoder, decoders and gates with documented shapes") {
    NetConfig cfg = micro_config();
    cfg.kernel = 3;
    SeededRng rng(5);
    ParamStore store = psa::nets::init_segmentation_params(cfg, rng);

    CHECK(psa::nets::num_decoders(store) == 3);
    CHECK(store.has_group("encoder"));
    CHECK(store.has_group("decoder_0"));
    CHECK(store.has_group("attention_2"));
    CHECK(!store.has_group("attention_0"));

    const auto& enc1 = store.at("enc1_w");
    CHECK(enc1.ch == 2);
    CHECK(enc1.h == 3);
    CHECK(enc1.w == 9);
    const auto& bott = store.at("bott_w");
    CHECK(bott.ch == 8);   // base * 2^depth
    CHECK(bott.h == 4);
    const auto& gate = store.at("att1_l2");
    CHECK(gate.ch == 4);
    for (double v : gate.v) CHECK(v == 2.0);
    const auto& head = store.at("dec2_head_w");
    CHECK(head.ch == 1);
    CHECK(head.h == 2);

    SeededRng rng2(5);
    ParamStore again = psa::nets::init_segmentation_params(cfg, rng2);
    CHECK(again.content_hash() == store.content_hash());
    SeededRng rng3(6);
    CHECK(psa::nets::init_segmentation_params(cfg, rng3).content_hash() != store.content_hash());
}

TEST_CASE("encoder halves spatial dims per level down to the bottleneck") {
    NetConfig cfg;
    cfg.depth = 3;
    cfg.base_channels = 2;
    cfg.num_styles = 1;
    SeededRng rng(11);
    ParamStore store = psa::nets::init_segmentation_params(cfg, rng);

    Tape tape;
    ParamLeaves leaves(tape, store);
    SeededRng drng(12);
    const int input = tape.leaf(random_tensor(drng, 3, 32, 32, 0.0, 1.0), false);
    const auto enc = psa::nets::encode_graph(tape, leaves, input, cfg);

    REQUIRE(enc.skips.size() == 3);
    CHECK(tape.value(enc.skips[0]).h == 32);
    CHECK(tape.value(enc.skips[1]).h == 16);
    CHECK(tape.value(enc.skips[2]).h == 8);
    CHECK(tape.value(enc.skips[2]).ch == 8);
    CHECK(tape.value(enc.bottleneck).h == 4);
    CHECK(tape.value(enc.bottleneck).w == 4);
    CHECK(tape.value(enc.bottleneck).ch == 16);

    const int dec = psa::nets::decode_graph(tape, leaves, enc, 0, cfg);
    CHECK(tape.value(dec).ch == 1);
    CHECK(tape.value(dec).h == 32);
    CHECK(tape.value(dec).w == 32);
}

TEST_CASE("encode rejects wrong channel counts and indivisible dimensions") {
    NetConfig cfg = micro_config();
    SeededRng rng(13);
    ParamStore store = psa::nets::init_segmentation_params(cfg, rng);
    Tape tape;
    ParamLeaves leaves(tape, store);
    const int two_ch = tape.leaf(Tensor(2, 8, 8), false);
    CHECK_THROWS_AS(psa::nets::encode_graph(tape, leaves, two_ch, cfg), std::invalid_argument);
    const int odd = tape.leaf(Tensor(3, 10, 10), false);  // 10 % 4 != 0
    CHECK_THROWS_AS(psa::nets::encode_graph(tape, leaves, odd, cfg), std::invalid_argument);
}

TEST_CASE("zero parameters propagate to bias-only activations") {
    NetConfig cfg = micro_config();
    SeededRng rng(14);
    ParamStore store = psa::nets::init_segmentation_params(cfg, rng);
    for (auto& a : store.arrays())
        for (double& v : a.v) v = 0.0;

    Tape tape;
    ParamLeaves leaves(tape, store);
    SeededRng drng(15);
    const int input = tape.leaf(random_tensor(drng, 3, 8, 8, 0.0, 1.0), false);
    const auto enc = psa::nets::encode_graph(tape, leaves, input, cfg);
    for (int skip : enc.skips)
        for (double v : tape.value(skip).v) CHECK(v == 0.0);
    const int dec = psa::nets::decode_graph(tape, leaves, enc, 0, cfg);
    for (double v : tape.value(dec).v) CHECK(v == 0.5);  // sigmoid(0)
}

TEST_CASE("decoding stays strictly inside (0,1) and is deterministic") {
    NetConfig cfg = micro_config();
    SeededRng rng(16);
    ParamStore store = psa::nets::init_segmentation_params(cfg, rng);
    SeededRng drng(17);
    Grid image(8, 8);
    for (auto& v : image.values()) v = float(drng.uniform());
    BinaryMask bladder = BinaryMask::zeros(8, 8);
    BinaryMask rectum = BinaryMask::zeros(8, 8);

    const Grid p1 = psa::nets::predict_ctv(store, cfg, image, bladder, rectum, 1);
    const Grid p2 = psa::nets::predict_ctv(store, cfg, image, bladder, rectum, 1);
    CHECK(p1 == p2);
    for (float v : p1.values()) {
        CHECK(v > 0.0f);
        CHECK(v < 1.0f);
    }
    CHECK_THROWS_AS(psa::nets::predict_ctv(store, cfg, image, bladder, rectum, 99),
                    std::invalid_argument);
    CHECK_THROWS_AS(psa::nets::predict_ctv(store, cfg, image, bladder, rectum, -1),
                    std::invalid_argument);
}

TEST_CASE("fully opened gates reproduce the ungated decoder bitwise") {
    NetConfig cfg = micro_config();
    cfg.kernel = 3;
    SeededRng rng(18);
    ParamStore store = psa::nets::init_segmentation_params(cfg, rng);
    // style 1 borrows the mixed decoder's weights; logit 40 saturates the
    // sigmoid to exactly 1.0 in double precision
    for (int level = 1; level <= cfg.depth; ++level) {
        store.at("dec1_l" + std::to_string(level) + "_w").v =
            store.at("dec0_l" + std::to_string(level) + "_w").v;
        store.at("dec1_l" + std::to_string(level) + "_b").v =
            store.at("dec0_l" + std::to_string(level) + "_b").v;
        for (double& v : store.at("att1_l" + std::to_string(level)).v) v = 40.0;
    }
    store.at("dec1_head_w").v = store.at("dec0_head_w").v;
    store.at("dec1_head_b").v = store.at("dec0_head_b").v;

    SeededRng drng(19);
    Grid image(8, 8);
    for (auto& v : image.values()) v = float(drng.uniform());
    const BinaryMask organs = BinaryMask::zeros(8, 8);
    const Grid mixed = psa::nets::predict_ctv(store, cfg, image, organs, organs, 0);
    const Grid gated = psa::nets::predict_ctv(store, cfg, image, organs, organs, 1);
    CHECK(mixed == gated);
}

TEST_CASE("independently initialized style decoders disagree") {
    NetConfig cfg = micro_config();
    SeededRng rng(20);
    ParamStore store = psa::nets::init_segmentation_params(cfg, rng);
    SeededRng drng(21);
    Grid image(8, 8);
    for (auto& v : image.values()) v = float(drng.uniform());
    const BinaryMask organs = BinaryMask::zeros(8, 8);
    const Grid a = psa::nets::predict_ctv(store, cfg, image, organs, organs, 1);
    const Grid b = psa::nets::predict_ctv(store, cfg, image, organs, organs, 2);
    CHECK(a != b);
}

TEST_CASE("perceptual stacks return one activation per stage under channel contracts") {
    NetConfig cfg = micro_config();
    cfg.perceptual_layers = 4;
    SeededRng rng(22);
    ParamStore store;
    psa::nets::add_perceptual_params(store, cfg, PerceptualKind::shape, rng);
    psa::nets::add_perceptual_params(store, cfg, PerceptualKind::overlap, rng);
    CHECK(store.has_group("shapenet"));
    CHECK(store.has_group("overlapnet"));

    SeededRng drng(23);
    const Tensor ctv = random_tensor(drng, 1, 8, 8, 0.0, 1.0);
    const auto maps = psa::nets::perceptual_forward(store, cfg, PerceptualKind::shape, ctv);
    REQUIRE(int(maps.size()) == cfg.perceptual_layers);
    CHECK(maps.back().ch == 1);
    for (double v : maps.back().v) {
        CHECK(v > 0.0);
        CHECK(v < 1.0);
    }
    for (std::size_t l = 0; l + 1 < maps.size(); ++l)
        for (double v : maps[l].v) CHECK(v >= 0.0);  // relu stages

    const auto again = psa::nets::perceptual_forward(store, cfg, PerceptualKind::shape, ctv);
    for (std::size_t l = 0; l < maps.size(); ++l) CHECK(maps[l].v == again[l].v);

    const Tensor triple = random_tensor(drng, 3, 8, 8, 0.0, 1.0);
    const auto omaps = psa::nets::perceptual_forward(store, cfg, PerceptualKind::overlap, triple);
    CHECK(omaps.back().ch == 2);
    CHECK_THROWS_AS(psa::nets::perceptual_forward(store, cfg, PerceptualKind::shape, triple),
                    std::invalid_argument);
    CHECK_THROWS_AS(psa::nets::perceptual_forward(store, cfg, PerceptualKind::overlap, ctv),
                    std::invalid_argument);
}

TEST_CASE("classifier probabilities form a distribution; zero weights give the uniform one") {
    NetConfig cfg = micro_config();
    cfg.num_styles = 4;
    SeededRng rng(24);
    ParamStore store = psa::nets::init_classifier_params(cfg, rng);

    SeededRng drng(25);
    Grid image(8, 8), dmap(8, 8);
    for (auto& v : image.values()) v = float(drng.uniform());
    for (auto& v : dmap.values()) v = float(drng.uniform() * 20.0 - 10.0);

    const auto probs = psa::nets::classify(store, cfg, image, dmap);
    REQUIRE(probs.size() == 4);
    double sum = 0.0;
    for (double p : probs) {
        CHECK(p >= 0.0);
        sum += p;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));

    for (auto& a : store.arrays())
        for (double& v : a.v) v = 0.0;
    for (double p : psa::nets::classify(store, cfg, image, dmap)) CHECK(p == 0.25);

    Grid small(4, 4);
    CHECK_THROWS_AS(psa::nets::classify(store, cfg, image, small), std::invalid_argument);
}

TEST_CASE("added decoders take the next free style index") {
    NetConfig cfg = micro_config();
    SeededRng rng(26);
    ParamStore store = psa::nets::init_segmentation_params(cfg, rng);
    CHECK(psa::nets::num_decoders(store) == 3);

    const int gated = psa::nets::add_style_decoder(store, cfg, rng, true);
    CHECK(gated == 3);
    CHECK(store.has_group("decoder_3"));
    CHECK(store.has_group("attention_3"));

    const int plain = psa::nets::add_style_decoder(store, cfg, rng, false);
    CHECK(plain == 4);
    CHECK(store.has_group("decoder_4"));
    CHECK(!store.has_group("attention_4"));
    CHECK(psa::nets::num_decoders(store) == 5);

    ParamStore empty;
    CHECK_THROWS_AS(psa::nets::add_style_decoder(empty, cfg, rng, false), std::logic_error);
}

TEST_CASE("net config validation rejects out-of-range fields") {
    NetConfig cfg;
    cfg.depth = 1;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = NetConfig{};
    cfg.kernel = 2;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = NetConfig{};
    cfg.perceptual_layers = 1;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = NetConfig{};
    cfg.num_styles = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    CHECK_NOTHROW(NetConfig::defaults().validate());
}

TEST_CASE("micro segmentation net matches finite differences through encode and gated decode") {
    NetConfig cfg = micro_config();
    cfg.num_styles = 1;
    SeededRng rng(27);
    ParamStore store = psa::nets::init_segmentation_params(cfg, rng);
    CHECK(store.total_values() <= 500);

    SeededRng drng(28);
    const Tensor input = random_tensor(drng, 3, 8, 8, 0.0, 1.0);
    Tensor target(1, 8, 8);
    for (int r = 2; r < 6; ++r)
        for (int c = 2; c < 6; ++c) target.at(0, r, c) = 1.0;

    check_param_gradients(store, [&](Tape& t, const ParamLeaves& l) {
        const int in = t.leaf(input, false);
        const auto enc = psa::nets::encode_graph(t, l, in, cfg);
        const int pred = psa::nets::decode_graph(t, l, enc, 1, cfg);
        return t.soft_dice_loss(pred, t.leaf(target, false), 1.0);
    });
}

TEST_CASE("micro classifier matches finite differences through inception blocks") {
    NetConfig cfg = micro_config();
    SeededRng rng(29);
    ParamStore store = psa::nets::init_classifier_params(cfg, rng);
    CHECK(store.total_values() <= 500);

    SeededRng drng(30);
    const Tensor input = random_tensor(drng, 2, 8, 8, -0.5, 0.5);
    check_param_gradients(store, [&](Tape& t, const ParamLeaves& l) {
        const int logits = psa::nets::classifier_logits_graph(t, l, t.leaf(input, false), cfg);
        return t.softmax_cross_entropy(logits, 1);
    });
}
