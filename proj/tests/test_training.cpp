#include <doctest.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "psa/checkpoint.hpp"
#include "psa/maps.hpp"
#include "psa/metrics.hpp"
#include "psa/nets.hpp"
#include "psa/phantom.hpp"
#include "psa/training.hpp"

using namespace psa;
using train::TrainConfig;
using train::TrainedModel;

namespace {

phantom::PhantomConfig tiny_phantom(int samples, int styles, int hw, std::uint64_t seed) {
    phantom::PhantomConfig cfg = phantom::PhantomConfig::defaults();
    cfg.height = hw;
    cfg.width = hw;
    cfg.num_samples = samples;
    cfg.num_styles = styles;
    cfg.styles.resize(std::size_t(styles));
    cfg.style_probs.assign(std::size_t(styles), 1.0 / styles);
    cfg.seed = seed;
    return cfg;
}

nets::NetConfig tiny_net(int styles) {
    nets::NetConfig net;
    net.depth = 2;
    net.base_channels = 2;
    net.kernel = 3;
    net.num_styles = styles;
    net.perceptual_layers = 2;
    net.perceptual_channels = 2;
    net.classifier_branch_channels = 2;
    net.classifier_blocks = 1;
    return net;
}

TrainConfig quick_cfg(int epochs, std::uint64_t seed = 11) {
    TrainConfig cfg;
    cfg.epochs = epochs;
    cfg.seed = seed;
    return cfg;
}

/// Pretrains both perceptual nets briefly so train_psa has inputs.
struct PerceptualPair {
    TrainedModel shape;
    TrainedModel overlap;
};

PerceptualPair quick_perceptual(const Dataset& ds, const maps::MapsStore& ms,
                                const nets::NetConfig& net, int epochs = 1) {
    return {train::pretrain_perceptual(ds, ms, nets::PerceptualKind::shape, net,
                                       quick_cfg(epochs, 3)),
            train::pretrain_perceptual(ds, ms, nets::PerceptualKind::overlap, net,
                                       quick_cfg(epochs, 4))};
}

std::int64_t style_count(const Dataset& ds, Split split, int style) {
    std::int64_t n = 0;
    for (std::size_t i : ds.indices(split))
        if (ds.samples[i].assigned_style == style) ++n;
    return n;
}

std::filesystem::path fresh_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "psa_train_tests" / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("zero-epoch runs return the initialization unchanged") {
    const Dataset ds = phantom::build_dataset(tiny_phantom(10, 2, 24, 21));
    const nets::NetConfig net = tiny_net(2);

    const TrainedModel m =
        train::train_baseline(ds, train::BaselineKind::mixed, 0, net, quick_cfg(0));
    SeededRng rng(quick_cfg(0).seed);
    const nets::ParamStore fresh = nets::init_single_decoder_params(net, rng);
    CHECK(m.params.content_hash() == fresh.content_hash());
    CHECK(m.initial_loss == 0.0);
    CHECK(m.final_loss == 0.0);
    for (const auto& [group, count] : m.update_counts) {
        CAPTURE(group);
        CHECK(count == 0);
    }

    const maps::MapsStore ms = maps::precompute(ds);
    const TrainedModel pre =
        train::pretrain_perceptual(ds, ms, nets::PerceptualKind::shape, net, quick_cfg(0));
    SeededRng rng2(quick_cfg(0).seed);
    nets::ParamStore fresh2;
    nets::add_perceptual_params(fresh2, net, nets::PerceptualKind::shape, rng2);
    CHECK(pre.params.content_hash() == fresh2.content_hash());
}

TEST_CASE("zero-epoch transfer equals its source bitwise") {
    const Dataset ds = phantom::build_dataset(tiny_phantom(10, 2, 24, 22));
    const nets::NetConfig net = tiny_net(2);
    const TrainedModel source =
        train::train_baseline(ds, train::BaselineKind::mixed, 0, net, quick_cfg(2));
    const TrainedModel moved = train::train_baseline(ds, train::BaselineKind::transfer, 1, net,
                                                     quick_cfg(0), &source);
    CHECK(moved.params.content_hash() == source.params.content_hash());
    CHECK(moved.kind == "transfer:1");
}

TEST_CASE("fixed seeds reproduce training bitwise; changed seeds do not") {
    const Dataset ds = phantom::build_dataset(tiny_phantom(10, 2, 24, 23));
    const nets::NetConfig net = tiny_net(2);
    const TrainedModel a =
        train::train_baseline(ds, train::BaselineKind::mixed, 0, net, quick_cfg(2, 5));
    const TrainedModel b =
        train::train_baseline(ds, train::BaselineKind::mixed, 0, net, quick_cfg(2, 5));
    const TrainedModel c =
        train::train_baseline(ds, train::BaselineKind::mixed, 0, net, quick_cfg(2, 6));
    CHECK(a.params.content_hash() == b.params.content_hash());
    CHECK(a.initial_loss == b.initial_loss);
    CHECK(a.final_loss == b.final_loss);
    CHECK(a.params.content_hash() != c.params.content_hash());
}

TEST_CASE("batch accumulation averages gradients across the batch") {
    // One 2-sample batch must differ from two 1-sample steps, and a batch
    // of the whole epoch must equal batch_size == dataset size.
    const Dataset ds = phantom::build_dataset(tiny_phantom(6, 2, 24, 29));
    const nets::NetConfig net = tiny_net(2);
    TrainConfig b1 = quick_cfg(1);
    TrainConfig b2 = quick_cfg(1);
    b2.batch_size = 2;
    TrainConfig ball = quick_cfg(1);
    ball.batch_size = int(ds.indices(Split::Train).size());
    TrainConfig bhuge = quick_cfg(1);
    bhuge.batch_size = 64;  // larger than the epoch: flushed once at epoch end

    const auto h1 = train::train_baseline(ds, train::BaselineKind::mixed, 0, net, b1)
                        .params.content_hash();
    const auto h2 = train::train_baseline(ds, train::BaselineKind::mixed, 0, net, b2)
                        .params.content_hash();
    const auto hall = train::train_baseline(ds, train::BaselineKind::mixed, 0, net, ball)
                          .params.content_hash();
    const auto hhuge = train::train_baseline(ds, train::BaselineKind::mixed, 0, net, bhuge)
                           .params.content_hash();
    CHECK(h1 != h2);
    CHECK(hall == hhuge);
}

TEST_CASE("perceptual pretraining fits held-out edge maps") {
    phantom::PhantomConfig pc = tiny_phantom(40, 2, 32, 31);
    const Dataset ds = phantom::build_dataset(pc);
    const maps::MapsStore ms = maps::precompute(ds);

    nets::NetConfig net = tiny_net(2);
    net.perceptual_layers = 3;
    net.perceptual_channels = 8;

    TrainConfig cfg = quick_cfg(40, 13);
    cfg.learning_rate = 1e-2;
    const TrainedModel m =
        train::pretrain_perceptual(ds, ms, nets::PerceptualKind::shape, net, cfg);
    CHECK(m.final_loss < m.initial_loss);
    CHECK(m.kind == "pretrain:shape");
    CHECK_FALSE(m.params.frozen("shapenet"));  // caller freezes

    double dice_sum = 0.0;
    int n = 0;
    for (std::size_t i : ds.indices(Split::Test)) {
        const StyledSample& s = ds.samples[i];
        const auto acts = nets::perceptual_forward(m.params, net, nets::PerceptualKind::shape,
                                                   nets::Tensor::from_mask(s.assigned_ctv()));
        const BinaryMask pred = binarize(acts.back().to_grid(0), 0.5);
        dice_sum += metrics::dsc(pred, ms.per_sample[i].edge);
        ++n;
    }
    REQUIRE(n > 0);
    CHECK(dice_sum / n > 0.6);
}

TEST_CASE("overlap pretraining reduces its two-channel loss") {
    const Dataset ds = phantom::build_dataset(tiny_phantom(16, 2, 24, 32));
    const maps::MapsStore ms = maps::precompute(ds);
    const nets::NetConfig net = tiny_net(2);
    TrainConfig cfg = quick_cfg(6, 14);
    cfg.learning_rate = 1e-2;
    const TrainedModel m =
        train::pretrain_perceptual(ds, ms, nets::PerceptualKind::overlap, net, cfg);
    CHECK(m.final_loss < m.initial_loss);
    CHECK(m.kind == "pretrain:overlap");
    CHECK(m.update_counts.at("overlapnet") ==
          std::int64_t(ds.indices(Split::Train).size()) * cfg.epochs);
}

TEST_CASE("routed training: counts, freezes, and untouched decoders") {
    phantom::PhantomConfig pc = tiny_phantom(12, 2, 24, 33);
    Dataset ds = phantom::build_dataset(pc);
    // Force every training sample to style 1 so decoder 2 is never routed.
    for (std::size_t i : ds.indices(Split::Train)) ds.samples[i].assigned_style = 1;

    const maps::MapsStore ms = maps::precompute(ds);
    const nets::NetConfig net = tiny_net(2);
    const PerceptualPair pre = quick_perceptual(ds, ms, net);

    TrainConfig cfg = quick_cfg(2, 17);
    const TrainedModel m = train::train_psa(ds, pre.shape, pre.overlap, net, cfg);

    const std::int64_t total = std::int64_t(ds.indices(Split::Train).size()) * cfg.epochs;
    CHECK(m.update_counts.at("encoder") == total);
    CHECK(m.update_counts.at("decoder_0") == total);
    CHECK(m.update_counts.at("decoder_1") == total);
    CHECK(m.update_counts.at("attention_1") == total);
    CHECK(m.update_counts.at("decoder_2") == 0);
    CHECK(m.update_counts.at("attention_2") == 0);

    // Frozen perceptual groups bitwise-equal their pretrained sources.
    CHECK(m.params.frozen("shapenet"));
    CHECK(m.params.frozen("overlapnet"));
    CHECK(m.params.group_hash("shapenet") == pre.shape.params.group_hash("shapenet"));
    CHECK(m.params.group_hash("overlapnet") == pre.overlap.params.group_hash("overlapnet"));

    // The unrouted decoder still sits at its seeded initialization.
    SeededRng rng(cfg.seed);
    const nets::ParamStore fresh = nets::init_segmentation_params(net, rng);
    CHECK(m.params.group_hash("decoder_2") == fresh.group_hash("decoder_2"));
    CHECK(m.params.group_hash("attention_2") == fresh.group_hash("attention_2"));
    CHECK(m.params.group_hash("decoder_1") != fresh.group_hash("decoder_1"));
    CHECK(m.params.group_hash("encoder") != fresh.group_hash("encoder"));

    CHECK(m.final_loss < m.initial_loss);
    CHECK(m.kind == "psa");
    CHECK(m.dataset_hash == ds.content_hash());
}

TEST_CASE("routed training splits counts per style") {
    const Dataset ds = phantom::build_dataset(tiny_phantom(14, 2, 24, 34));
    const maps::MapsStore ms = maps::precompute(ds);
    const nets::NetConfig net = tiny_net(2);
    const PerceptualPair pre = quick_perceptual(ds, ms, net);

    TrainConfig cfg = quick_cfg(3, 18);
    const TrainedModel m = train::train_psa(ds, pre.shape, pre.overlap, net, cfg);
    const std::int64_t n1 = style_count(ds, Split::Train, 1) * cfg.epochs;
    const std::int64_t n2 = style_count(ds, Split::Train, 2) * cfg.epochs;
    CHECK(m.update_counts.at("decoder_1") == n1);
    CHECK(m.update_counts.at("decoder_2") == n2);
    CHECK(m.update_counts.at("attention_1") == n1);
    CHECK(m.update_counts.at("attention_2") == n2);
    CHECK(m.update_counts.at("encoder") == n1 + n2);
    CHECK(m.update_counts.at("decoder_0") == n1 + n2);
}

TEST_CASE("style count mismatches and incompatible pretrained nets are rejected") {
    const Dataset ds = phantom::build_dataset(tiny_phantom(10, 2, 24, 35));
    const maps::MapsStore ms = maps::precompute(ds);
    const nets::NetConfig net = tiny_net(2);
    const PerceptualPair pre = quick_perceptual(ds, ms, net);

    nets::NetConfig wrong_styles = net;
    wrong_styles.num_styles = 3;
    CHECK_THROWS_AS(train::train_psa(ds, pre.shape, pre.overlap, wrong_styles, quick_cfg(1)),
                    std::invalid_argument);

    nets::NetConfig wrong_perc = net;
    wrong_perc.perceptual_channels = 4;
    CHECK_THROWS_AS(train::train_psa(ds, pre.shape, pre.overlap, wrong_perc, quick_cfg(1)),
                    std::invalid_argument);
}

TEST_CASE("substyle baseline trains on exactly its style's samples") {
    const Dataset ds = phantom::build_dataset(tiny_phantom(14, 2, 24, 36));
    const nets::NetConfig net = tiny_net(2);
    TrainConfig cfg = quick_cfg(2, 19);
    const TrainedModel m =
        train::train_baseline(ds, train::BaselineKind::substyle, 2, net, cfg);
    const std::int64_t n2 = style_count(ds, Split::Train, 2) * cfg.epochs;
    CHECK(m.update_counts.at("encoder") == n2);
    CHECK(m.update_counts.at("decoder_0") == n2);
    CHECK(m.kind == "substyle:2");

    CHECK_THROWS_AS(train::train_baseline(ds, train::BaselineKind::substyle, 9, net, cfg),
                    std::invalid_argument);
    CHECK_THROWS_AS(train::train_baseline(ds, train::BaselineKind::transfer, 1, net, cfg),
                    std::invalid_argument);  // no source

    Dataset starved = ds;
    for (std::size_t i : starved.indices(Split::Train)) starved.samples[i].assigned_style = 1;
    CHECK_THROWS_AS(train::train_baseline(starved, train::BaselineKind::substyle, 2, net, cfg),
                    std::invalid_argument);
}

TEST_CASE("adaptation freezes the encoder and leaves source decoders untouched") {
    const nets::NetConfig net = tiny_net(2);
    const Dataset ds_a = phantom::build_dataset(tiny_phantom(10, 2, 24, 37));
    const maps::MapsStore ms = maps::precompute(ds_a);
    const PerceptualPair pre = quick_perceptual(ds_a, ms, net);
    const TrainedModel source = train::train_psa(ds_a, pre.shape, pre.overlap, net, quick_cfg(1));

    phantom::PhantomConfig pb = tiny_phantom(12, 2, 24, 38);
    pb.style_probs = {0.8, 0.2};
    const Dataset ds_b = phantom::build_dataset(pb);

    TrainConfig cfg = quick_cfg(2, 20);
    const TrainedModel only =
        train::adapt_new_style(source, ds_b, train::AdaptMode::decoder_only, cfg);
    CHECK(only.kind == "adapt:decoder_only");
    CHECK(only.adapt_mixed_decoder == 3);
    CHECK(only.adapt_style_decoder == -1);
    CHECK(only.params.frozen("encoder"));
    CHECK(only.params.group_hash("encoder") == source.params.group_hash("encoder"));
    for (int k = 0; k <= 2; ++k) {
        CAPTURE(k);
        CHECK(only.params.group_hash(nets::decoder_group(k)) ==
              source.params.group_hash(nets::decoder_group(k)));
    }
    const std::int64_t total = std::int64_t(ds_b.indices(Split::Train).size()) * cfg.epochs;
    CHECK(only.update_counts.at("decoder_3") == total);
    CHECK(only.final_loss < only.initial_loss);

    const TrainedModel both =
        train::adapt_new_style(source, ds_b, train::AdaptMode::decoder_plus_mixed, cfg);
    CHECK(both.kind == "adapt:decoder_plus_mixed");
    CHECK(both.adapt_mixed_decoder == 3);
    CHECK(both.adapt_style_decoder == 4);
    const std::int64_t n1 = style_count(ds_b, Split::Train, 1);
    const std::int64_t n2 = style_count(ds_b, Split::Train, 2);
    const int dominant = n1 >= n2 ? 1 : 2;
    CHECK(both.adapt_target_style == dominant);
    CHECK(both.update_counts.at("decoder_3") == total);
    CHECK(both.update_counts.at("decoder_4") ==
          style_count(ds_b, Split::Train, dominant) * cfg.epochs);
    CHECK(both.update_counts.at("attention_4") == both.update_counts.at("decoder_4"));
    CHECK(both.params.group_hash("encoder") == source.params.group_hash("encoder"));

    // 0 epochs: the new decoder sits at its seeded init, encoder untouched.
    const TrainedModel zero =
        train::adapt_new_style(source, ds_b, train::AdaptMode::decoder_only, quick_cfg(0, 20));
    CHECK(zero.params.group_hash("encoder") == source.params.group_hash("encoder"));
    CHECK(zero.update_counts.at("decoder_3") == 0);
}

TEST_CASE("classifier training needs maps and lowers cross-entropy") {
    const Dataset ds = phantom::build_dataset(tiny_phantom(16, 2, 24, 39));
    const maps::MapsStore ms = maps::precompute(ds);
    const nets::NetConfig net = tiny_net(2);
    TrainConfig cfg = quick_cfg(4, 23);
    cfg.learning_rate = 5e-3;
    const TrainedModel m = train::train_classifier(ds, ms, net, cfg);
    CHECK(m.kind == "classifier");
    CHECK(m.final_loss < m.initial_loss);
    CHECK(m.update_counts.at("classifier") ==
          std::int64_t(ds.indices(Split::Train).size()) * cfg.epochs);

    const maps::MapsStore empty;
    CHECK_THROWS_AS(train::train_classifier(ds, empty, net, cfg), std::invalid_argument);
}

TEST_CASE("training config validation") {
    TrainConfig cfg;
    cfg.epochs = -1;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.batch_size = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.learning_rate = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.checkpoint_every = 2;  // no dir
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.loss.epsilon = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("non-finite losses abort with a diagnostic") {
    const Dataset ds = phantom::build_dataset(tiny_phantom(8, 2, 24, 40));
    const nets::NetConfig net = tiny_net(2);
    // A poisoned upstream model makes every forward pass NaN; the runner
    // must refuse to step rather than smear NaN into the optimizer.
    TrainedModel source =
        train::train_baseline(ds, train::BaselineKind::mixed, 0, net, quick_cfg(0));
    source.params.at("dec0_head_w").v[0] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_WITH_AS(train::train_baseline(ds, train::BaselineKind::transfer, 1, net,
                                               quick_cfg(2, 24), &source),
                         doctest::Contains("diverged"), std::runtime_error);
}

TEST_CASE("per-step loss CSV is written with one row per sample visit") {
    const Dataset ds = phantom::build_dataset(tiny_phantom(8, 2, 24, 41));
    const nets::NetConfig net = tiny_net(2);
    const auto dir = fresh_dir("loss_log");
    TrainConfig cfg = quick_cfg(2, 25);
    cfg.loss_log = (dir / "steps.csv").string();
    train::train_baseline(ds, train::BaselineKind::mixed, 0, net, cfg);

    std::ifstream in(cfg.loss_log);
    REQUIRE(in.good());
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line == "epoch,step,sample,style,total");
    int rows = 0;
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    CHECK(rows == int(ds.indices(Split::Train).size()) * cfg.epochs);
}

TEST_CASE("model save/load round-trips bitwise") {
    const Dataset ds = phantom::build_dataset(tiny_phantom(10, 2, 24, 42));
    const maps::MapsStore ms = maps::precompute(ds);
    const nets::NetConfig net = tiny_net(2);
    const PerceptualPair pre = quick_perceptual(ds, ms, net);
    const TrainedModel m = train::train_psa(ds, pre.shape, pre.overlap, net, quick_cfg(1, 26));

    const auto dir = fresh_dir("model_roundtrip");
    train::save_model(dir, m);
    const TrainedModel r = train::load_model(dir);
    CHECK(r.params.content_hash() == m.params.content_hash());
    CHECK(r.params.frozen_groups() == m.params.frozen_groups());
    CHECK(r.kind == m.kind);
    CHECK(r.dataset_hash == m.dataset_hash);
    CHECK(r.initial_loss == m.initial_loss);
    CHECK(r.final_loss == m.final_loss);
    CHECK(r.update_counts == m.update_counts);
    CHECK(r.net.base_channels == m.net.base_channels);
    CHECK(r.net.num_styles == m.net.num_styles);
    CHECK(r.train.epochs == m.train.epochs);
    CHECK(r.train.seed == m.train.seed);
    CHECK(r.train.learning_rate == m.train.learning_rate);

    // Registration order survives, so graph construction is reproducible.
    const auto& a = m.params.arrays();
    const auto& b = r.params.arrays();
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].name == b[i].name);
}

TEST_CASE("corrupted checkpoints are rejected") {
    const Dataset ds = phantom::build_dataset(tiny_phantom(8, 2, 24, 43));
    const nets::NetConfig net = tiny_net(2);
    const TrainedModel m =
        train::train_baseline(ds, train::BaselineKind::mixed, 0, net, quick_cfg(1, 27));

    const auto dir = fresh_dir("corrupt");
    train::save_model(dir, m);

    // Flip one payload byte in the first parameter blob.
    const auto blob_path = dir / "params" / (m.params.arrays().front().name + ".blob");
    std::fstream f(blob_path, std::ios::in | std::ios::out | std::ios::binary);
    REQUIRE(f.good());
    f.seekp(20);
    char byte = 0;
    f.seekg(20);
    f.get(byte);
    byte = char(byte ^ 0x1);
    f.seekp(20);
    f.put(byte);
    f.close();
    CHECK_THROWS_AS(train::load_model(dir), std::runtime_error);

    CHECK_THROWS_AS(train::load_checkpoint(fresh_dir("no_manifest")), std::runtime_error);
}

TEST_CASE("resuming a checkpoint reproduces uninterrupted training bitwise") {
    const Dataset ds = phantom::build_dataset(tiny_phantom(10, 2, 24, 44));
    const nets::NetConfig net = tiny_net(2);

    const TrainedModel full =
        train::train_baseline(ds, train::BaselineKind::mixed, 0, net, quick_cfg(4, 28));

    const auto dir = fresh_dir("resume_mixed");
    TrainConfig cfg = quick_cfg(4, 28);
    cfg.checkpoint_every = 2;
    cfg.checkpoint_dir = dir.string();
    const TrainedModel ck_run =
        train::train_baseline(ds, train::BaselineKind::mixed, 0, net, cfg);
    CHECK(ck_run.params.content_hash() == full.params.content_hash());
    REQUIRE(std::filesystem::exists(dir / "epoch_0002"));
    REQUIRE(std::filesystem::exists(dir / "epoch_0004"));

    // Continue from the halfway snapshot as if the process had died.
    const TrainedModel resumed = train::resume_training((dir / "epoch_0002").string(), ds);
    CHECK(resumed.params.content_hash() == full.params.content_hash());
    CHECK(resumed.initial_loss == full.initial_loss);
    CHECK(resumed.final_loss == full.final_loss);
    CHECK(resumed.update_counts == full.update_counts);

    // The final cadence snapshot already matches the finished run.
    const train::Checkpoint last = train::load_checkpoint(dir / "epoch_0004");
    CHECK(last.model.params.content_hash() == full.params.content_hash());
    CHECK(last.next_epoch == 4);
    CHECK(last.has_opt);

    // A different dataset is refused.
    const Dataset other = phantom::build_dataset(tiny_phantom(10, 2, 24, 45));
    CHECK_THROWS_AS(train::resume_training((dir / "epoch_0002").string(), other),
                    std::runtime_error);
}

TEST_CASE("resume matches uninterrupted runs for routed and adapted kinds") {
    const Dataset ds = phantom::build_dataset(tiny_phantom(10, 2, 24, 46));
    const maps::MapsStore ms = maps::precompute(ds);
    const nets::NetConfig net = tiny_net(2);
    const PerceptualPair pre = quick_perceptual(ds, ms, net);

    SUBCASE("psa") {
        const TrainedModel full =
            train::train_psa(ds, pre.shape, pre.overlap, net, quick_cfg(2, 30));
        const auto dir = fresh_dir("resume_psa");
        TrainConfig cfg = quick_cfg(2, 30);
        cfg.checkpoint_every = 1;
        cfg.checkpoint_dir = dir.string();
        train::train_psa(ds, pre.shape, pre.overlap, net, cfg);
        const TrainedModel resumed = train::resume_training((dir / "epoch_0001").string(), ds);
        CHECK(resumed.params.content_hash() == full.params.content_hash());
        CHECK(resumed.update_counts == full.update_counts);
        CHECK(resumed.params.frozen("shapenet"));
    }

    SUBCASE("classifier requires maps on resume") {
        const TrainedModel full = train::train_classifier(ds, ms, net, quick_cfg(2, 31));
        const auto dir = fresh_dir("resume_cls");
        TrainConfig cfg = quick_cfg(2, 31);
        cfg.checkpoint_every = 1;
        cfg.checkpoint_dir = dir.string();
        train::train_classifier(ds, ms, net, cfg);
        CHECK_THROWS_AS(train::resume_training((dir / "epoch_0001").string(), ds),
                        std::invalid_argument);
        const TrainedModel resumed =
            train::resume_training((dir / "epoch_0001").string(), ds, &ms);
        CHECK(resumed.params.content_hash() == full.params.content_hash());
    }

    SUBCASE("adapt decoder_plus_mixed") {
        const TrainedModel source =
            train::train_psa(ds, pre.shape, pre.overlap, net, quick_cfg(1, 32));
        phantom::PhantomConfig pb = tiny_phantom(10, 2, 24, 47);
        pb.style_probs = {0.8, 0.2};
        const Dataset ds_b = phantom::build_dataset(pb);

        const TrainedModel full = train::adapt_new_style(
            source, ds_b, train::AdaptMode::decoder_plus_mixed, quick_cfg(2, 33));
        const auto dir = fresh_dir("resume_adapt");
        TrainConfig cfg = quick_cfg(2, 33);
        cfg.checkpoint_every = 1;
        cfg.checkpoint_dir = dir.string();
        train::adapt_new_style(source, ds_b, train::AdaptMode::decoder_plus_mixed, cfg);
        const TrainedModel resumed =
            train::resume_training((dir / "epoch_0001").string(), ds_b);
        CHECK(resumed.params.content_hash() == full.params.content_hash());
        CHECK(resumed.adapt_target_style == full.adapt_target_style);
        CHECK(resumed.update_counts == full.update_counts);
    }
}
