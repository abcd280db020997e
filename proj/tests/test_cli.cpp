// End-to-end exercise of the command-line tool: every subcommand runs against
// a postage-stamp dataset and the artifacts are checked on disk.
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "psa/checkpoint.hpp"
#include "psa/dataset.hpp"
#include "psa/report.hpp"

using namespace psa;
namespace fs = std::filesystem;

namespace {

const fs::path kRoot = fs::temp_directory_path() / "psa_cli_tests";

int run_cli(const std::string& args) {
    const std::string cmd =
        std::string(PSA_CLI_PATH) + " " + args + " >> " + (kRoot / "cli.log").string() + " 2>&1";
    return std::system(cmd.c_str());
}

int exit_code(int status) {
#ifdef WEXITSTATUS
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
#else
    return status;
#endif
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    REQUIRE(out.good());
    out << text;
}

const char* kPhantomJson = R"({
  "height": 24, "width": 24, "num_samples": 30, "seed": 11,
  "styles": [
    {"style_id": 1, "margin_shift": 4},
    {"style_id": 2, "organ_carve": 0.9}
  ]
})";

const char* kNetJson = R"({
  "depth": 2, "base_channels": 2, "kernel": 3, "num_styles": 2,
  "perceptual_layers": 2, "perceptual_channels": 2,
  "classifier_branch_channels": 2, "classifier_blocks": 1
})";

}  // namespace

TEST_CASE("command-line pipeline round-trips from phantom to evaluation") {
    fs::remove_all(kRoot);
    fs::create_directories(kRoot);
    const std::string root = kRoot.string() + "/";
    write_file(kRoot / "phantom.json", kPhantomJson);
    write_file(kRoot / "net.json", kNetJson);
    const std::string net = " --net-config " + root + "net.json --batch-size 4 --epochs 1";
    const std::string net_only = " --net-config " + root + "net.json --batch-size 4";

    REQUIRE(exit_code(run_cli("phantom generate --config " + root + "phantom.json --out " +
                              root + "ds")) == 0);
    const Dataset ds = load_dataset(kRoot / "ds");
    CHECK(ds.samples.size() == 30);
    CHECK(ds.num_styles == 2);
    CHECK(fs::exists(kRoot / "ds" / "phantom_config.json"));

    REQUIRE(exit_code(run_cli("maps precompute --dataset " + root + "ds --out " + root +
                              "maps")) == 0);

    REQUIRE(exit_code(run_cli("pretrain --dataset " + root + "ds --maps " + root +
                              "maps --kind shape" + net + " --out " + root + "shape")) == 0);
    REQUIRE(exit_code(run_cli("pretrain --dataset " + root + "ds --maps " + root +
                              "maps --kind overlap" + net + " --out " + root + "overlap")) == 0);
    CHECK(train::load_model(kRoot / "shape").kind == "pretrain:shape");

    REQUIRE(exit_code(run_cli("train --model psa --dataset " + root + "ds --shape " + root +
                              "shape --overlap " + root + "overlap" + net + " --out " + root +
                              "psa_model")) == 0);
    REQUIRE(exit_code(run_cli("train --model mixed --dataset " + root + "ds" + net + " --out " +
                              root + "mixed_model")) == 0);
    REQUIRE(exit_code(run_cli("train --model substyle:1 --dataset " + root + "ds" + net +
                              " --out " + root + "sub1")) == 0);
    REQUIRE(exit_code(run_cli("train --model transfer:2 --dataset " + root + "ds --source " +
                              root + "mixed_model" + net + " --out " + root + "tr2")) == 0);
    CHECK(train::load_model(kRoot / "psa_model").kind == "psa");
    CHECK(train::load_model(kRoot / "tr2").kind == "transfer:2");

    SUBCASE("checkpointed run resumes to the same final model") {
        REQUIRE(exit_code(run_cli("train --model mixed --dataset " + root + "ds" + net_only +
                                  " --epochs 3 --checkpoint-every 1 --checkpoint-dir " + root +
                                  "ckpt --out " + root + "mixed3")) == 0);
        REQUIRE(fs::exists(kRoot / "ckpt" / "epoch_0002"));
        REQUIRE(exit_code(run_cli("train --resume " + root + "ckpt/epoch_0002 --dataset " + root +
                                  "ds --out " + root + "mixed_resumed")) == 0);
        const auto full = train::load_model(kRoot / "mixed3");
        const auto resumed = train::load_model(kRoot / "mixed_resumed");
        CHECK(full.params.content_hash() == resumed.params.content_hash());
        CHECK(full.final_loss == resumed.final_loss);
    }

    SUBCASE("classifier and adaptation subcommands produce loadable models") {
        REQUIRE(exit_code(run_cli("classify-train --dataset " + root + "ds --maps " + root +
                                  "maps" + net + " --out " + root + "classifier")) == 0);
        CHECK(train::load_model(kRoot / "classifier").kind == "classifier");

        REQUIRE(exit_code(run_cli("adapt --source " + root + "mixed_model --dataset " + root +
                                  "ds --mode decoder-plus-mixed --epochs 1 --out " + root +
                                  "adapted")) == 0);
        const auto adapted = train::load_model(kRoot / "adapted");
        CHECK(adapted.kind == "adapt:decoder_plus_mixed");
        CHECK(adapted.adapt_target_style >= 1);
    }

    SUBCASE("eval emits per-sample and aggregate CSVs") {
        REQUIRE(exit_code(run_cli("eval --model " + root + "psa_model --dataset " + root +
                                  "ds --style-matched --out " + root + "eval_out")) == 0);
        const auto rep = report::read_metric_csv(kRoot / "eval_out" / "eval_samples.csv");
        const auto table = report::read_table_csv(kRoot / "eval_out" / "eval_table.csv");
        const int n_test = int(ds.indices(Split::Test).size());
        CHECK(int(rep.rows.size()) == n_test * 3);  // assigned + 2 style-matched rows
        REQUIRE(table.rows.size() == 3);
        CHECK(table.rows[0].n == n_test);

        // a pretrained perceptual net is not a segmentation model
        CHECK(exit_code(run_cli("eval --model " + root + "shape --dataset " + root +
                                "ds --out " + root + "eval_bad")) == 2);
    }

    SUBCASE("missing inputs yield the error exit code") {
        CHECK(exit_code(run_cli("train --model transfer:1 --dataset " + root + "ds" + net +
                                " --out " + root + "x")) == 2);
        CHECK(exit_code(run_cli("maps precompute --dataset " + root + "nope --out " + root +
                                "x")) == 2);
        CHECK(exit_code(run_cli("pretrain --dataset " + root + "ds --maps " + root +
                                "maps --kind wrong" + net + " --out " + root + "x")) == 2);
    }
}

TEST_CASE("survival subcommand writes curves and a logrank verdict") {
    fs::create_directories(kRoot);
    const std::string root = kRoot.string() + "/";
    write_file(kRoot / "records.csv",
               "time,event,group\n"
               "1.5,1,0\n2.0,0,0\n3.1,1,0\n"
               "0.9,1,1\n1.2,1,1\n4.0,0,1\n");
    REQUIRE(exit_code(run_cli("survival --records " + root + "records.csv --out " + root +
                              "surv")) == 0);
    CHECK(fs::exists(kRoot / "surv" / "km_group_0.csv"));
    CHECK(fs::exists(kRoot / "surv" / "km_group_1.csv"));

    std::ifstream in(kRoot / "surv" / "km_group_0.csv");
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line == "time,survival,at_risk,events");
    REQUIRE(std::getline(in, line));
    CHECK(line == "1.5,0.66666666666666663,3,1");

    std::ifstream json_in(kRoot / "surv" / "survival_tests.json");
    std::string json_text((std::istreambuf_iterator<char>(json_in)),
                          std::istreambuf_iterator<char>());
    CHECK(json_text.find("\"logrank\"") != std::string::npos);
    CHECK(json_text.find("\"statistic\"") != std::string::npos);

    CHECK(exit_code(run_cli("survival --records " + root + "missing.csv --out " + root +
                            "surv2")) == 2);
}

TEST_CASE("experiment subcommand gates its exit code on the thresholds") {
    fs::create_directories(kRoot);
    const std::string root = kRoot.string() + "/";
    const std::string exp = R"({
  "phantom": {
    "height": 24, "width": 24, "num_samples": 40, "seed": 5,
    "styles": [
      {"style_id": 1, "margin_shift": 4},
      {"style_id": 2, "organ_carve": 0.9}
    ]
  },
  "net": {"depth": 2, "base_channels": 2, "kernel": 3, "num_styles": 2,
          "perceptual_layers": 2, "perceptual_channels": 2,
          "classifier_branch_channels": 2, "classifier_blocks": 1},
  "train": {"classifier": {"epochs": 1, "batch_size": 4, "learning_rate": 0.01}},
  "seeds": [21],
  "thresholds": {"classifier_accuracy": ACCURACY}
})";
    auto with_accuracy = [&](const std::string& acc) {
        std::string text = exp;
        text.replace(text.find("ACCURACY"), 8, acc);
        return text;
    };

    write_file(kRoot / "exp_pass.json", with_accuracy("0.0"));
    REQUIRE(exit_code(run_cli("experiment classify --config " + root +
                              "exp_pass.json --out " + root + "exp_out")) == 0);
    CHECK(fs::exists(kRoot / "exp_out" / "classifier_report.csv"));
    CHECK(fs::exists(kRoot / "exp_out" / "classifier_confusion.csv"));
    CHECK(fs::exists(kRoot / "exp_out" / "experiment_config.json"));
    CHECK(fs::exists(kRoot / "exp_out" / "logs" / "classifier_seed21.csv"));

    write_file(kRoot / "exp_fail.json", with_accuracy("0.9999"));
    CHECK(exit_code(run_cli("experiment classify --config " + root + "exp_fail.json --out " +
                            root + "exp_out2")) == 1);

    write_file(kRoot / "exp_bad.json", with_accuracy("1.5"));
    CHECK(exit_code(run_cli("experiment classify --config " + root + "exp_bad.json --out " +
                            root + "exp_out3")) == 2);
}
