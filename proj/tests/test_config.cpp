#include "doctest.h"

#include "famx/config.hpp"
#include "famx/hash.hpp"

#include <stdexcept>
#include <string>

using namespace famx;

TEST_CASE("defaults validate and the canonical form re-parses to itself") {
    ExperimentConfig cfg;
    cfg.validate();
    const std::string canon = cfg.canonical();
    CHECK(canon.rfind("famx-config-v1\n", 0) == 0);
    const ExperimentConfig back = ExperimentConfig::parse(
        canon.substr(canon.find('\n') + 1)); // strip the format tag line
    CHECK(back.canonical() == canon);
    CHECK(back.hash() == cfg.hash());
}

TEST_CASE("parsing handles comments, blanks and whitespace") {
    const ExperimentConfig cfg = ExperimentConfig::parse(
        "# experiment\n"
        "\n"
        "  subjects =  12   # small run\n"
        "optimizer = sgd\n"
        "fmr_list = 0.01, 0.001\n");
    CHECK(cfg.subjects == 12);
    CHECK(cfg.optimizer.kind == OptimizerKind::Sgd);
    REQUIRE(cfg.fmr_list.size() == 2);
    CHECK(cfg.fmr_list[1] == doctest::Approx(0.001));
    // Untouched keys keep their defaults.
    CHECK(cfg.layers == 18);
    CHECK(cfg.key_seed == 4242);
}

TEST_CASE("unknown keys and malformed lines report the line number") {
    try {
        ExperimentConfig::parse("subjects = 10\nnonsense_key = 1\n");
        FAIL("expected parse to throw");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
        CHECK(std::string(e.what()).find("nonsense_key") != std::string::npos);
    }
    CHECK_THROWS_AS(ExperimentConfig::parse("subjects 10\n"), std::invalid_argument);
    CHECK_THROWS_AS(ExperimentConfig::parse("subjects = ten\n"), std::invalid_argument);
    CHECK_THROWS_AS(ExperimentConfig::parse("leak = 0.2x\n"), std::invalid_argument);
    CHECK_THROWS_AS(ExperimentConfig::parse("optimizer = rmsprop\n"), std::invalid_argument);
}

TEST_CASE("validation limits") {
    auto with = [](const std::string& text) { return ExperimentConfig::parse(text); };
    CHECK_THROWS_AS(with("layers = 2\n"), std::invalid_argument);
    CHECK_THROWS_AS(with("leak = 1.0\n"), std::invalid_argument);
    CHECK_THROWS_AS(with("lambda_anon = -1\n"), std::invalid_argument);
    CHECK_THROWS_AS(with("learning_rate = 0\n"), std::invalid_argument);
    CHECK_THROWS_AS(with("subjects = 0\n"), std::invalid_argument);
    CHECK_THROWS_AS(with("attack_train_fraction = 1.0\n"), std::invalid_argument);
    CHECK_THROWS_AS(with("fmr_list = 0.5, 2.0\n"), std::invalid_argument);
    CHECK_THROWS_AS(with("robustness_keys = 1\n"), std::invalid_argument);
    CHECK_THROWS_AS(with("band_coarse_end = 9\nband_mid_end = 4\n"), std::invalid_argument);
    // identity_dim must fit inside the mid band.
    CHECK_THROWS_AS(with("layer_dim = 4\nidentity_dim = 32\n"), std::invalid_argument);
}

TEST_CASE("hash tracks content but not the output directory") {
    ExperimentConfig a, b;
    CHECK(a.hash() == b.hash());
    b.out_dir = "elsewhere";
    CHECK(a.hash() == b.hash()); // location does not change the artifacts
    b = a;
    b.dataset_seed += 1;
    CHECK(!(a.hash() == b.hash()));
    b = a;
    b.weights.attribute = 0.16;
    CHECK(!(a.hash() == b.hash()));
}

TEST_CASE("derived option structs mirror the config") {
    ExperimentConfig cfg;
    cfg.subjects = 4;
    const ToyBackendConfig bc = cfg.backend_config();
    CHECK(bc.seed == cfg.backend_seed);
    CHECK(bc.layers == cfg.layers);
    CHECK(bc.dim == cfg.layer_dim);
    CHECK(bc.identity_dim == cfg.identity_dim);
    CHECK(bc.leak == cfg.leak);

    const ProtectOptions opts = cfg.protect_options("s007");
    CHECK(opts.subject_id == "s007");
    CHECK(opts.optimizer.steps == cfg.optimizer.steps);
    CHECK(opts.augmentation.count == cfg.augmentation.count);
    CHECK(opts.config_hash == cfg.hash());
}

TEST_CASE("load reads a file and fails cleanly on a missing one") {
    CHECK_THROWS_AS(ExperimentConfig::load("/nonexistent/famx.cfg"), std::runtime_error);
}
