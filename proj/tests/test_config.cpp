#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "sceneweaver/config.hpp"

using namespace sceneweaver;
namespace fs = std::filesystem;

TEST_CASE("parse_config handles sections, comments and quoting") {
    auto sections = parse_config(
        "# top comment\n"
        "seed = 42\n"
        "\n"
        "[planner]\n"
        "max_iterations = 6   # inline comment\n"
        "\n"
        "[paths]\n"
        "out = \"runs/demo # not a comment\"\n");
    CHECK(sections[""]["seed"] == "42");
    CHECK(sections["planner"]["max_iterations"] == "6");
    CHECK(sections["paths"]["out"] == "runs/demo # not a comment");
}

TEST_CASE("parse_config rejects malformed lines") {
    CHECK_THROWS_AS(parse_config("[planner\nx = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("just words\n"), ConfigError);
}

TEST_CASE("apply overlays every known section onto the defaults") {
    RunConfig cfg;
    cfg.apply(parse_config(
        "seed = 7\n"
        "[planner]\n"
        "max_iterations = 5\n"
        "memory_length = 2\n"
        "stop_threshold = 9\n"
        "confidence_decay = 0.25\n"
        "rollback_drop = 3.5\n"
        "[optimizer]\n"
        "max_steps = 50\n"
        "step_damping = 0.8\n"
        "[gateway]\n"
        "base_url = \"http://example.invalid\"\n"
        "model = \"test-model\"\n"
        "temperature = 0.1\n"
        "max_retries = 5\n"
        "timeout = 30\n"
        "transport = \"mock:/tmp/fixtures\"\n"
        "[paths]\n"
        "catalog = \"cat.json\"\n"
        "library = \"lib\"\n"
        "pretrained = \"pre\"\n"
        "out = \"out\"\n"));
    CHECK(cfg.seed == 7);
    CHECK(cfg.planner.max_iterations == 5);
    CHECK(cfg.planner.memory_length == 2);
    CHECK(cfg.planner.stop_threshold == 9);
    CHECK(cfg.planner.confidence_decay == 0.25);
    CHECK(cfg.planner.rollback_drop == 3.5);
    CHECK(cfg.optim.max_steps == 50);
    CHECK(cfg.optim.step_damping == 0.8);
    CHECK(cfg.gateway.base_url == "http://example.invalid");
    CHECK(cfg.gateway.model == "test-model");
    CHECK(cfg.gateway.temperature == 0.1);
    CHECK(cfg.gateway.max_retries == 5);
    CHECK(cfg.gateway.timeout_seconds == 30.0);
    CHECK(cfg.gateway.transport == TransportKind::mock);
    CHECK(cfg.gateway.fixture_dir == "/tmp/fixtures");
    CHECK(cfg.catalog_path == "cat.json");
    CHECK(cfg.library_dir == "lib");
    CHECK(cfg.pretrained_dir == "pre");
    CHECK(cfg.out_dir == "out");
}

TEST_CASE("transport values beyond live and mock are rejected") {
    RunConfig cfg;
    CHECK_NOTHROW(cfg.apply(parse_config("[gateway]\ntransport = \"live\"\n")));
    CHECK(cfg.gateway.transport == TransportKind::live);
    CHECK_NOTHROW(cfg.apply(parse_config("[gateway]\ntransport = \"mock\"\n")));
    CHECK_THROWS_AS(cfg.apply(parse_config("[gateway]\ntransport = \"carrier-pigeon\"\n")),
                    ConfigError);
}

TEST_CASE("unknown keys and sections are errors, not silent typos") {
    RunConfig cfg;
    CHECK_THROWS_AS(cfg.apply(parse_config("[planner]\nmax_iter = 3\n")), ConfigError);
    CHECK_THROWS_AS(cfg.apply(parse_config("[plannner]\nmax_iterations = 3\n")), ConfigError);
    CHECK_THROWS_AS(cfg.apply(parse_config("[planner]\nmax_iterations = soon\n")), ConfigError);
}

TEST_CASE("from_file loads and from a missing path fails") {
    fs::path p = fs::temp_directory_path() / "sw_config_test.toml";
    std::ofstream(p) << "[planner]\nmax_iterations = 3\n";
    RunConfig cfg = RunConfig::from_file(p.string());
    CHECK(cfg.planner.max_iterations == 3);
    // untouched values keep their defaults
    CHECK(cfg.planner.memory_length == 1);
    CHECK(cfg.optim.max_steps == 100);
    fs::remove(p);
    CHECK_THROWS_AS(RunConfig::from_file(p.string()), ConfigError);
}
