#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "oas/errors.hpp"
#include "oas/sweep_io.hpp"

using namespace oas;

namespace {

// Temp file helper: writes content, deletes on scope exit.
struct TempFile {
    std::string path;

    TempFile(std::string name, const std::string& content) : path(std::move(name)) {
        std::ofstream out(path, std::ios::binary);
        out << content;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

} // namespace

TEST_CASE("config text sets every field") {
    const ExperimentConfig config = parse_config_text(
        "source_kind = binary\n"
        "p = 0.5\n"
        "esn0_db = 6\n"
        "n_components = 64\n"
        "compression_ratios = 1, 2, 2.5\n"
        "oversampling_factors = 8, 32\n"
        "policies = worst_component, parallel_asymptotic, orthogonal\n"
        "trials = 500\n"
        "master_seed = 99\n"
        "k_sensors = 8\n");
    CHECK(config.source_kind == SourceKind::Binary);
    CHECK(config.p == 0.5);
    CHECK(config.esn0_db == 6.0);
    CHECK(config.n_components == 64);
    CHECK(config.compression_ratios == std::vector<double>{1.0, 2.0, 2.5});
    CHECK(config.oversampling_factors == std::vector<int>{8, 32});
    CHECK(config.policies == std::vector<Policy>{Policy::WorstComponent,
                                                 Policy::ParallelAsymptotic,
                                                 Policy::Orthogonal});
    CHECK(config.trials == 500);
    CHECK(config.master_seed == 99);
    CHECK(config.k_sensors == 8);
}

TEST_CASE("unset keys keep their defaults") {
    const ExperimentConfig defaults;
    const ExperimentConfig config = parse_config_text("trials = 7\n");
    CHECK(config.trials == 7);
    CHECK(config.source_kind == defaults.source_kind);
    CHECK(config.p == defaults.p);
    CHECK(config.n_components == defaults.n_components);
    CHECK(config.compression_ratios == defaults.compression_ratios);
    CHECK(config.oversampling_factors == defaults.oversampling_factors);
    CHECK(config.policies == defaults.policies);
    CHECK(config.master_seed == defaults.master_seed);
    CHECK(config.k_sensors == defaults.k_sensors);
}

TEST_CASE("comments and blank lines are ignored") {
    const ExperimentConfig config = parse_config_text(
        "# a full comment line\n"
        "\n"
        "   p = 0.8   # trailing comment\n"
        "\t\n");
    CHECK(config.p == 0.8);
}

TEST_CASE("malformed config lines are rejected with their line number") {
    CHECK_THROWS_AS(parse_config_text("p 0.5\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("unknown_key = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("p = zero\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("trials = 10.5\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("policies = worst_component, greedy\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("source_kind = gaussian\n"), ConfigError);
    try {
        parse_config_text("p = 0.5\nbogus = 1\n");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
}

TEST_CASE("config files load from disk") {
    const TempFile file("sweep_io_test_config.cfg", "n_components = 12\ntrials = 3\n");
    const ExperimentConfig config = load_config_file(file.path);
    CHECK(config.n_components == 12);
    CHECK(config.trials == 3);
    CHECK_THROWS_AS(load_config_file("sweep_io_test_missing.cfg"), IoError);
}

TEST_CASE("results csv layout") {
    CellResult ok;
    ok.policy = Policy::WorstComponent;
    ok.compression_ratio = 3.0;
    ok.oversampling = 16;
    ok.ok = true;
    ok.mse = 0.25;
    ok.std_error = 0.0078125;
    ok.slots_per_component = 5.5;
    ok.trials = 100;
    ok.seed = 7;

    CellResult skipped;
    skipped.policy = Policy::Asymptotic;
    skipped.compression_ratio = 1.5;
    skipped.oversampling = 4;
    skipped.ok = false;
    skipped.trials = 100;
    skipped.seed = 9;

    CHECK(results_csv({ok, skipped}) ==
          "policy,c,M,mse,mse_db,stderr,slots_per_component,trials,seed,status\n"
          "worst_component,3,16,0.25,-6.02059991328,0.0078125,5.5,100,7,ok\n"
          "asymptotic,1.5,4,,,,,100,9,skipped\n");

    CHECK_THROWS_AS(results_csv({}), ConfigError);
}

TEST_CASE("overlay files parse and validate") {
    const TempFile file("sweep_io_test_overlay.csv",
                        "compression_ratio,mse_db,label\n"
                        "1.5,-20.5,reference A\n"
                        " 3 , -25 , reference B \n");
    const std::vector<OverlayPoint> points = load_overlay_csv(file.path);
    REQUIRE(points.size() == 2);
    CHECK(points[0].compression_ratio == 1.5);
    CHECK(points[0].mse_db == -20.5);
    CHECK(points[0].label == "reference A");
    CHECK(points[1].compression_ratio == 3.0);
    CHECK(points[1].label == "reference B");

    const TempFile bad_header("sweep_io_test_overlay_bad.csv", "c,mse,label\n1,2,3\n");
    CHECK_THROWS_AS(load_overlay_csv(bad_header.path), ConfigError);
    const TempFile bad_row("sweep_io_test_overlay_row.csv",
                           "compression_ratio,mse_db,label\n1,2\n");
    CHECK_THROWS_AS(load_overlay_csv(bad_row.path), ConfigError);
    CHECK_THROWS_AS(load_overlay_csv("sweep_io_test_overlay_missing.csv"), IoError);
}

TEST_CASE("gnuplot script plots one series per policy and oversampling") {
    CellResult worst;
    worst.policy = Policy::WorstComponent;
    worst.compression_ratio = 3.0;
    worst.oversampling = 16;
    worst.ok = true;
    worst.mse = 0.25;

    CellResult orthogonal;
    orthogonal.policy = Policy::Orthogonal;
    orthogonal.compression_ratio = 3.0;
    orthogonal.oversampling = 1;
    orthogonal.ok = true;
    orthogonal.mse = 0.5;

    CellResult skipped;
    skipped.policy = Policy::Asymptotic;
    skipped.compression_ratio = 3.0;
    skipped.oversampling = 4;
    skipped.ok = false;

    const std::vector<OverlayPoint> overlay{{2.0, -18.0, "reference 'X'"}};
    const std::string script =
        gnuplot_script("results.csv", {worst, orthogonal, skipped}, overlay);

    CHECK(script.find("set datafile separator ','") != std::string::npos);
    CHECK(script.find("strcol(1) eq 'worst_component' && strcol(3) eq '16'") !=
          std::string::npos);
    CHECK(script.find("title 'worst_component M=16'") != std::string::npos);
    // The baseline series drops the meaningless oversampling suffix.
    CHECK(script.find("title 'orthogonal'") != std::string::npos);
    // Skipped cells contribute no series.
    CHECK(script.find("strcol(1) eq 'asymptotic'") == std::string::npos);
    // Overlay points ride along as an inline data block, quotes doubled.
    CHECK(script.find("$overlay_0 << EOD\n2 -18\nEOD") != std::string::npos);
    CHECK(script.find("title 'reference ''X'''") != std::string::npos);
}

TEST_CASE("text files write and fail loudly") {
    const std::string path = "sweep_io_test_out.txt";
    write_text_file(path, "payload\n");
    std::ifstream in(path, std::ios::binary);
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    in.close();
    std::remove(path.c_str());
    CHECK(content == "payload\n");
    CHECK_THROWS_AS(write_text_file("no_such_dir_for_test/out.txt", "x"), IoError);
}
