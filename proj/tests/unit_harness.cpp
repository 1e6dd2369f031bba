#include "pebblewalk/harness.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>

using namespace pw;

TEST_CASE("chi-square: uniform data passes, skewed data fails") {
    std::vector<std::uint64_t> uniform = {1020, 980, 1003, 997};
    std::vector<double> probs = {0.25, 0.25, 0.25, 0.25};
    const auto ok = chi_square_gof(uniform, probs);
    CHECK(ok.df == 3);
    CHECK(ok.p_value > 0.01);
    CHECK_FALSE(ok.degenerate);

    std::vector<std::uint64_t> skewed = {3000, 400, 300, 300};
    const auto bad = chi_square_gof(skewed, probs);
    CHECK(bad.p_value < 1e-9);
}

TEST_CASE("chi-square pools low-expectation bins") {
    std::vector<std::uint64_t> obs = {500, 498, 1, 0, 1};
    std::vector<double> probs = {0.499, 0.499, 0.001, 0.0005, 0.0005};
    const auto res = chi_square_gof(obs, probs);
    CHECK(res.bins_pooled == 3);
    CHECK(res.bins_used == 3);  // two big bins plus the pooled one
    CHECK(res.p_value > 0.001);
}

TEST_CASE("chi-square degenerates on a single surviving bin") {
    std::vector<std::uint64_t> obs = {4, 0};
    std::vector<double> probs = {0.999, 0.001};
    const auto res = chi_square_gof(obs, probs);
    CHECK(res.degenerate);
    CHECK(res.p_value == 1.0);
}

TEST_CASE("walk sampler draws the exact distribution") {
    const WalkSpec w = WalkSpec::simple(3);
    const WalkSampler sampler(w);
    RngStream rng(2718);
    std::vector<std::uint64_t> counts(w.steps().size(), 0);
    const std::uint64_t draws = 120000;
    for (std::uint64_t i = 0; i < draws; ++i) counts[sampler.sample_index(rng)] += 1;
    std::vector<double> probs;
    for (const auto& s : w.steps()) probs.push_back(s.weight.convert_to<double>());
    const auto chi = chi_square_gof(counts, probs);
    CHECK(chi.p_value > 0.001);

    // Determinism: same seed, same draw sequence.
    RngStream r1(5), r2(5);
    for (int i = 0; i < 1000; ++i) CHECK(sampler.sample_index(r1) == sampler.sample_index(r2));
}

TEST_CASE("decade checkpoints") {
    CHECK(decade_checkpoints(0) == std::vector<std::uint64_t>{0});
    CHECK(decade_checkpoints(1) == std::vector<std::uint64_t>{1});
    CHECK(decade_checkpoints(10000) ==
          std::vector<std::uint64_t>{1, 10, 100, 1000, 10000});
    CHECK(decade_checkpoints(2500) == std::vector<std::uint64_t>{1, 10, 100, 1000, 2500});
}

TEST_CASE("seed resolution order: flag, env, default") {
    unsetenv("PEBBLEWALK_SEED");
    const auto def = resolve_master_seed(std::nullopt);
    CHECK(def.source == "default");
    CHECK(def.seed == RngStream::kDefaultSeed);

    setenv("PEBBLEWALK_SEED", "12345", 1);
    const auto env = resolve_master_seed(std::nullopt);
    CHECK(env.source == "env");
    CHECK(env.seed == 12345);

    const auto flag = resolve_master_seed(777);
    CHECK(flag.source == "flag");
    CHECK(flag.seed == 777);

    setenv("PEBBLEWALK_SEED", "junk", 1);
    CHECK_THROWS_AS(resolve_master_seed(std::nullopt), Error);
    unsetenv("PEBBLEWALK_SEED");
}

TEST_CASE("coverage: zero budget covers exactly the origin") {
    CoverageConfig cfg;
    cfg.program = "z2";
    cfg.radius = 2;
    cfg.budget = 0;
    cfg.trials = 3;
    const Json rep = coverage_experiment(cfg);
    CHECK(rep["results"]["ball_cells"] == 13);
    CHECK(rep["results"]["table"][0]["mean_coverage"].get<double>() ==
          doctest::Approx(1.0 / 13.0));
}

TEST_CASE("coverage is monotone in the budget per trial") {
    CoverageConfig cfg;
    cfg.program = "z2";
    cfg.radius = 3;
    cfg.budget = 10000;
    cfg.trials = 20;
    const Json rep = coverage_experiment(cfg);
    for (const auto& trial : rep["results"]["trials"]) {
        double prev = 0;
        for (const auto& frac : trial["coverage"]) {
            CHECK(frac.get<double>() >= prev);
            prev = frac.get<double>();
        }
    }
    // At radius 3 with a 1e4-step budget every trial should finish the ball.
    CHECK(rep["results"]["table"].back()["full_coverage_fraction"].get<double>() == 1.0);
}

TEST_CASE("coverage guards infeasible grids upfront") {
    CoverageConfig cfg;
    cfg.program = "z8";
    cfg.radius = 50;
    cfg.trials = 100000;
    cfg.budget = 10;
    cfg.cell_trial_cap = 1000000;
    CHECK_THROWS_AS(coverage_experiment(cfg), Error);
}

TEST_CASE("returns: Z^1 empirical CDF tracks the exact first-return law") {
    ReturnConfig cfg;
    cfg.target = "simple-z1";
    cfg.budget = 10000;
    cfg.trials = 4000;
    cfg.seed = {424242, "flag"};
    const Json rep = return_experiment(cfg);

    const auto cdf = first_return_cdf(WalkSpec::simple(1), 100);
    const double exact100 = cdf[100].convert_to<double>();
    double emp100 = 0;
    for (const auto& row : rep["results"]["table"]) {
        if (row["budget"] == 100) emp100 = row["return_frequency"].get<double>();
    }
    const double sigma = std::sqrt(exact100 * (1 - exact100) / static_cast<double>(cfg.trials));
    CHECK(std::abs(emp100 - exact100) < 3 * sigma + 1e-9);

    // Frequencies are non-decreasing in the budget (nested events).
    double prev = 0;
    for (const auto& row : rep["results"]["table"]) {
        CHECK(row["return_frequency"].get<double>() >= prev);
        prev = row["return_frequency"].get<double>();
    }
    // The exact partial-sum lower bound is reported for simple walks.
    CHECK(rep["results"]["exact"]["return_probability_lower_bound"].get<double>() > 0.9);
}

TEST_CASE("returns work for programs too") {
    ReturnConfig cfg;
    cfg.target = "z2";
    cfg.budget = 2000;
    cfg.trials = 200;
    const Json rep = return_experiment(cfg);
    CHECK(rep["results"]["return_frequency"].get<double>() > 0.5);
}

TEST_CASE("distribution experiment: z2 law at a small checkpoint") {
    CompareConfig cfg;
    cfg.target = "z2";
    cfg.checkpoint = 6;
    cfg.trials = 20000;
    cfg.seed = {99, "flag"};
    const Json rep = distribution_experiment(cfg);
    CHECK(rep["results"]["chi_square"]["p_value"].get<double>() > 0.001);
    CHECK(rep["results"]["off_support_samples"] == 0);
    CHECK(rep["results"]["dropped_trials"] == 0);
}

TEST_CASE("distribution experiment: checkpoint zero is skipped") {
    CompareConfig cfg;
    cfg.target = "z2";
    cfg.checkpoint = 0;
    cfg.trials = 10;
    const Json rep = distribution_experiment(cfg);
    CHECK(rep["results"]["skipped"] == true);
}

TEST_CASE("distribution experiment: z4 pebble marginal") {
    CompareConfig cfg;
    cfg.target = "z4-pebble";
    cfg.checkpoint = 4;
    cfg.trials = 20000;
    cfg.step_cap = 30000;
    cfg.seed = {7, "flag"};
    const Json rep = distribution_experiment(cfg);
    CHECK(rep["results"]["chi_square"]["p_value"].get<double>() > 0.001);
    CHECK(rep["results"]["samples"].get<std::uint64_t>() > 5000);
}

TEST_CASE("simulate: zero budget and export round trip") {
    SimulateConfig cfg;
    cfg.program = "z2";
    cfg.budget = 0;
    const Json rep = simulate_once(cfg);
    CHECK(rep["results"]["visited_cells"] == 1);
    CHECK(rep["results"]["steps"] == 0);

    // Export the program and replay the file: identical trajectory.
    SimulateConfig live;
    live.program = "z4";
    live.budget = 5000;
    live.seed = {31415, "flag"};
    live.export_path = "/tmp/pw_export_z4.aut";
    const Json a = simulate_once(live);

    SimulateConfig replay;
    replay.program = "/tmp/pw_export_z4.aut";
    replay.budget = 5000;
    replay.seed = {31415, "flag"};
    const Json b = simulate_once(replay);
    CHECK(a["results"]["final_position"] == b["results"]["final_position"]);
    CHECK(a["results"]["visited_cells"] == b["results"]["visited_cells"]);
    CHECK(a["results"]["pebble_moves"] == b["results"]["pebble_moves"]);
}

TEST_CASE("reports serialize deterministically") {
    CoverageConfig cfg;
    cfg.program = "z2";
    cfg.radius = 2;
    cfg.budget = 1000;
    cfg.trials = 5;
    const std::string a = coverage_experiment(cfg).dump(2);
    const std::string b = coverage_experiment(cfg).dump(2);
    CHECK(a == b);
}

TEST_CASE("csv projection uses the aggregate table") {
    CoverageConfig cfg;
    cfg.program = "z2";
    cfg.radius = 2;
    cfg.budget = 100;
    cfg.trials = 4;
    const Json rep = coverage_experiment(cfg);
    const std::string csv = report_to_csv(rep);
    CHECK(csv.find("checkpoint") != std::string::npos);
    CHECK(csv.find("mean_coverage") != std::string::npos);
    const auto lines = std::count(csv.begin(), csv.end(), '\n');
    CHECK(lines == static_cast<long>(rep["results"]["table"].size()) + 1);
}
