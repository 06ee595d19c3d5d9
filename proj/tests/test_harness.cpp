#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "subtest/collision.hpp"
#include "subtest/harness.hpp"
#include "test_util.hpp"

using namespace subtest;

namespace {

ExperimentConfig l2_config(std::string instance, int64_t n, double eps, double delta,
                           int64_t trials, uint64_t seed) {
    ExperimentConfig cfg;
    cfg.tester = "l2";
    cfg.instance = std::move(instance);
    cfg.n = n;
    cfg.params.epsilon = eps;
    cfg.params.delta = delta;
    cfg.trials = trials;
    cfg.seed = seed;
    return cfg;
}

bool reports_equal_modulo_clock(const ExperimentReport& a, const ExperimentReport& b) {
    return a.trials == b.trials && a.accepts == b.accepts && a.rejects == b.rejects &&
           a.acceptance_rate == b.acceptance_rate && a.wilson_low == b.wilson_low &&
           a.wilson_high == b.wilson_high && a.oracle_l1 == b.oracle_l1 &&
           a.oracle_l2 == b.oracle_l2 && a.samples_total == b.samples_total &&
           a.samples_min == b.samples_min && a.samples_max == b.samples_max;
}

} // namespace

TEST_CASE("wilson interval") {
    auto [low, high] = wilson_interval(0, 10);
    CHECK(low == 0.0);
    CHECK(high < 0.35);

    auto [l2, h2] = wilson_interval(10, 10);
    CHECK(h2 == doctest::Approx(1.0));
    CHECK(l2 > 0.65);

    auto [l3, h3] = wilson_interval(50, 100);
    CHECK(l3 == doctest::Approx(0.4038).epsilon(0.01));
    CHECK(h3 == doctest::Approx(0.5962).epsilon(0.01));

    CHECK_THROWS_AS(wilson_interval(5, 0), std::invalid_argument);
    CHECK_THROWS_AS(wilson_interval(11, 10), std::invalid_argument);
}

TEST_CASE("chebyshev bound") {
    CHECK(chebyshev_bound(0.0, 1.0) == 0.0);
    CHECK(chebyshev_bound(1.0, 2.0) == 0.25);
    CHECK(chebyshev_bound(9.0, 1.0) == 1.0); // capped
    CHECK_THROWS_AS(chebyshev_bound(-1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(chebyshev_bound(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("chebyshev bound dominates the empirical tail of the r-s statistic") {
    auto s = make_sampler(uniform_distribution(100));
    const int64_t m = 100, trials = 20000;
    Rng rng(401);
    std::vector<double> values;
    values.reserve(trials);
    for (int64_t i = 0; i < trials; ++i)
        values.push_back(rs_statistic(sample_collision_counts(s, s, m, rng)));

    const double var = testutil::variance(values);
    const double mu = testutil::mean(values);
    for (double rho : {0.5 * std::sqrt(var), 2.0 * std::sqrt(var), 4.0 * std::sqrt(var)}) {
        int64_t outside = 0;
        for (double v : values)
            if (std::abs(v - mu) >= rho) ++outside;
        double tail = static_cast<double>(outside) / static_cast<double>(trials);
        CHECK(tail <= chebyshev_bound(var, rho) + 0.01);
    }

    // The printed envelope with c=10 also dominates the empirical variance.
    CHECK(var <= variance_bound(m, 0.01, 10.0));
}

TEST_CASE("single-trial experiments have 0/1 rates") {
    auto report = run_experiment(l2_config("uniform", 20, 0.5, 0.2, 1, 1));
    CHECK((report.acceptance_rate == 0.0 || report.acceptance_rate == 1.0));
    CHECK(report.accepts + report.rejects == report.trials);
}

TEST_CASE("experiments are reproducible and parallelism-independent") {
    ExperimentConfig cfg = l2_config("disjoint-halves", 60, 0.25, 0.2, 24, 99);

    auto serial = run_experiment(cfg);
    auto again = run_experiment(cfg);
    CHECK(reports_equal_modulo_clock(serial, again));

    cfg.parallelism = 4;
    auto parallel = run_experiment(cfg);
    CHECK(reports_equal_modulo_clock(serial, parallel));
}

TEST_CASE("experiment reports carry oracle distances and sample stats") {
    auto report = run_experiment(l2_config("disjoint-halves", 100, 0.19, 0.1, 10, 5));
    CHECK(report.oracle_l2 == doctest::Approx(0.2));
    CHECK(report.oracle_l1 == doctest::Approx(2.0));
    CHECK(report.samples_min > 0);
    CHECK(report.samples_total ==
          report.samples_mean * static_cast<double>(report.trials));
    // Far pair below its distance: overwhelming rejection.
    CHECK(report.acceptance_rate < 0.2);
    CHECK(report.wilson_low <= 0.1);
}

TEST_CASE("identical-sampler l1 experiment accepts within the guarantee") {
    ExperimentConfig cfg;
    cfg.tester = "l1";
    cfg.instance = "uniform";
    cfg.n = 64;
    cfg.params.epsilon = 0.5;
    cfg.params.delta = 0.1;
    cfg.trials = 40;
    cfg.seed = 17;
    cfg.parallelism = 2;
    auto report = run_experiment(cfg);
    CHECK(report.acceptance_rate >= 1.0 - cfg.params.delta - 0.05);
    CHECK(report.wilson_high >= 1.0 - cfg.params.delta);
}

TEST_CASE("uniformity experiment on a point mass rejects") {
    ExperimentConfig cfg;
    cfg.tester = "uniformity";
    cfg.instance = "point-mass";
    cfg.n = 100;
    cfg.params.epsilon = 0.5;
    cfg.params.delta = 0.1;
    cfg.trials = 20;
    cfg.seed = 23;
    auto report = run_experiment(cfg);
    CHECK(report.acceptance_rate == 0.0);
    CHECK(report.wilson_low <= cfg.params.delta);
}

TEST_CASE("mixing experiment routes through the chain resolver") {
    ExperimentConfig cfg;
    cfg.tester = "mixing";
    cfg.chain = "complete";
    cfg.n = 10;
    cfg.mixing = MixingParams{};
    cfg.mixing.t = 1;
    cfg.mixing.epsilon = 0.5;
    cfg.mixing.delta = 0.1;
    cfg.trials = 3;
    cfg.seed = 31;
    auto report = run_experiment(cfg);
    CHECK(report.acceptance_rate == 1.0);
    CHECK(report.oracle_l1 == doctest::Approx(0.0));
}

TEST_CASE("sweep with a single point matches run_experiment") {
    ExperimentConfig cfg = l2_config("uniform", 30, 0.4, 0.2, 8, 44);
    SweepGrid grid;
    grid.axes["epsilon"] = {0.4};
    auto reports = sweep(cfg, grid);
    REQUIRE(reports.size() == 1);
    CHECK(reports_equal_modulo_clock(reports[0], run_experiment(cfg)));
}

TEST_CASE("epsilon sweep on a fixed far pair has monotone rejection") {
    // Rejection rate is nondecreasing as epsilon falls below the true
    // distance (0.2 for disjoint halves of n=100).
    ExperimentConfig cfg = l2_config("disjoint-halves", 100, 0.0, 0.1, 20, 55);
    SweepGrid grid;
    grid.axes["epsilon"] = {0.19, 0.15, 0.1, 0.05};
    auto reports = sweep(cfg, grid);
    REQUIRE(reports.size() == 4);
    for (size_t i = 1; i < reports.size(); ++i)
        CHECK(reports[i].rejects >= reports[i - 1].rejects);
    CHECK(reports.back().rejects == 20);
}

TEST_CASE("sweep rejects an empty grid") {
    ExperimentConfig cfg = l2_config("uniform", 10, 0.5, 0.2, 1, 1);
    CHECK_THROWS_AS(sweep(cfg, SweepGrid{}), std::invalid_argument);
    SweepGrid empty_axis;
    empty_axis.axes["epsilon"] = {};
    CHECK_THROWS_AS(sweep(cfg, empty_axis), std::invalid_argument);
    SweepGrid bad_axis;
    bad_axis.axes["flux"] = {1.0};
    CHECK_THROWS_AS(sweep(cfg, bad_axis), std::invalid_argument);
}

TEST_CASE("instance resolution rejects unknown generators") {
    ExperimentConfig cfg = l2_config("mystery", 10, 0.5, 0.2, 1, 1);
    CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);
    cfg.instance = "uniform";
    cfg.tester = "warp";
    CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);
    cfg.tester = "l2";
    cfg.trials = 0;
    CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);
}
