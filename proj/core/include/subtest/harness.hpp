#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "subtest/closeness.hpp"
#include "subtest/instances.hpp"
#include "subtest/markov.hpp"

namespace subtest {

// Declarative experiment description; everything a run needs, so a report
// embedding its config is reproducible bit for bit.
struct ExperimentConfig {
    std::string tester; // l2 | l1 | uniformity | mixing | almost-mixing | test-mixing

    // Distribution instance (testers l2/l1/uniformity). Generators:
    // uniform | point-mass | disjoint-halves | heavy-light | coin |
    // perturbed-uniform | files.
    std::string instance = "uniform";
    int64_t n = 0;
    double instance_param = 0.0; // coin epsilon, perturbed-uniform l1, ...
    std::string p_path, q_path;

    // Chain instance (markov testers). Generators: complete | cycle |
    // lazy-complete | hybrid | file.
    std::string chain = "complete";
    std::string chain_path;

    TestParams params;
    MixingParams mixing;
    int64_t m_override = 0; // explicit l2 sample size; 0 derives from the oracle b

    int64_t trials = 1;
    uint64_t seed = 0;
    int64_t parallelism = 1;
};

struct ExperimentReport {
    int64_t trials = 0;
    int64_t accepts = 0;
    int64_t rejects = 0;
    double acceptance_rate = 0.0;
    double wilson_low = 0.0;
    double wilson_high = 0.0;

    // Ground truth of the instance under test. For distribution pairs the
    // exact l1/l2 distances; for chains oracle_l1 is the max over states of
    // the l1 distance to the average t-step distribution.
    double oracle_l1 = 0.0;
    double oracle_l2 = 0.0;

    int64_t samples_total = 0;
    int64_t samples_min = 0;
    int64_t samples_max = 0;
    double samples_mean = 0.0;

    double wall_clock_seconds = 0.0; // excluded from determinism comparisons
    ExperimentConfig config;
};

// Wilson 95% score interval for `successes` out of `trials`.
std::pair<double, double> wilson_interval(int64_t successes, int64_t trials);

// Chebyshev tail envelope: min(1, variance / rho^2).
double chebyshev_bound(double variance, double rho);

// Runs `trials` independent tester invocations with per-trial seeds
// derive_seed(seed, trial). The report is independent of parallelism
// degree and execution order.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

// Cross product of per-axis overrides applied to a base config, one report
// per grid point. Axes: epsilon, delta, n, m, t, rho, trials.
struct SweepGrid {
    std::map<std::string, std::vector<double>> axes;
};

std::vector<ExperimentReport> sweep(const ExperimentConfig& base, const SweepGrid& grid);

// Instance resolution shared with the CLI: the distribution pair or chain a
// config denotes, with ground truth attached.
InstancePair resolve_instance_pair(const ExperimentConfig& cfg);
MarkovChain resolve_chain(const ExperimentConfig& cfg);

// Named chain generators used by configs and fixtures.
MarkovChain complete_chain(int64_t n);            // every row uniform over [n]
MarkovChain cycle_chain(int64_t n);               // deterministic shift u -> u+1
MarkovChain lazy_complete_chain(int64_t n);       // 1/2 self-loop + 1/2 uniform
MarkovChain hybrid_chain(int64_t n);              // complete block + one self-loop row

} // namespace subtest
