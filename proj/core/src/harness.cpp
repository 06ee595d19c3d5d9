#include "subtest/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <thread>

#include "subtest/io.hpp"

namespace subtest {

namespace {

struct TrialOutcome {
    bool accept = false;
    int64_t samples = 0;
    std::string error;
};

// Per-trial work shared by all testers: a pure function of the trial seed.
using TrialRunner = std::function<TrialOutcome(uint64_t trial_seed)>;

TrialRunner make_pair_runner(const ExperimentConfig& cfg, const InstancePair& pair) {
    auto sp = std::make_shared<SamplerHandle>(make_sampler(pair.p));
    auto sq = std::make_shared<SamplerHandle>(make_sampler(pair.q));
    TestParams params = cfg.params;

    if (cfg.tester == "l2") {
        int64_t m = cfg.m_override;
        if (m == 0) {
            double b = std::max(exact_linf(pair.p), exact_linf(pair.q));
            m = required_m_l2(b, params.epsilon, params.c_m);
        }
        return [sp, sq, m, params](uint64_t trial_seed) {
            Rng rng(trial_seed);
            Verdict v = l2_distance_test(*sp, *sq, m, params, rng);
            return TrialOutcome{v.accept, v.samples_consumed, {}};
        };
    }
    if (cfg.tester == "l1") {
        return [sp, sq, params](uint64_t trial_seed) {
            Rng rng(trial_seed);
            Verdict v = l1_distance_test(*sp, *sq, params, rng);
            return TrialOutcome{v.accept, v.samples_consumed, {}};
        };
    }
    if (cfg.tester == "uniformity") {
        return [sp, params](uint64_t trial_seed) {
            Rng rng(trial_seed);
            Verdict v = uniformity_test(*sp, params, rng);
            return TrialOutcome{v.accept, v.samples_consumed, {}};
        };
    }
    throw std::invalid_argument("unknown tester: " + cfg.tester);
}

TrialRunner make_chain_runner(const ExperimentConfig& cfg, const MarkovChain& chain) {
    auto m = std::make_shared<MarkovChain>(chain);
    MixingParams params = cfg.mixing;
    StateClosenessTester tester = sampling_closeness_tester(params.closeness);

    if (cfg.tester == "mixing") {
        return [m, params, tester](uint64_t trial_seed) {
            Rng rng(trial_seed);
            Verdict v = mixing_test(*m, params, tester, rng);
            return TrialOutcome{v.accept, v.samples_consumed, {}};
        };
    }
    if (cfg.tester == "almost-mixing") {
        return [m, params, tester](uint64_t trial_seed) {
            Rng rng(trial_seed);
            Verdict v = almost_mixing_test(*m, params, tester, rng);
            return TrialOutcome{v.accept, v.samples_consumed, {}};
        };
    }
    if (cfg.tester == "test-mixing") {
        return [m, params, tester](uint64_t trial_seed) {
            Rng rng(trial_seed);
            Verdict v = property_mixing_test(*m, params, tester, rng);
            return TrialOutcome{v.accept, v.samples_consumed, {}};
        };
    }
    throw std::invalid_argument("unknown tester: " + cfg.tester);
}

bool is_chain_tester(const std::string& tester) {
    return tester == "mixing" || tester == "almost-mixing" || tester == "test-mixing";
}

} // namespace

std::pair<double, double> wilson_interval(int64_t successes, int64_t trials) {
    if (trials <= 0) throw std::invalid_argument("wilson_interval: trials must be >= 1");
    if (successes < 0 || successes > trials)
        throw std::invalid_argument("wilson_interval: successes out of range");
    const double z = 1.959963984540054; // 97.5th normal quantile
    const double nt = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / nt;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nt;
    const double center = (p + z2 / (2.0 * nt)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / nt + z2 / (4.0 * nt * nt)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

double chebyshev_bound(double variance, double rho) {
    if (variance < 0.0) throw std::invalid_argument("chebyshev_bound: variance must be >= 0");
    if (!(rho > 0.0)) throw std::invalid_argument("chebyshev_bound: rho must be > 0");
    return std::min(1.0, variance / (rho * rho));
}

InstancePair resolve_instance_pair(const ExperimentConfig& cfg) {
    if (cfg.instance == "uniform") {
        auto u = uniform_distribution(cfg.n);
        return make_instance_pair(u, u);
    }
    if (cfg.instance == "point-mass") {
        return make_instance_pair(point_mass(cfg.n, 0), uniform_distribution(cfg.n));
    }
    if (cfg.instance == "disjoint-halves") return disjoint_halves_pair(cfg.n);
    if (cfg.instance == "heavy-light") return heavy_light_pair(cfg.n);
    if (cfg.instance == "coin") return biased_coin_pair(cfg.instance_param);
    if (cfg.instance == "perturbed-uniform")
        return perturbed_uniform_pair(cfg.n, cfg.instance_param);
    if (cfg.instance == "files") {
        return make_instance_pair(load_distribution(cfg.p_path),
                                  cfg.q_path.empty() ? load_distribution(cfg.p_path)
                                                     : load_distribution(cfg.q_path));
    }
    throw std::invalid_argument("unknown instance generator: " + cfg.instance);
}

MarkovChain complete_chain(int64_t n) {
    std::vector<std::vector<std::pair<int64_t, double>>> rows(n);
    const double p = 1.0 / static_cast<double>(n);
    for (int64_t u = 0; u < n; ++u)
        for (int64_t v = 0; v < n; ++v) rows[u].push_back({v, p});
    return make_markov_chain(n, std::move(rows));
}

MarkovChain cycle_chain(int64_t n) {
    std::vector<std::vector<std::pair<int64_t, double>>> rows(n);
    for (int64_t u = 0; u < n; ++u) rows[u].push_back({(u + 1) % n, 1.0});
    return make_markov_chain(n, std::move(rows));
}

MarkovChain lazy_complete_chain(int64_t n) {
    std::vector<std::vector<std::pair<int64_t, double>>> rows(n);
    const double p = 0.5 / static_cast<double>(n);
    for (int64_t u = 0; u < n; ++u) {
        for (int64_t v = 0; v < n; ++v) rows[u].push_back({v, u == v ? p + 0.5 : p});
    }
    return make_markov_chain(n, std::move(rows));
}

MarkovChain hybrid_chain(int64_t n) {
    if (n < 3) throw std::invalid_argument("hybrid_chain: n must be >= 3");
    std::vector<std::vector<std::pair<int64_t, double>>> rows(n);
    const double p = 1.0 / static_cast<double>(n - 1);
    for (int64_t u = 0; u + 1 < n; ++u)
        for (int64_t v = 0; v + 1 < n; ++v) rows[u].push_back({v, p});
    rows[n - 1].push_back({n - 1, 1.0}); // isolated deterministic row
    return make_markov_chain(n, std::move(rows));
}

MarkovChain resolve_chain(const ExperimentConfig& cfg) {
    if (cfg.chain == "complete") return complete_chain(cfg.n);
    if (cfg.chain == "cycle") return cycle_chain(cfg.n);
    if (cfg.chain == "lazy-complete") return lazy_complete_chain(cfg.n);
    if (cfg.chain == "hybrid") return hybrid_chain(cfg.n);
    if (cfg.chain == "file") return load_chain(cfg.chain_path);
    throw std::invalid_argument("unknown chain generator: " + cfg.chain);
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
    if (cfg.trials < 1) throw std::invalid_argument("trials must be >= 1");
    const auto t_start = std::chrono::steady_clock::now();

    ExperimentReport report;
    report.config = cfg;
    report.trials = cfg.trials;

    TrialRunner runner;
    if (is_chain_tester(cfg.tester)) {
        MarkovChain chain = resolve_chain(cfg);
        StateDistribution avg = exact_average_t_step(chain, cfg.mixing.t);
        double worst = 0.0;
        for (int64_t u = 0; u < chain.n; ++u)
            worst = std::max(worst,
                             exact_l1_distance(exact_t_step(chain, u, cfg.mixing.t), avg));
        report.oracle_l1 = worst;
        report.oracle_l2 = 0.0;
        runner = make_chain_runner(cfg, chain);
    } else {
        InstancePair pair = resolve_instance_pair(cfg);
        report.oracle_l1 = pair.exact_l1;
        report.oracle_l2 = pair.exact_l2;
        runner = make_pair_runner(cfg, pair);
    }

    std::vector<TrialOutcome> outcomes(cfg.trials);
    const int64_t workers = std::clamp<int64_t>(cfg.parallelism, 1, cfg.trials);
    std::atomic<int64_t> next{0};
    auto work = [&]() {
        for (;;) {
            int64_t i = next.fetch_add(1);
            if (i >= cfg.trials) return;
            try {
                outcomes[i] = runner(derive_seed(cfg.seed, static_cast<uint64_t>(i)));
            } catch (const std::exception& e) {
                outcomes[i].error = e.what();
            }
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int64_t w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }

    report.samples_min = outcomes[0].samples;
    for (int64_t i = 0; i < cfg.trials; ++i) {
        const auto& o = outcomes[i];
        if (!o.error.empty())
            throw std::runtime_error("trial " + std::to_string(i) + " failed: " + o.error);
        report.accepts += o.accept ? 1 : 0;
        report.samples_total += o.samples;
        report.samples_min = std::min(report.samples_min, o.samples);
        report.samples_max = std::max(report.samples_max, o.samples);
    }
    report.rejects = report.trials - report.accepts;
    report.acceptance_rate =
        static_cast<double>(report.accepts) / static_cast<double>(report.trials);
    report.samples_mean =
        static_cast<double>(report.samples_total) / static_cast<double>(report.trials);
    std::tie(report.wilson_low, report.wilson_high) =
        wilson_interval(report.accepts, report.trials);

    report.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return report;
}

std::vector<ExperimentReport> sweep(const ExperimentConfig& base, const SweepGrid& grid) {
    if (grid.axes.empty()) throw std::invalid_argument("sweep: grid must be nonempty");
    for (const auto& [axis, values] : grid.axes)
        if (values.empty())
            throw std::invalid_argument("sweep: axis '" + axis + "' has no values");

    std::vector<ExperimentConfig> configs{base};
    for (const auto& [axis, values] : grid.axes) {
        std::vector<ExperimentConfig> expanded;
        expanded.reserve(configs.size() * values.size());
        for (const auto& cfg : configs) {
            for (double value : values) {
                ExperimentConfig point = cfg;
                if (axis == "epsilon") {
                    point.params.epsilon = value;
                    point.mixing.epsilon = value;
                } else if (axis == "delta") {
                    point.params.delta = value;
                    point.mixing.delta = value;
                } else if (axis == "n") {
                    point.n = static_cast<int64_t>(value);
                } else if (axis == "m") {
                    point.m_override = static_cast<int64_t>(value);
                } else if (axis == "t") {
                    point.mixing.t = static_cast<int64_t>(value);
                } else if (axis == "rho") {
                    point.mixing.rho = value;
                } else if (axis == "trials") {
                    point.trials = static_cast<int64_t>(value);
                } else {
                    throw std::invalid_argument("sweep: unknown axis '" + axis + "'");
                }
                expanded.push_back(std::move(point));
            }
        }
        configs.swap(expanded);
    }

    std::vector<ExperimentReport> reports;
    reports.reserve(configs.size());
    for (const auto& cfg : configs) reports.push_back(run_experiment(cfg));
    return reports;
}

} // namespace subtest
