#include "subtest/markov.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace subtest {

namespace {

constexpr double kRowSumTolerance = 1e-9;

void check_state(const MarkovChain& m, int64_t u) {
    if (u < 0 || u >= m.n) throw std::invalid_argument("state index out of range");
}

void check_shape_match(const MarkovChain& m1, const MarkovChain& m2) {
    if (m1.n != m2.n) throw std::invalid_argument("chains have different state counts");
}

// One step of the distribution map: out = in * M.
void propagate(const MarkovChain& m, const std::vector<double>& in, std::vector<double>& out) {
    std::fill(out.begin(), out.end(), 0.0);
    for (int64_t u = 0; u < m.n; ++u) {
        const double mass = in[u];
        if (mass == 0.0) continue;
        const auto& row = m.rows[u];
        for (size_t k = 0; k < row.targets.size(); ++k)
            out[row.targets[k]] += mass * row.probs[k];
    }
}

StateDistribution power_from(const MarkovChain& m, std::vector<double> v, int64_t t) {
    std::vector<double> next(m.n, 0.0);
    for (int64_t step = 0; step < t; ++step) {
        propagate(m, v, next);
        v.swap(next);
    }
    return StateDistribution{std::move(v)};
}

} // namespace

int64_t MarkovChain::max_row_nnz() const {
    int64_t best = 0;
    for (const auto& row : rows) best = std::max<int64_t>(best, row.targets.size());
    return best;
}

int64_t MarkovChain::nnz() const {
    int64_t acc = 0;
    for (const auto& row : rows) acc += static_cast<int64_t>(row.targets.size());
    return acc;
}

MarkovChain make_markov_chain(int64_t n,
                              std::vector<std::vector<std::pair<int64_t, double>>> rows) {
    if (n <= 0) throw std::invalid_argument("chain must have a positive state count");
    if (static_cast<int64_t>(rows.size()) != n)
        throw std::invalid_argument("chain needs one row per state");

    MarkovChain m;
    m.n = n;
    m.rows.resize(n);
    for (int64_t u = 0; u < n; ++u) {
        auto& entries = rows[u];
        if (entries.empty())
            throw std::invalid_argument("row " + std::to_string(u + 1) + " is empty");
        std::sort(entries.begin(), entries.end());
        auto& row = m.rows[u];
        double sum = 0.0;
        for (size_t k = 0; k < entries.size(); ++k) {
            auto [v, p] = entries[k];
            if (v < 0 || v >= n)
                throw std::invalid_argument("row " + std::to_string(u + 1) + " targets out of range");
            if (k > 0 && v == row.targets.back())
                throw std::invalid_argument("row " + std::to_string(u + 1) + " has duplicate targets");
            if (!(p >= 0.0) || !std::isfinite(p))
                throw std::invalid_argument("transition probabilities must be finite and >= 0");
            row.targets.push_back(v);
            row.probs.push_back(p);
            sum += p;
            row.cum.push_back(sum);
        }
        if (std::abs(sum - 1.0) > kRowSumTolerance)
            throw std::invalid_argument("row " + std::to_string(u + 1) + " must sum to 1 within 1e-9");
        row.cum.back() = 1.0;
    }
    return m;
}

int64_t next_node(const MarkovChain& m, int64_t u, Rng& rng) {
    check_state(m, u);
    const auto& row = m.rows[u];
    int64_t k = index_from_uniform(row.cum, uniform_unit(rng));
    return row.targets[k];
}

AliasWalker::AliasWalker(const MarkovChain& m) {
    tables_.reserve(m.n);
    targets_.reserve(m.n);
    for (const auto& row : m.rows) {
        tables_.push_back(build_alias_table(row.probs));
        targets_.push_back(row.targets);
    }
}

int64_t AliasWalker::next(int64_t u, Rng& rng) const {
    if (u < 0 || u >= static_cast<int64_t>(tables_.size()))
        throw std::invalid_argument("state index out of range");
    return targets_[u][tables_[u].draw(rng)];
}

int64_t walk(const MarkovChain& m, int64_t u, int64_t t, Rng& rng) {
    check_state(m, u);
    if (t < 0) throw std::invalid_argument("walk length must be >= 0");
    int64_t state = u;
    for (int64_t step = 0; step < t; ++step) state = next_node(m, state, rng);
    return state;
}

SamplerHandle state_walk_sampler(const MarkovChain& m, int64_t u, int64_t t) {
    check_state(m, u);
    if (t < 0) throw std::invalid_argument("walk length must be >= 0");
    auto chain = std::make_shared<const MarkovChain>(m);
    return SamplerHandle{
        m.n,
        [chain, u, t](Rng& rng) { return walk(*chain, u, t, rng); },
    };
}

SamplerHandle average_t_step_sampler(const MarkovChain& m, int64_t t) {
    if (t < 0) throw std::invalid_argument("walk length must be >= 0");
    auto chain = std::make_shared<const MarkovChain>(m);
    const int64_t n = m.n;
    return SamplerHandle{
        n,
        [chain, n, t](Rng& rng) { return walk(*chain, uniform_index(rng, n), t, rng); },
    };
}

StateDistribution exact_t_step(const MarkovChain& m, int64_t u, int64_t t) {
    check_state(m, u);
    if (t < 0) throw std::invalid_argument("walk length must be >= 0");
    std::vector<double> v(m.n, 0.0);
    v[u] = 1.0;
    return power_from(m, std::move(v), t);
}

StateDistribution exact_average_t_step(const MarkovChain& m, int64_t t) {
    if (t < 0) throw std::invalid_argument("walk length must be >= 0");
    // (1/n) sum_u e_u M^t equals the uniform vector propagated t steps.
    std::vector<double> v(m.n, 1.0 / static_cast<double>(m.n));
    return power_from(m, std::move(v), t);
}

void MixingParams::validate(int64_t n) const {
    if (t < 1) throw std::invalid_argument("walk length t must be >= 1");
    if (!(epsilon > 0.0) || epsilon > 2.0)
        throw std::invalid_argument("epsilon must lie in (0, 2]");
    if (!(delta > 0.0) || delta >= 1.0)
        throw std::invalid_argument("delta must lie in (0, 1)");
    if (!(rho > 0.0) || rho >= 1.0) throw std::invalid_argument("rho must lie in (0, 1)");
    if (!(c_loops > 0.0) || !(c_rounds > 0.0))
        throw std::invalid_argument("loop constants must be > 0");
    if (n <= 0) throw std::invalid_argument("chain must have a positive state count");
}

StateClosenessTester sampling_closeness_tester(const TestParams& base) {
    return [base](const MarkovChain& m, int64_t u, int64_t tau, int64_t t_ref, double epsilon,
                  double delta, Rng& rng) {
        TestParams params = base;
        params.epsilon = epsilon;
        params.delta = delta;
        return l1_distance_test(state_walk_sampler(m, u, tau), average_t_step_sampler(m, t_ref),
                                params, rng);
    };
}

StateClosenessTester oracle_closeness_tester() {
    return [](const MarkovChain& m, int64_t u, int64_t tau, int64_t t_ref, double epsilon,
              double /*delta*/, Rng& /*rng*/) {
        Verdict v;
        v.accept = exact_l1_distance(exact_t_step(m, u, tau), exact_average_t_step(m, t_ref)) <=
                   epsilon;
        v.decided_by = "oracle";
        return v;
    };
}

Verdict mixing_test(const MarkovChain& m, const MixingParams& params,
                    const StateClosenessTester& closeness, Rng& rng) {
    params.validate(m.n);
    Verdict v;
    for (int64_t u = 0; u < m.n; ++u) {
        Verdict sub = closeness(m, u, params.t, params.t, params.epsilon,
                                params.delta / static_cast<double>(m.n), rng);
        v.samples_consumed += sub.samples_consumed;
        v.subtest_samples += sub.samples_consumed;
        if (!sub.accept) {
            v.accept = false;
            v.decided_by = "state " + std::to_string(u + 1) + " rejected";
            return v;
        }
    }
    v.accept = true;
    v.decided_by = "all states close";
    return v;
}

Verdict almost_mixing_test(const MarkovChain& m, const MixingParams& params,
                           const StateClosenessTester& closeness, Rng& rng) {
    params.validate(m.n);
    const int64_t rounds = std::max<int64_t>(
        1, static_cast<int64_t>(std::ceil(params.c_rounds / params.rho *
                                          std::log(1.0 / params.delta))));
    Verdict v;
    for (int64_t round = 0; round < rounds; ++round) {
        const int64_t u = uniform_index(rng, m.n);
        Verdict sub = closeness(m, u, params.t, params.t, params.epsilon,
                                params.delta * params.rho, rng);
        v.samples_consumed += sub.samples_consumed;
        v.subtest_samples += sub.samples_consumed;
        if (!sub.accept) {
            v.accept = false;
            v.decided_by = "state " + std::to_string(u + 1) + " rejected (round " +
                           std::to_string(round + 1) + " of " + std::to_string(rounds) + ")";
            return v;
        }
    }
    v.accept = true;
    v.decided_by = "all " + std::to_string(rounds) + " sampled states close";
    return v;
}

Verdict property_mixing_test(const MarkovChain& m, const MixingParams& params,
                             const StateClosenessTester& closeness, Rng& rng) {
    params.validate(m.n);
    const int64_t k =
        std::max<int64_t>(1, static_cast<int64_t>(std::ceil(params.c_loops / params.epsilon)));
    const double conf_walk = 1.0 / (6.0 * static_cast<double>(params.t));
    const double conf_horizon = 1.0 / (3.0 * static_cast<double>(params.t));

    std::vector<int64_t> starts;
    starts.reserve(2 * k);
    for (int64_t i = 0; i < k; ++i) starts.push_back(uniform_index(rng, m.n));
    SamplerHandle avg = average_t_step_sampler(m, params.t);
    for (int64_t i = 0; i < k; ++i) starts.push_back(avg.draw(rng));

    Verdict v;
    auto run_check = [&](int64_t u, int64_t tau, double conf) {
        Verdict sub = closeness(m, u, tau, params.t, params.epsilon, conf, rng);
        v.samples_consumed += sub.samples_consumed;
        v.subtest_samples += sub.samples_consumed;
        return sub.accept;
    };

    for (size_t i = 0; i < starts.size(); ++i) {
        const int64_t start = starts[i];
        for (int64_t w = 0; w < k; ++w) {
            int64_t u = start;
            for (int64_t j = 0; j < 2 * params.t; ++j) {
                u = next_node(m, u, rng);
                if (!run_check(u, params.t, conf_walk)) {
                    v.accept = false;
                    v.decided_by = "walk from start " + std::to_string(start + 1) +
                                   " visited far state " + std::to_string(u + 1);
                    return v;
                }
            }
        }
        for (int64_t tau = params.t; tau <= 2 * params.t; ++tau) {
            if (!run_check(start, tau, conf_horizon)) {
                v.accept = false;
                v.decided_by = "start " + std::to_string(start + 1) + " far at horizon " +
                               std::to_string(tau);
                return v;
            }
        }
    }
    v.accept = true;
    v.decided_by = "all sampled walks and horizons close";
    return v;
}

std::vector<double> bad_visit_probability(const MarkovChain& m,
                                          const std::vector<uint8_t>& bad, int64_t steps) {
    if (static_cast<int64_t>(bad.size()) != m.n)
        throw std::invalid_argument("bad-state mask size mismatch");
    // hit[u] = P(walk of length `remaining` from u visits a bad state),
    // computed backwards with bad states absorbing.
    std::vector<double> hit(m.n, 0.0);
    for (int64_t u = 0; u < m.n; ++u)
        if (bad[u]) hit[u] = 1.0;
    std::vector<double> next(m.n, 0.0);
    for (int64_t step = 0; step < steps; ++step) {
        for (int64_t u = 0; u < m.n; ++u) {
            if (bad[u]) {
                next[u] = 1.0;
                continue;
            }
            const auto& row = m.rows[u];
            double acc = 0.0;
            for (size_t kk = 0; kk < row.targets.size(); ++kk)
                acc += row.probs[kk] * hit[row.targets[kk]];
            next[u] = acc;
        }
        hit.swap(next);
    }
    return hit;
}

std::vector<StateClass> classify_states_exact(const MarkovChain& m, int64_t t, double epsilon) {
    if (t < 1) throw std::invalid_argument("walk length t must be >= 1");
    const StateDistribution avg = exact_average_t_step(m, t);

    // Pass 1: normality from the t-step distances.
    std::vector<uint8_t> bad(m.n, 0);
    std::vector<StateDistribution> at_t(m.n);
    for (int64_t u = 0; u < m.n; ++u) {
        at_t[u] = exact_t_step(m, u, t);
        if (exact_l1_distance(at_t[u], avg) > epsilon) bad[u] = 1;
    }

    std::vector<double> hit = bad_visit_probability(m, bad, 2 * t);

    std::vector<StateClass> classes(m.n, StateClass::Bad);
    for (int64_t u = 0; u < m.n; ++u) {
        if (bad[u]) continue;
        classes[u] = StateClass::Normal;
        if (hit[u] > epsilon) continue;
        bool close_at_all_horizons = true;
        StateDistribution dist = at_t[u];
        std::vector<double> scratch(m.n, 0.0);
        for (int64_t tau = t; tau <= 2 * t; ++tau) {
            if (tau > t) {
                propagate(m, dist.probs, scratch);
                dist.probs.swap(scratch);
            }
            if (exact_l1_distance(dist, avg) > epsilon) {
                close_at_all_horizons = false;
                break;
            }
        }
        if (close_at_all_horizons) classes[u] = StateClass::Smooth;
    }
    return classes;
}

StateClass classify_state_exact(const MarkovChain& m, int64_t u, int64_t t, double epsilon) {
    check_state(m, u);
    return classify_states_exact(m, t, epsilon)[u];
}

MarkovChain repair_chain(const MarkovChain& m, int64_t t, double epsilon) {
    std::vector<StateClass> classes = classify_states_exact(m, t, epsilon);
    int64_t target = -1;
    for (int64_t u = 0; u < m.n; ++u) {
        if (classes[u] == StateClass::Smooth) {
            target = u;
            break;
        }
    }
    if (target < 0) throw std::invalid_argument("repair_chain: chain has no smooth state");

    MarkovChain out = m;
    for (int64_t u = 0; u < m.n; ++u) {
        if (classes[u] != StateClass::Bad) continue;
        out.rows[u] = MarkovChain::Row{{target}, {1.0}, {1.0}};
    }
    return out;
}

ChainDelta chain_delta(const MarkovChain& m1, const MarkovChain& m2, int64_t t) {
    check_shape_match(m1, m2);
    const int64_t d = std::max(m1.max_row_nnz(), m2.max_row_nnz());

    int64_t differing = 0;
    for (int64_t u = 0; u < m1.n; ++u) {
        const auto& a = m1.rows[u];
        const auto& b = m2.rows[u];
        size_t i = 0, j = 0;
        while (i < a.targets.size() || j < b.targets.size()) {
            if (j == b.targets.size() ||
                (i < a.targets.size() && a.targets[i] < b.targets[j])) {
                ++differing;
                ++i;
            } else if (i == a.targets.size() || b.targets[j] < a.targets[i]) {
                ++differing;
                ++j;
            } else {
                if (a.probs[i] != b.probs[j]) ++differing;
                ++i;
                ++j;
            }
        }
    }

    ChainDelta delta;
    delta.entry_fraction =
        static_cast<double>(differing) / (static_cast<double>(d) * static_cast<double>(m1.n));
    delta.avg_dist = exact_l1_distance(exact_average_t_step(m1, t), exact_average_t_step(m2, t));
    return delta;
}

} // namespace subtest
