#include "subtest/closeness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace subtest {

namespace {

int64_t checked_count(double value, const char* what) {
    if (!std::isfinite(value) || value < 0.0 || value > 9e18)
        throw std::invalid_argument(std::string(what) + ": sample count out of range");
    return static_cast<int64_t>(std::ceil(value));
}

} // namespace

void TestParams::validate() const {
    if (!(epsilon > 0.0) || epsilon > 2.0)
        throw std::invalid_argument("epsilon must lie in (0, 2]");
    if (!(delta > 0.0) || delta >= 1.0)
        throw std::invalid_argument("delta must lie in (0, 1)");
    if (!(c_m > 0.0) || !(c_big > 0.0) || !(c_norm > 0.0) || !(c_iter > 0.0))
        throw std::invalid_argument("test constants must be > 0");
}

int64_t required_m_l2(double b, double epsilon, double c_m) {
    if (!(b > 0.0) || b > 1.0) throw std::invalid_argument("required_m_l2: b must lie in (0, 1]");
    if (!(epsilon > 0.0)) throw std::invalid_argument("required_m_l2: epsilon must be > 0");
    if (!(c_m > 0.0)) throw std::invalid_argument("required_m_l2: c_m must be > 0");
    const double e2 = epsilon * epsilon;
    const double m = c_m * (b * b + e2 * std::sqrt(b)) / (e2 * e2);
    return std::max<int64_t>(2, checked_count(m, "required_m_l2"));
}

int64_t required_m_linf_aware(int64_t n, double p_inf, double q_inf, double epsilon, double c) {
    if (n <= 0) throw std::invalid_argument("required_m_linf_aware: n must be positive");
    if (!(p_inf > 0.0) || p_inf > 1.0 || !(q_inf > 0.0) || q_inf > 1.0)
        throw std::invalid_argument("required_m_linf_aware: norms must lie in (0, 1]");
    if (p_inf > q_inf)
        throw std::invalid_argument("required_m_linf_aware: requires p_inf <= q_inf");
    if (!(epsilon > 0.0)) throw std::invalid_argument("required_m_linf_aware: epsilon must be > 0");
    if (!(c > 0.0)) throw std::invalid_argument("required_m_linf_aware: c must be > 0");
    const double nd = static_cast<double>(n);
    const double e2 = epsilon * epsilon;
    const double m = c * (nd * nd * p_inf * q_inf / (e2 * e2) + nd * std::sqrt(q_inf) / e2);
    return std::max<int64_t>(2, checked_count(m, "required_m_linf_aware"));
}

int64_t odd_iteration_count(double delta, double c_iter) {
    if (!(delta > 0.0) || delta >= 1.0) throw std::invalid_argument("delta must lie in (0, 1)");
    if (!(c_iter > 0.0)) throw std::invalid_argument("c_iter must be > 0");
    int64_t iters = checked_count(c_iter * std::log(1.0 / delta), "odd_iteration_count");
    if (iters < 1) iters = 1;
    if (iters % 2 == 0) ++iters;
    return iters;
}

double l1_gap(int64_t n, double epsilon) {
    const double nd = static_cast<double>(n);
    return std::max(std::pow(epsilon, 4.0 / 3.0) / (32.0 * std::cbrt(nd)),
                    epsilon / (4.0 * std::sqrt(nd)));
}

Verdict l2_distance_test(const SamplerHandle& sp, const SamplerHandle& sq, int64_t m,
                         const TestParams& params, Rng& rng) {
    params.validate();
    if (m < 2) throw std::invalid_argument("l2_distance_test requires m >= 2");
    if (sp.n != sq.n) throw std::invalid_argument("l2_distance_test: domain sizes differ");

    const int64_t iters = odd_iteration_count(params.delta, params.c_iter);
    const double md = static_cast<double>(m);
    const double threshold = 0.75 * md * md * params.epsilon * params.epsilon;

    Verdict v;
    v.iterations.reserve(iters);
    int64_t rejections = 0;
    for (int64_t it = 0; it < iters; ++it) {
        CollisionCounts counts = sample_collision_counts(sp, sq, m, rng);
        L2Iteration round{counts, rs_statistic(counts), threshold, false};
        round.rejected = round.statistic > threshold;
        rejections += round.rejected ? 1 : 0;
        v.iterations.push_back(round);
    }
    v.subtest_samples = iters * 4 * m;
    v.samples_consumed = v.subtest_samples;
    v.accept = 2 * rejections < iters;
    v.decided_by = "l2-majority";
    return v;
}

BigElements big_elements(const SamplerHandle& s, int64_t m_draws, double b, double epsilon,
                         Rng& rng) {
    if (m_draws < 1) throw std::invalid_argument("big_elements requires at least one draw");
    if (!(b > 0.0) || b >= 1.0) throw std::invalid_argument("big_elements: b must lie in (0, 1)");
    BigElements out;
    out.counts = draw_sample_set(s, m_draws, rng);
    const double cutoff = (1.0 - epsilon / 26.0) * static_cast<double>(m_draws) * b;
    for (int64_t e = 0; e < out.counts.n(); ++e)
        if (static_cast<double>(out.counts.counts[e]) >= cutoff) out.elements.push_back(e);
    return out;
}

SamplerHandle filtered_sampler(const SamplerHandle& base, const std::vector<int64_t>& big) {
    auto mask = std::make_shared<std::vector<uint8_t>>(base.n, uint8_t{0});
    for (int64_t e : big) {
        if (e < 0 || e >= base.n) throw std::invalid_argument("big element out of domain");
        (*mask)[e] = 1;
    }
    const int64_t n = base.n;
    auto draw = base.draw;
    return SamplerHandle{
        n,
        [draw, mask, n](Rng& rng) {
            int64_t x = draw(rng);
            return (*mask)[x] ? uniform_index(rng, n) : x;
        },
    };
}

Verdict l1_distance_test(const SamplerHandle& sp, const SamplerHandle& sq,
                         const TestParams& params, Rng& rng) {
    params.validate();
    if (sp.n != sq.n) throw std::invalid_argument("l1_distance_test: domain sizes differ");
    const int64_t n = sp.n;
    const double nd = static_cast<double>(n);
    const double eps = params.epsilon;

    Verdict v;
    if (eps < 1.0 / std::sqrt(nd))
        v.warning = "epsilon below 1/sqrt(n); guarantees void, proceeding anyway";

    const double b = std::pow(eps / nd, 2.0 / 3.0);
    const int64_t m_phase1 = checked_count(
        params.c_big * std::pow(eps, -8.0 / 3.0) * std::pow(nd, 2.0 / 3.0) *
            std::log(nd / params.delta),
        "l1_distance_test");

    BigElements big_p = big_elements(sp, m_phase1, b, eps, rng);
    BigElements big_q = big_elements(sq, m_phase1, b, eps, rng);
    v.phase1_samples = 2 * m_phase1;
    v.big_p = big_p.elements;
    v.big_q = big_q.elements;

    std::vector<int64_t> big_union = big_p.elements;
    big_union.insert(big_union.end(), big_q.elements.begin(), big_q.elements.end());
    std::sort(big_union.begin(), big_union.end());
    big_union.erase(std::unique(big_union.begin(), big_union.end()), big_union.end());

    // Collision subtest parameters shared by both branches: error parameter
    // eps/(2 sqrt(n)), sample size from the filtered max-probability bound
    // 2 eps^{2/3} n^{-2/3}, confidence delta/2.
    TestParams sub = params;
    sub.epsilon = eps / (2.0 * std::sqrt(nd));
    sub.delta = params.delta / 2.0;
    const double b_sub = std::min(1.0, 2.0 * std::pow(eps, 2.0 / 3.0) * std::pow(nd, -2.0 / 3.0));
    const int64_t m_sub = required_m_l2(b_sub, sub.epsilon, params.c_m);

    if (big_union.empty()) {
        Verdict sub_verdict = l2_distance_test(sp, sq, m_sub, sub, rng);
        v.accept = sub_verdict.accept;
        v.decided_by = "l2-subtest-raw";
        v.iterations = std::move(sub_verdict.iterations);
        v.subtest_samples = sub_verdict.samples_consumed;
        v.samples_consumed = v.phase1_samples + v.subtest_samples;
        return v;
    }

    double discrepancy = 0.0;
    for (int64_t e : big_union)
        discrepancy += static_cast<double>(
            std::abs(big_p.counts.counts[e] - big_q.counts.counts[e]));
    v.decision_statistic = discrepancy;
    v.decision_threshold = eps * static_cast<double>(m_phase1) / 8.0;
    if (discrepancy > v.decision_threshold) {
        v.accept = false;
        v.decided_by = "big-elements";
        v.samples_consumed = v.phase1_samples;
        return v;
    }

    Verdict sub_verdict = l2_distance_test(filtered_sampler(sp, big_union),
                                           filtered_sampler(sq, big_union), m_sub, sub, rng);
    v.accept = sub_verdict.accept;
    v.decided_by = "l2-subtest-filtered";
    v.iterations = std::move(sub_verdict.iterations);
    v.subtest_samples = sub_verdict.samples_consumed;
    v.samples_consumed = v.phase1_samples + v.subtest_samples;
    return v;
}

NormEstimate estimate_l2_norm_sq_detailed(const SamplerHandle& s, double accuracy, double delta,
                                          Rng& rng, double c_norm, double c_iter) {
    if (!(accuracy > 0.0) || accuracy >= 1.0)
        throw std::invalid_argument("estimate_l2_norm_sq: accuracy must lie in (0, 1)");
    NormEstimate est;
    est.m_per_rep = std::max<int64_t>(
        2, checked_count(c_norm * std::sqrt(static_cast<double>(s.n)) / (accuracy * accuracy),
                         "estimate_l2_norm_sq"));
    est.reps = odd_iteration_count(delta, c_iter);

    std::vector<double> values;
    values.reserve(est.reps);
    const double pairs = 0.5 * static_cast<double>(est.m_per_rep) *
                         static_cast<double>(est.m_per_rep - 1);
    for (int64_t rep = 0; rep < est.reps; ++rep) {
        SampleSet sample = draw_sample_set(s, est.m_per_rep, rng);
        values.push_back(static_cast<double>(self_collisions(sample)) / pairs);
    }
    est.samples_consumed = est.reps * est.m_per_rep;
    std::nth_element(values.begin(), values.begin() + values.size() / 2, values.end());
    est.value = values[values.size() / 2];
    return est;
}

double estimate_l2_norm_sq(const SamplerHandle& s, double accuracy, double delta, Rng& rng,
                           double c_norm, double c_iter) {
    return estimate_l2_norm_sq_detailed(s, accuracy, delta, rng, c_norm, c_iter).value;
}

Verdict uniformity_test(const SamplerHandle& s, const TestParams& params, Rng& rng) {
    params.validate();
    if (params.epsilon > 1.0)
        throw std::invalid_argument("uniformity_test requires epsilon <= 1");
    const double e2 = params.epsilon * params.epsilon;
    NormEstimate est = estimate_l2_norm_sq_detailed(s, e2 / 5.0, params.delta, rng,
                                                    params.c_norm, params.c_iter);
    Verdict v;
    v.subtest_samples = est.samples_consumed;
    v.samples_consumed = est.samples_consumed;
    v.decision_statistic = est.value; // the norm estimate that decided
    v.decision_threshold = (1.0 + 3.0 * e2 / 5.0) / static_cast<double>(s.n);
    v.accept = est.value <= v.decision_threshold;
    v.decided_by = "norm-estimate";
    return v;
}

} // namespace subtest
