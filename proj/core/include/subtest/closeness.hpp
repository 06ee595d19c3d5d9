#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "subtest/collision.hpp"
#include "subtest/distribution.hpp"

namespace subtest {

// Tester knobs. The constants multiply the asymptotic sample-size and
// repetition formulas; defaults are calibrated once against the Monte Carlo
// harness and then frozen here.
struct TestParams {
    double epsilon = 0.0;
    double delta = 0.0;
    double c_m = 8.0;    // l2 test sample-size constant
    double c_big = 16.0; // l1 test phase-1 sample-size constant
    double c_norm = 4.0; // norm-estimator sample-size constant
    double c_iter = 3.0; // repetition constant (times ln(1/delta))

    void validate() const;
};

// One round of the collision-statistic test.
struct L2Iteration {
    CollisionCounts counts;
    double statistic = 0.0; // r - s
    double threshold = 0.0; // 3 m^2 eps^2 / 4
    bool rejected = false;
};

// Tester outcome plus enough diagnostics to reconstruct the run.
struct Verdict {
    bool accept = false;
    std::string decided_by;  // phase or subtest that settled the outcome
    std::string warning;     // nonempty when a precondition was waived
    int64_t samples_consumed = 0;
    int64_t phase1_samples = 0;  // l1 big-element phase
    int64_t subtest_samples = 0; // collision-statistic phase
    std::vector<L2Iteration> iterations;
    // Scalar decision rule when one applies: the big-element discrepancy
    // against eps M / 8, or the norm estimate against (1 + 3 eps^2/5) / n.
    double decision_statistic = 0.0;
    double decision_threshold = 0.0;
    std::vector<int64_t> big_p, big_q;
};

// Per-round sample count for the l2 test: max(2, ceil(c_m (b^2 +
// eps^2 sqrt(b)) / eps^4)) where b bounds both max element probabilities.
int64_t required_m_l2(double b, double epsilon, double c_m);

// Per-round sample count for the variance-separated l1 test variant
// (calculator only; no verdict path): ceil(c (n^2 p_inf q_inf / eps^4 +
// n sqrt(q_inf) / eps^2)). Requires p_inf <= q_inf.
int64_t required_m_linf_aware(int64_t n, double p_inf, double q_inf, double epsilon, double c);

// Repetition count ceil(c_iter ln(1/delta)), forced odd so majority and
// median verdicts are never tied.
int64_t odd_iteration_count(double delta, double c_iter);

// Acceptance radius of the l1 test on an n-element domain:
// max(eps^{4/3} / (32 n^{1/3}), eps / (4 sqrt(n))).
double l1_gap(int64_t n, double epsilon);

// Collision-statistic closeness test in l2 norm. Runs an odd number of
// independent rounds, each drawing four fresh size-m multisets; a round
// rejects iff r - s > 3 m^2 eps^2 / 4 (strict; ties accept). Majority
// verdict. Distinguishes l2 distance <= eps/2 from > eps.
Verdict l2_distance_test(const SamplerHandle& sp, const SamplerHandle& sq, int64_t m,
                         const TestParams& params, Rng& rng);

// Elements whose empirical count among M draws reaches (1 - eps/26) M b,
// together with the full count array the threshold was applied to.
struct BigElements {
    std::vector<int64_t> elements;
    SampleSet counts;
};

BigElements big_elements(const SamplerHandle& s, int64_t m_draws, double b, double epsilon,
                         Rng& rng);

// Redirects draws landing in `big` to a uniform element of the domain
// (single substitution, no resampling loop).
SamplerHandle filtered_sampler(const SamplerHandle& base, const std::vector<int64_t>& big);

// Two-phase closeness test in l1 norm: direct count comparison on the
// high-probability elements, collision-statistic subtest at eps/(2 sqrt(n))
// on the rest. Distinguishes l1 distance <= l1_gap(n, eps) from > eps.
Verdict l1_distance_test(const SamplerHandle& sp, const SamplerHandle& sq,
                         const TestParams& params, Rng& rng);

struct NormEstimate {
    double value = 0.0;
    int64_t m_per_rep = 0;
    int64_t reps = 0;
    int64_t samples_consumed = 0;
};

// Estimates the squared l2 norm (self-collision probability) to the given
// relative accuracy: median over repetitions of r_p / C(m, 2).
NormEstimate estimate_l2_norm_sq_detailed(const SamplerHandle& s, double accuracy, double delta,
                                          Rng& rng, double c_norm = 4.0, double c_iter = 3.0);
double estimate_l2_norm_sq(const SamplerHandle& s, double accuracy, double delta, Rng& rng,
                           double c_norm = 4.0, double c_iter = 3.0);

// Uniformity test: accept iff the norm estimate at accuracy eps^2/5 is at
// most (1 + 3 eps^2/5) / n. Distinguishes l1 distance to uniform
// <= eps / sqrt(3n) from > eps. Requires eps <= 1.
Verdict uniformity_test(const SamplerHandle& s, const TestParams& params, Rng& rng);

} // namespace subtest
