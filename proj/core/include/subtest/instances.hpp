#pragma once

#include <cstdint>
#include <utility>

#include "subtest/distribution.hpp"

namespace subtest {

// A distribution pair with its oracle-computed distances frozen at
// construction time.
struct InstancePair {
    ExplicitDistribution p;
    ExplicitDistribution q;
    double exact_l1 = 0.0;
    double exact_l2 = 0.0;
};

InstancePair make_instance_pair(ExplicitDistribution p, ExplicitDistribution q);

// Extremal pair at l1 distance exactly 1: n^{2/3} shared heavy elements of
// probability 1/(2 n^{2/3}) on [1, n^{2/3}], plus disjoint light blocks of
// probability 2/n on (n/2, 3n/4] for p and (3n/4, n] for q. Requires n to
// be a perfect cube divisible by 4 so every range is whole; other n are
// rejected rather than rounded.
InstancePair heavy_light_pair(int64_t n);

// Two-coin pair at l2 distance exactly epsilon: (1/2, 1/2) against
// (1/2 - eps/sqrt(2), 1/2 + eps/sqrt(2)). Requires 0 < eps < 1/sqrt(2).
InstancePair biased_coin_pair(double epsilon);

// Draws a Poisson(lambda) sample size, then that many i.i.d. samples.
// Per-element counts are then independent Poisson(lambda * p_i) variables.
SampleSet poissonized_sample(const SamplerHandle& s, double lambda, Rng& rng);

// The two indistinguishability scenarios: case 1 draws both sample sets
// from p, case 2 draws one from p and one from q.
enum class SampleCase { Both_P = 1, P_And_Q = 2 };

std::pair<SampleSet, SampleSet> case_samples(const InstancePair& pair, SampleCase which,
                                             int64_t m, Rng& rng);

// Disjoint uniform halves over [n]: p uniform on the first half, q on the
// second. l1 distance 2, l2 distance 2/sqrt(n).
InstancePair disjoint_halves_pair(int64_t n);

// Uniform against uniform shifted by total l1 distance `l1` (mass l1/2
// moved from element 1 to element 2). Requires l1/2 <= 1/n.
InstancePair perturbed_uniform_pair(int64_t n, double l1);

} // namespace subtest
