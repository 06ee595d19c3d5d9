#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "subtest/rng.hpp"

namespace subtest {

// Absolute tolerance on probability sums. Inputs off by more than this are
// rejected; nothing is ever renormalized silently.
inline constexpr double kProbSumTolerance = 1e-9;

// Dense probability vector over a domain of n elements. Elements are
// 0-indexed internally; file formats and messages use 1-indexed labels.
struct ExplicitDistribution {
    std::vector<double> probs;

    int64_t size() const { return static_cast<int64_t>(probs.size()); }
};

// Validating constructor: entries nonnegative, sum within kProbSumTolerance
// of one. Throws std::invalid_argument otherwise.
ExplicitDistribution make_distribution(std::vector<double> probs);

// Explicit-renormalization constructor for nonnegative weight vectors.
ExplicitDistribution normalize_weights(std::vector<double> weights);

ExplicitDistribution uniform_distribution(int64_t n);
ExplicitDistribution point_mass(int64_t n, int64_t element);

// Exact oracles. All throw std::invalid_argument on a domain-size mismatch.
double exact_l1_distance(const ExplicitDistribution& p, const ExplicitDistribution& q);
double exact_l2_distance(const ExplicitDistribution& p, const ExplicitDistribution& q);
double exact_linf(const ExplicitDistribution& p);
double exact_collision_probability(const ExplicitDistribution& p, const ExplicitDistribution& q);
double exact_l2_norm_sq(const ExplicitDistribution& p);

// Black-box access to a distribution: the only interface the testers get.
// `draw` returns one 0-indexed element; identical seed and draw sequence
// give identical outputs.
struct SamplerHandle {
    int64_t n = 0;
    std::function<int64_t(Rng&)> draw;

    int64_t operator()(Rng& rng) const { return draw(rng); }
};

// Maps a uniform variate to an element via the cumulative sums. A variate
// exactly equal to a boundary maps to the higher-indexed element.
int64_t index_from_uniform(std::span<const double> cumsum, double u);

// Inverse-CDF sampler over precomputed cumulative sums (binary search).
SamplerHandle make_sampler(const ExplicitDistribution& p);

// Walker alias table; draws in O(1). Same distribution as make_sampler,
// different variate consumption per draw.
struct AliasTable {
    std::vector<double> threshold;
    std::vector<int64_t> alias;

    int64_t draw(Rng& rng) const;
};

AliasTable build_alias_table(std::span<const double> probs);
SamplerHandle make_alias_sampler(const ExplicitDistribution& p);

// Multiset of draws stored as dense per-element counts.
struct SampleSet {
    std::vector<int64_t> counts;
    int64_t total = 0;

    int64_t n() const { return static_cast<int64_t>(counts.size()); }
    void add(int64_t element) { ++counts[element]; ++total; }
};

SampleSet empty_sample_set(int64_t n);
SampleSet draw_sample_set(const SamplerHandle& s, int64_t m, Rng& rng);

// Empirical frequencies of a sample set as a (possibly invalid: m=0)
// distribution-shaped vector.
std::vector<double> empirical_frequencies(const SampleSet& s);

} // namespace subtest
