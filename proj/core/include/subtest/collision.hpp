#pragma once

#include <cstdint>
#include <map>
#include <utility>

#include "subtest/distribution.hpp"

namespace subtest {

// Pairwise collision counts from one four-multiset round: self-collisions
// r_p and r_q in the first pair of sample sets, cross-collisions s_pq in
// the second pair. All sets have size m.
struct CollisionCounts {
    int64_t r_p = 0;
    int64_t r_q = 0;
    int64_t s_pq = 0;
    int64_t m = 0;
};

// Number of unordered sample index pairs landing on the same element:
// sum over elements of C(count, 2). O(domain) per the count-array trick.
int64_t self_collisions(const SampleSet& f);

// Number of ordered cross pairs on the same element: sum of
// count_p(e) * count_q(e).
int64_t cross_collisions(const SampleSet& fp, const SampleSet& fq);

// Draws the four fresh size-m multisets of one test round and counts.
CollisionCounts sample_collision_counts(const SamplerHandle& sp, const SamplerHandle& sq,
                                        int64_t m, Rng& rng);

// r - s with r = (2m/(m-1)) (r_p + r_q), s = 2 s_pq. Unbiased for
// m^2 * squared l2 distance between the sampled distributions.
double rs_statistic(const CollisionCounts& c);

// Diagnostic variance envelope c (m^3 b^2 + m^2 b) for the r - s statistic,
// where b bounds both max element probabilities.
double variance_bound(int64_t m, double b, double c);

// Label-free summary of a sample pair: entries[(i, j)] counts the elements
// seen exactly i times in the first set and j times in the second.
// (0, 0) is never stored; unobserved elements are not countable.
struct Fingerprint {
    int64_t s = 0; // max multiplicity bound
    std::map<std::pair<int64_t, int64_t>, int64_t> entries;

    bool operator==(const Fingerprint& other) const = default;
};

Fingerprint fingerprint(const SampleSet& s1, const SampleSet& s2);

// Canonical order for fingerprint cells: lexicographic by (i + j, i)
// ascending. Any fixed total order works; this one is frozen for
// reproducibility.
bool fingerprint_cell_less(std::pair<int64_t, int64_t> a, std::pair<int64_t, int64_t> b);

// Rebuilds a sample pair in standard form: consecutive labels starting at
// element 0, grouped by fingerprint cell in canonical order. domain_size 0
// means "smallest domain that fits"; an explicit domain smaller than the
// number of distinct elements is an error. fingerprint(standard_form(f))
// reproduces f.
std::pair<SampleSet, SampleSet> standard_form(const Fingerprint& f, int64_t domain_size = 0);

} // namespace subtest
