#pragma once

#include <cmath>
#include <numeric>
#include <vector>

#include "subtest/distribution.hpp"

namespace subtest::testutil {

inline double mean(const std::vector<double>& xs) {
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

inline double variance(const std::vector<double>& xs) {
    const double mu = mean(xs);
    double acc = 0.0;
    for (double x : xs) acc += (x - mu) * (x - mu);
    return acc / static_cast<double>(xs.size() - 1);
}

inline double pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
    const double mx = mean(xs), my = mean(ys);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

// l1 distance between empirical frequencies and an explicit distribution.
inline double empirical_l1(const SampleSet& sample, const ExplicitDistribution& p) {
    double acc = 0.0;
    for (int64_t i = 0; i < p.size(); ++i) {
        double freq = sample.total ? static_cast<double>(sample.counts[i]) /
                                         static_cast<double>(sample.total)
                                   : 0.0;
        acc += std::abs(freq - p.probs[i]);
    }
    return acc;
}

// l1 distance between two empirical frequency vectors over the same domain.
inline double two_sample_l1(const SampleSet& a, const SampleSet& b) {
    double acc = 0.0;
    for (int64_t i = 0; i < a.n(); ++i) {
        acc += std::abs(static_cast<double>(a.counts[i]) / static_cast<double>(a.total) -
                        static_cast<double>(b.counts[i]) / static_cast<double>(b.total));
    }
    return acc;
}

// Upper chi-square quantile via the Wilson-Hilferty cube approximation;
// plenty accurate for the dozens of degrees of freedom used here.
inline double chi_square_critical(int64_t dof, double significance) {
    const double z = significance == 0.01   ? 2.3263478740408408
                     : significance == 0.05 ? 1.6448536269514722
                                            : 0.0;
    const double k = static_cast<double>(dof);
    const double term = 1.0 - 2.0 / (9.0 * k) + z * std::sqrt(2.0 / (9.0 * k));
    return k * term * term * term;
}

// Random distribution with exponential-ish weights; spreads mass unevenly
// without extreme skew.
inline ExplicitDistribution random_distribution(int64_t n, Rng& rng) {
    std::vector<double> weights(n);
    for (auto& w : weights) w = -std::log(1.0 - uniform_unit(rng));
    return normalize_weights(std::move(weights));
}

} // namespace subtest::testutil
