#include "subtest/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace subtest {

namespace {

void check_same_domain(const ExplicitDistribution& p, const ExplicitDistribution& q) {
    if (p.size() != q.size())
        throw std::invalid_argument("distribution domain sizes differ");
}

std::shared_ptr<const std::vector<double>> cumulative_sums(const std::vector<double>& probs) {
    auto cum = std::make_shared<std::vector<double>>(probs.size());
    double acc = 0.0;
    for (size_t i = 0; i < probs.size(); ++i) {
        acc += probs[i];
        (*cum)[i] = acc;
    }
    if (!cum->empty()) cum->back() = 1.0;
    return cum;
}

} // namespace

ExplicitDistribution make_distribution(std::vector<double> probs) {
    if (probs.empty())
        throw std::invalid_argument("distribution must have a positive domain size");
    double sum = 0.0;
    for (double x : probs) {
        if (!(x >= 0.0) || !std::isfinite(x))
            throw std::invalid_argument("distribution entries must be finite and >= 0");
        sum += x;
    }
    if (std::abs(sum - 1.0) > kProbSumTolerance)
        throw std::invalid_argument("distribution entries must sum to 1 within 1e-9");
    return ExplicitDistribution{std::move(probs)};
}

ExplicitDistribution normalize_weights(std::vector<double> weights) {
    if (weights.empty())
        throw std::invalid_argument("weight vector must be nonempty");
    double sum = 0.0;
    for (double x : weights) {
        if (!(x >= 0.0) || !std::isfinite(x))
            throw std::invalid_argument("weights must be finite and >= 0");
        sum += x;
    }
    if (sum <= 0.0) throw std::invalid_argument("weights must have a positive sum");
    for (double& x : weights) x /= sum;
    return ExplicitDistribution{std::move(weights)};
}

ExplicitDistribution uniform_distribution(int64_t n) {
    if (n <= 0) throw std::invalid_argument("domain size must be positive");
    return ExplicitDistribution{std::vector<double>(n, 1.0 / static_cast<double>(n))};
}

ExplicitDistribution point_mass(int64_t n, int64_t element) {
    if (n <= 0) throw std::invalid_argument("domain size must be positive");
    if (element < 0 || element >= n) throw std::invalid_argument("point mass element out of range");
    std::vector<double> probs(n, 0.0);
    probs[element] = 1.0;
    return ExplicitDistribution{std::move(probs)};
}

double exact_l1_distance(const ExplicitDistribution& p, const ExplicitDistribution& q) {
    check_same_domain(p, q);
    double acc = 0.0;
    for (int64_t i = 0; i < p.size(); ++i) acc += std::abs(p.probs[i] - q.probs[i]);
    return acc;
}

double exact_l2_distance(const ExplicitDistribution& p, const ExplicitDistribution& q) {
    check_same_domain(p, q);
    double acc = 0.0;
    for (int64_t i = 0; i < p.size(); ++i) {
        double d = p.probs[i] - q.probs[i];
        acc += d * d;
    }
    return std::sqrt(acc);
}

double exact_linf(const ExplicitDistribution& p) {
    double best = 0.0;
    for (double x : p.probs) best = std::max(best, std::abs(x));
    return best;
}

double exact_collision_probability(const ExplicitDistribution& p, const ExplicitDistribution& q) {
    check_same_domain(p, q);
    double acc = 0.0;
    for (int64_t i = 0; i < p.size(); ++i) acc += p.probs[i] * q.probs[i];
    return acc;
}

double exact_l2_norm_sq(const ExplicitDistribution& p) {
    return exact_collision_probability(p, p);
}

int64_t index_from_uniform(std::span<const double> cumsum, double u) {
    // First index whose cumulative sum strictly exceeds u; ties at a
    // boundary therefore land on the higher-indexed element.
    auto it = std::upper_bound(cumsum.begin(), cumsum.end(), u);
    if (it == cumsum.end()) return static_cast<int64_t>(cumsum.size()) - 1;
    return static_cast<int64_t>(it - cumsum.begin());
}

SamplerHandle make_sampler(const ExplicitDistribution& p) {
    auto cum = cumulative_sums(p.probs);
    const int64_t n = p.size();
    return SamplerHandle{
        n,
        [cum](Rng& rng) { return index_from_uniform(*cum, uniform_unit(rng)); },
    };
}

int64_t AliasTable::draw(Rng& rng) const {
    const int64_t n = static_cast<int64_t>(threshold.size());
    int64_t slot = uniform_index(rng, n);
    return uniform_unit(rng) < threshold[slot] ? slot : alias[slot];
}

AliasTable build_alias_table(std::span<const double> probs) {
    const size_t n = probs.size();
    if (n == 0) throw std::invalid_argument("alias table needs a nonempty vector");
    AliasTable table;
    table.threshold.assign(n, 1.0);
    table.alias.resize(n);
    std::iota(table.alias.begin(), table.alias.end(), int64_t{0});

    std::vector<double> scaled(n);
    for (size_t i = 0; i < n; ++i) scaled[i] = probs[i] * static_cast<double>(n);

    std::vector<size_t> small, large;
    for (size_t i = 0; i < n; ++i) (scaled[i] < 1.0 ? small : large).push_back(i);

    while (!small.empty() && !large.empty()) {
        size_t s = small.back();
        small.pop_back();
        size_t l = large.back();
        large.pop_back();
        table.threshold[s] = scaled[s];
        table.alias[s] = static_cast<int64_t>(l);
        scaled[l] -= 1.0 - scaled[s];
        (scaled[l] < 1.0 ? small : large).push_back(l);
    }
    // Leftovers are 1.0 up to rounding.
    return table;
}

SamplerHandle make_alias_sampler(const ExplicitDistribution& p) {
    auto table = std::make_shared<AliasTable>(build_alias_table(p.probs));
    return SamplerHandle{
        p.size(),
        [table](Rng& rng) { return table->draw(rng); },
    };
}

SampleSet empty_sample_set(int64_t n) {
    if (n <= 0) throw std::invalid_argument("sample set domain size must be positive");
    return SampleSet{std::vector<int64_t>(n, 0), 0};
}

SampleSet draw_sample_set(const SamplerHandle& s, int64_t m, Rng& rng) {
    if (m < 0) throw std::invalid_argument("sample count must be >= 0");
    SampleSet out = empty_sample_set(s.n);
    for (int64_t i = 0; i < m; ++i) out.add(s.draw(rng));
    return out;
}

std::vector<double> empirical_frequencies(const SampleSet& s) {
    std::vector<double> freqs(s.counts.size(), 0.0);
    if (s.total == 0) return freqs;
    for (size_t i = 0; i < s.counts.size(); ++i)
        freqs[i] = static_cast<double>(s.counts[i]) / static_cast<double>(s.total);
    return freqs;
}

} // namespace subtest
