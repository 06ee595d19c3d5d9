#include "subtest/instances.hpp"

#include <cmath>
#include <stdexcept>

namespace subtest {

namespace {

// Exact integer cube root, or -1 when n is not a perfect cube.
int64_t exact_cbrt(int64_t n) {
    int64_t c = static_cast<int64_t>(std::llround(std::cbrt(static_cast<double>(n))));
    for (int64_t k = std::max<int64_t>(1, c - 1); k <= c + 1; ++k)
        if (k * k * k == n) return k;
    return -1;
}

} // namespace

InstancePair make_instance_pair(ExplicitDistribution p, ExplicitDistribution q) {
    double l1 = exact_l1_distance(p, q);
    double l2 = exact_l2_distance(p, q);
    return InstancePair{std::move(p), std::move(q), l1, l2};
}

InstancePair heavy_light_pair(int64_t n) {
    if (n <= 0) throw std::invalid_argument("heavy_light_pair: n must be positive");
    const int64_t c = exact_cbrt(n);
    if (c < 0 || n % 4 != 0)
        throw std::invalid_argument(
            "heavy_light_pair: n must be a perfect cube divisible by 4 (8, 64, 216, ...)");

    const int64_t heavy = c * c; // n^{2/3}, exact
    const double heavy_mass = 1.0 / (2.0 * static_cast<double>(heavy));
    const double light_mass = 2.0 / static_cast<double>(n);

    std::vector<double> p(n, 0.0), q(n, 0.0);
    for (int64_t i = 0; i < heavy; ++i) {
        p[i] = heavy_mass;
        q[i] = heavy_mass;
    }
    for (int64_t i = n / 2; i < 3 * n / 4; ++i) p[i] = light_mass;
    for (int64_t i = 3 * n / 4; i < n; ++i) q[i] = light_mass;

    return make_instance_pair(make_distribution(std::move(p)), make_distribution(std::move(q)));
}

InstancePair biased_coin_pair(double epsilon) {
    if (!(epsilon > 0.0) || !(epsilon < 1.0 / std::sqrt(2.0)))
        throw std::invalid_argument("biased_coin_pair: epsilon must lie in (0, 1/sqrt(2))");
    const double bias = epsilon / std::sqrt(2.0);
    return make_instance_pair(make_distribution({0.5, 0.5}),
                              make_distribution({0.5 - bias, 0.5 + bias}));
}

SampleSet poissonized_sample(const SamplerHandle& s, double lambda, Rng& rng) {
    if (lambda < 0.0) throw std::invalid_argument("poissonized_sample: lambda must be >= 0");
    return draw_sample_set(s, poisson(lambda, rng), rng);
}

std::pair<SampleSet, SampleSet> case_samples(const InstancePair& pair, SampleCase which,
                                             int64_t m, Rng& rng) {
    SamplerHandle sp = make_sampler(pair.p);
    SampleSet first = draw_sample_set(sp, m, rng);
    SampleSet second = which == SampleCase::Both_P
                           ? draw_sample_set(sp, m, rng)
                           : draw_sample_set(make_sampler(pair.q), m, rng);
    return {std::move(first), std::move(second)};
}

InstancePair disjoint_halves_pair(int64_t n) {
    if (n < 2 || n % 2 != 0)
        throw std::invalid_argument("disjoint_halves_pair: n must be even and >= 2");
    std::vector<double> p(n, 0.0), q(n, 0.0);
    const double mass = 2.0 / static_cast<double>(n);
    for (int64_t i = 0; i < n / 2; ++i) p[i] = mass;
    for (int64_t i = n / 2; i < n; ++i) q[i] = mass;
    return make_instance_pair(make_distribution(std::move(p)), make_distribution(std::move(q)));
}

InstancePair perturbed_uniform_pair(int64_t n, double l1) {
    if (n < 2) throw std::invalid_argument("perturbed_uniform_pair: n must be >= 2");
    if (!(l1 >= 0.0)) throw std::invalid_argument("perturbed_uniform_pair: l1 must be >= 0");
    ExplicitDistribution p = uniform_distribution(n);
    if (l1 == 0.0) return make_instance_pair(p, p);

    // Spread the moved mass over enough elements that none loses more than
    // half its weight. Each donor/receiver pair contributes 2 delta to the
    // l1 distance.
    const double half = l1 / 2.0;
    const double cap = 1.0 / (2.0 * static_cast<double>(n));
    const int64_t k = static_cast<int64_t>(std::ceil(half / cap));
    if (2 * k > n)
        throw std::invalid_argument("perturbed_uniform_pair: perturbation exceeds capacity");
    const double delta = half / static_cast<double>(k);

    std::vector<double> q = p.probs;
    for (int64_t i = 0; i < k; ++i) {
        q[i] -= delta;
        q[k + i] += delta;
    }
    return make_instance_pair(std::move(p), make_distribution(std::move(q)));
}

} // namespace subtest
