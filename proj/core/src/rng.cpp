#include "subtest/rng.hpp"

#include <cmath>

namespace subtest {

namespace {

int64_t poisson_inversion(double lambda, Rng& rng) {
    // Chop-down inversion; fine while exp(-lambda) stays well above underflow.
    const double p0 = std::exp(-lambda);
    for (;;) {
        double u = uniform_unit(rng);
        double p = p0;
        int64_t k = 0;
        while (u > p) {
            u -= p;
            ++k;
            p *= lambda / static_cast<double>(k);
            if (k > 2000) break; // u ~ 1 and accumulated rounding; redraw
        }
        if (k <= 2000) return k;
    }
}

// Hormann's PTRD: transformed rejection with squeeze steps. The final
// acceptance compares against the exact log-pmf, so the output law is the
// exact Poisson law for any lambda >= 10.
int64_t poisson_ptrd(double lambda, Rng& rng) {
    const double smu = std::sqrt(lambda);
    const double b = 0.931 + 2.53 * smu;
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    const double log_lambda = std::log(lambda);

    for (;;) {
        double u = uniform_unit(rng) - 0.5;
        double v = uniform_unit(rng);
        double us = 0.5 - std::abs(u);
        double kf = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
        if (us >= 0.07 && v <= v_r) return static_cast<int64_t>(kf);
        if (kf < 0.0 || (us < 0.013 && v > us)) continue;
        double k = kf;
        double lhs = std::log(v * inv_alpha / (a / (us * us) + b));
        double rhs = k * log_lambda - lambda - std::lgamma(k + 1.0);
        if (lhs <= rhs) return static_cast<int64_t>(kf);
    }
}

} // namespace

int64_t poisson(double lambda, Rng& rng) {
    if (lambda < 0.0 || !std::isfinite(lambda))
        throw std::invalid_argument("poisson: lambda must be finite and >= 0");
    if (lambda == 0.0) return 0;
    if (lambda < 30.0) return poisson_inversion(lambda, rng);
    return poisson_ptrd(lambda, rng);
}

} // namespace subtest
