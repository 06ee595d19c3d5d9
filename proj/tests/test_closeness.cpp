#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "subtest/closeness.hpp"
#include "subtest/instances.hpp"
#include "test_util.hpp"

using namespace subtest;

namespace {

TestParams params_ed(double eps, double delta) {
    TestParams p;
    p.epsilon = eps;
    p.delta = delta;
    return p;
}

} // namespace

TEST_CASE("required_m_l2 values and monotonicity") {
    CHECK(required_m_l2(1.0, 1.0, 1.0) == 2);
    CHECK_THROWS_AS(required_m_l2(0.0, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(required_m_l2(0.5, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(required_m_l2(0.5, 0.5, 0.0), std::invalid_argument);

    // Halving epsilon in the b-dominated regime scales m by (nearly) 16.
    const double m1 = static_cast<double>(required_m_l2(1.0, 0.01, 1.0));
    const double m2 = static_cast<double>(required_m_l2(1.0, 0.005, 1.0));
    CHECK(m2 / m1 > 15.9);
    CHECK(m2 / m1 <= 16.0);

    for (double eps : {0.1, 0.2, 0.4, 0.8})
        CHECK(required_m_l2(0.3, eps, 2.0) >= required_m_l2(0.3, 2.0 * eps, 2.0));
}

TEST_CASE("required_m_l2 at the filtered bound scales as n^{2/3} eps^{-8/3}") {
    for (int64_t n : {64, 216, 1000, 8000}) {
        for (double eps : {0.25, 0.5, 1.0}) {
            const double nd = static_cast<double>(n);
            const double b = 2.0 * std::pow(eps, 2.0 / 3.0) * std::pow(nd, -2.0 / 3.0);
            const double m = static_cast<double>(
                required_m_l2(b, eps / (2.0 * std::sqrt(nd)), 1.0));
            const double scaled = m * std::pow(eps, 8.0 / 3.0) / std::pow(nd, 2.0 / 3.0);
            CHECK(scaled > 63.0);
            CHECK(scaled < 71.0);
        }
    }
}

TEST_CASE("required_m_linf_aware") {
    // Direct evaluation: c (n^2 p q / eps^4 + n sqrt(q) / eps^2).
    CHECK(required_m_linf_aware(10000, 1e-4, 1e-4, 0.5, 1.0) ==
          static_cast<int64_t>(std::ceil(16.0 + 100.0 * 4.0)));

    // Doubling epsilon divides the count by at least 4.
    for (double eps : {0.1, 0.3, 0.5}) {
        auto m1 = required_m_linf_aware(500, 0.002, 0.01, eps, 2.0);
        auto m2 = required_m_linf_aware(500, 0.002, 0.01, 2.0 * eps, 2.0);
        CHECK(m2 <= m1 / 4 + 1);
    }

    CHECK_THROWS_AS(required_m_linf_aware(100, 0.01, 0.01, 0.5, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(required_m_linf_aware(100, 0.05, 0.01, 0.5, 1.0), std::invalid_argument);
}

TEST_CASE("odd_iteration_count") {
    CHECK(odd_iteration_count(0.1, 3.0) % 2 == 1);
    CHECK(odd_iteration_count(0.9, 3.0) == 1);
    CHECK(odd_iteration_count(0.1, 3.0) == 7);
}

TEST_CASE("l2 test accepts identical distributions") {
    auto s = make_sampler(uniform_distribution(100));
    const int64_t m = required_m_l2(0.01, 0.2, 8.0);
    Rng rng(101);
    for (int trial = 0; trial < 5; ++trial) {
        Verdict v = l2_distance_test(s, s, m, params_ed(0.2, 0.1), rng);
        CHECK(v.accept);
        CHECK(v.samples_consumed == static_cast<int64_t>(v.iterations.size()) * 4 * m);
    }
}

TEST_CASE("l2 test rejects disjoint halves below their distance") {
    auto pair = disjoint_halves_pair(100); // l2 distance 0.2
    CHECK(pair.exact_l2 == doctest::Approx(0.2));
    auto sp = make_sampler(pair.p);
    auto sq = make_sampler(pair.q);
    const int64_t m = required_m_l2(0.02, 0.19, 8.0);
    Rng rng(102);
    for (int trial = 0; trial < 5; ++trial) {
        Verdict v = l2_distance_test(sp, sq, m, params_ed(0.19, 0.1), rng);
        CHECK_FALSE(v.accept);
    }
}

TEST_CASE("l2 test accepts the biased coin against itself") {
    auto pair = biased_coin_pair(0.3);
    CHECK(pair.exact_l2 == doctest::Approx(0.3).epsilon(1e-12));
    auto sq = make_sampler(pair.q);
    const int64_t m = required_m_l2(exact_linf(pair.q), 0.3, 8.0);
    Rng rng(103);
    Verdict v = l2_distance_test(sq, sq, m, params_ed(0.3, 0.1), rng);
    CHECK(v.accept);
}

TEST_CASE("l2 test input validation") {
    auto s2 = make_sampler(uniform_distribution(2));
    auto s3 = make_sampler(uniform_distribution(3));
    Rng rng(104);
    CHECK_THROWS_AS(l2_distance_test(s2, s2, 1, params_ed(0.5, 0.1), rng),
                    std::invalid_argument);
    CHECK_THROWS_AS(l2_distance_test(s2, s3, 10, params_ed(0.5, 0.1), rng),
                    std::invalid_argument);
    CHECK_THROWS_AS(l2_distance_test(s2, s2, 10, params_ed(0.5, 1.5), rng),
                    std::invalid_argument);
}

TEST_CASE("enlarging epsilon never flips accept to reject on the same draws") {
    Rng seed_rng(105);
    auto pair = disjoint_halves_pair(20);
    auto sp = make_sampler(pair.p);
    auto sq = make_sampler(pair.q);
    const int64_t m = 60;
    for (int trial = 0; trial < 30; ++trial) {
        uint64_t seed = seed_rng();
        bool prev_accept = false;
        for (double eps : {0.2, 0.4, 0.8, 1.6}) {
            Rng rng(seed);
            Verdict v = l2_distance_test(sp, sq, m, params_ed(eps, 0.2), rng);
            if (prev_accept) CHECK(v.accept);
            prev_accept = v.accept;
        }
    }
}

TEST_CASE("l2 verdicts replay bit for bit") {
    auto s = make_sampler(uniform_distribution(30));
    Rng a(106), b(106);
    Verdict va = l2_distance_test(s, s, 50, params_ed(0.5, 0.2), a);
    Verdict vb = l2_distance_test(s, s, 50, params_ed(0.5, 0.2), b);
    REQUIRE(va.iterations.size() == vb.iterations.size());
    CHECK(va.accept == vb.accept);
    CHECK(va.samples_consumed == vb.samples_consumed);
    for (size_t i = 0; i < va.iterations.size(); ++i) {
        CHECK(va.iterations[i].counts.r_p == vb.iterations[i].counts.r_p);
        CHECK(va.iterations[i].counts.r_q == vb.iterations[i].counts.r_q);
        CHECK(va.iterations[i].counts.s_pq == vb.iterations[i].counts.s_pq);
        CHECK(va.iterations[i].statistic == vb.iterations[i].statistic);
    }
}

TEST_CASE("big_elements finds a point mass") {
    auto s = make_sampler(point_mass(10, 3));
    Rng rng(111);
    auto big = big_elements(s, 5, 0.1, 1.0, rng);
    CHECK(big.elements == std::vector<int64_t>{3});
}

TEST_CASE("big_elements stays empty for a spread-out distribution") {
    auto s = make_sampler(uniform_distribution(100));
    Rng rng(112);
    for (int trial = 0; trial < 20; ++trial) {
        auto big = big_elements(s, 2000, 0.1, 0.5, rng);
        CHECK(big.elements.empty());
    }
}

TEST_CASE("big_elements isolates a heavy element") {
    std::vector<double> probs(50, 0.5 / 49.0);
    probs[0] = 0.5;
    auto s = make_sampler(make_distribution(probs));
    Rng rng(113);
    for (int trial = 0; trial < 20; ++trial) {
        auto big = big_elements(s, 2000, 0.1, 0.5, rng);
        CHECK(big.elements == std::vector<int64_t>{0});
    }
}

TEST_CASE("filtered_sampler with empty big set reproduces the base stream") {
    Rng rng(121);
    auto p = testutil::random_distribution(25, rng);
    auto base = make_sampler(p);
    auto filtered = filtered_sampler(base, {});
    Rng a(7), b(7);
    for (int i = 0; i < 2000; ++i) CHECK(base.draw(a) == filtered.draw(b));
}

TEST_CASE("filtered_sampler redirects big elements to uniform") {
    // Point mass entirely inside the big set: every draw is substituted.
    auto base = make_sampler(point_mass(4, 0));
    auto filtered = filtered_sampler(base, {0});
    Rng rng(122);
    SampleSet sample = draw_sample_set(filtered, 100000, rng);
    for (int64_t i = 0; i < 4; ++i) {
        double freq = static_cast<double>(sample.counts[i]) / 100000.0;
        CHECK(std::abs(freq - 0.25) < 0.01);
    }

    // Big set covering the whole domain behaves the same way.
    Rng rng2(123);
    auto all_big = filtered_sampler(make_sampler(point_mass(4, 2)), {0, 1, 2, 3});
    SampleSet sample2 = draw_sample_set(all_big, 100000, rng2);
    for (int64_t i = 0; i < 4; ++i) {
        double freq = static_cast<double>(sample2.counts[i]) / 100000.0;
        CHECK(std::abs(freq - 0.25) < 0.01);
    }
}

TEST_CASE("norm estimate of a point mass is exactly one") {
    auto s = make_sampler(point_mass(7, 2));
    Rng rng(131);
    CHECK(estimate_l2_norm_sq(s, 0.5, 0.2, rng) == 1.0);
}

TEST_CASE("norm estimate concentrates for the uniform distribution") {
    auto s = make_sampler(uniform_distribution(100));
    Rng rng(132);
    int inside = 0;
    for (int trial = 0; trial < 30; ++trial) {
        double est = estimate_l2_norm_sq(s, 0.1, 0.1, rng);
        if (est >= 0.009 && est <= 0.011) ++inside;
    }
    CHECK(inside >= 27);
}

TEST_CASE("norm estimate on a small skewed distribution") {
    auto p = make_distribution({0.5, 0.25, 0.25});
    auto s = make_sampler(p);
    CHECK(exact_l2_norm_sq(p) == doctest::Approx(0.375));
    Rng rng(133);
    CHECK(estimate_l2_norm_sq(s, 0.1, 0.05, rng) == doctest::Approx(0.375).epsilon(0.1));
    CHECK_THROWS_AS(estimate_l2_norm_sq(s, 0.0, 0.1, rng), std::invalid_argument);
}

TEST_CASE("uniformity test accepts uniform and rejects a point mass") {
    Rng rng(141);
    Verdict accept = uniformity_test(make_sampler(uniform_distribution(400)),
                                     params_ed(0.5, 0.1), rng);
    CHECK(accept.accept);

    Verdict reject =
        uniformity_test(make_sampler(point_mass(400, 0)), params_ed(0.5, 0.1), rng);
    CHECK_FALSE(reject.accept);

    CHECK_THROWS_AS(uniformity_test(make_sampler(uniform_distribution(4)),
                                    params_ed(1.5, 0.1), rng),
                    std::invalid_argument);
}

TEST_CASE("uniformity test accepts an oracle-verified near-uniform distribution") {
    const int64_t n = 400;
    const double eps = 0.5;
    auto pair = perturbed_uniform_pair(n, eps / std::sqrt(3.0 * static_cast<double>(n)));
    CHECK(pair.exact_l1 == doctest::Approx(eps / std::sqrt(3.0 * n)).epsilon(1e-9));
    Rng rng(142);
    Verdict v = uniformity_test(make_sampler(pair.q), params_ed(eps, 0.1), rng);
    CHECK(v.accept);
}

TEST_CASE("l2 norm identity against the uniform distribution") {
    Rng rng(151);
    for (int trial = 0; trial < 30; ++trial) {
        int64_t n = 2 + uniform_index(rng, 500);
        auto p = testutil::random_distribution(n, rng);
        auto u = uniform_distribution(n);
        double lhs = exact_l2_norm_sq(p) - 1.0 / static_cast<double>(n);
        double rhs = exact_l2_distance(p, u);
        CHECK(std::abs(lhs - rhs * rhs) < 1e-12);
    }
}

TEST_CASE("l1 test accepts identical uniform(216)") {
    auto s = make_sampler(uniform_distribution(216));
    auto s2 = make_sampler(uniform_distribution(216));
    Rng rng(161);
    Verdict v = l1_distance_test(s, s2, params_ed(0.5, 0.1), rng);
    CHECK(v.accept);
    CHECK(v.decided_by == "l2-subtest-raw");
    CHECK(v.samples_consumed == v.phase1_samples + v.subtest_samples);
    CHECK(v.warning.empty());
}

TEST_CASE("l1 test rejects the heavy-light pair at n=216") {
    auto pair = heavy_light_pair(216);
    CHECK(pair.exact_l1 == doctest::Approx(1.0).epsilon(1e-12));
    Rng rng(162);
    Verdict v = l1_distance_test(make_sampler(pair.p), make_sampler(pair.q),
                                 params_ed(0.5, 0.1), rng);
    CHECK_FALSE(v.accept);
}

TEST_CASE("l1 test accepts a pair at the guaranteed acceptance radius") {
    const int64_t n = 216;
    const double eps = 0.5;
    const double radius = std::pow(eps, 4.0 / 3.0) / (32.0 * std::cbrt(static_cast<double>(n)));
    auto pair = perturbed_uniform_pair(n, radius);
    CHECK(pair.exact_l1 == doctest::Approx(radius).epsilon(1e-9));
    CHECK(pair.exact_l1 <= l1_gap(n, eps));
    Rng rng(163);
    Verdict v = l1_distance_test(make_sampler(pair.p), make_sampler(pair.q),
                                 params_ed(eps, 0.1), rng);
    CHECK(v.accept);
}

TEST_CASE("l1 test warns below the epsilon precondition and still runs") {
    auto s = make_sampler(uniform_distribution(4));
    Rng rng(164);
    Verdict v = l1_distance_test(s, s, params_ed(0.4, 0.25), rng); // 0.4 < 1/sqrt(4)
    CHECK_FALSE(v.warning.empty());
    CHECK(v.accept);

    auto s3 = make_sampler(uniform_distribution(3));
    CHECK_THROWS_AS(l1_distance_test(s, s3, params_ed(0.5, 0.1), rng), std::invalid_argument);
}

TEST_CASE("l1 gap picks the larger branch") {
    CHECK(l1_gap(216, 0.5) ==
          doctest::Approx(0.5 / (4.0 * std::sqrt(216.0))).epsilon(1e-12));
    // Huge domains flip to the eps^{4/3} branch.
    const double eps = 2.0;
    const int64_t n = 1 << 30;
    CHECK(l1_gap(n, eps) ==
          doctest::Approx(std::pow(eps, 4.0 / 3.0) / (32.0 * std::cbrt(static_cast<double>(n))))
              .epsilon(1e-12));
}
