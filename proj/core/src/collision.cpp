#include "subtest/collision.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace subtest {

int64_t self_collisions(const SampleSet& f) {
    int64_t acc = 0;
    for (int64_t c : f.counts) acc += c * (c - 1) / 2;
    return acc;
}

int64_t cross_collisions(const SampleSet& fp, const SampleSet& fq) {
    if (fp.n() != fq.n()) throw std::invalid_argument("sample sets over different domains");
    int64_t acc = 0;
    for (int64_t i = 0; i < fp.n(); ++i) acc += fp.counts[i] * fq.counts[i];
    return acc;
}

CollisionCounts sample_collision_counts(const SamplerHandle& sp, const SamplerHandle& sq,
                                        int64_t m, Rng& rng) {
    SampleSet f_p = draw_sample_set(sp, m, rng);
    SampleSet f_q = draw_sample_set(sq, m, rng);
    SampleSet q_p = draw_sample_set(sp, m, rng);
    SampleSet q_q = draw_sample_set(sq, m, rng);
    return CollisionCounts{
        self_collisions(f_p),
        self_collisions(f_q),
        cross_collisions(q_p, q_q),
        m,
    };
}

double rs_statistic(const CollisionCounts& c) {
    if (c.m < 2) throw std::invalid_argument("rs_statistic requires m >= 2");
    const double m = static_cast<double>(c.m);
    const double r = 2.0 * m / (m - 1.0) * static_cast<double>(c.r_p + c.r_q);
    const double s = 2.0 * static_cast<double>(c.s_pq);
    return r - s;
}

double variance_bound(int64_t m, double b, double c) {
    if (m < 2) throw std::invalid_argument("variance_bound requires m >= 2");
    if (b < 0.0 || b > 1.0) throw std::invalid_argument("variance_bound requires 0 <= b <= 1");
    if (c <= 0.0) throw std::invalid_argument("variance_bound requires c > 0");
    const double md = static_cast<double>(m);
    return c * (md * md * md * b * b + md * md * b);
}

Fingerprint fingerprint(const SampleSet& s1, const SampleSet& s2) {
    if (s1.n() != s2.n()) throw std::invalid_argument("sample sets over different domains");
    Fingerprint fp;
    for (int64_t e = 0; e < s1.n(); ++e) {
        int64_t i = s1.counts[e];
        int64_t j = s2.counts[e];
        if (i == 0 && j == 0) continue;
        ++fp.entries[{i, j}];
        fp.s = std::max({fp.s, i, j});
    }
    return fp;
}

bool fingerprint_cell_less(std::pair<int64_t, int64_t> a, std::pair<int64_t, int64_t> b) {
    return std::pair{a.first + a.second, a.first} < std::pair{b.first + b.second, b.first};
}

std::pair<SampleSet, SampleSet> standard_form(const Fingerprint& f, int64_t domain_size) {
    int64_t labels = 0;
    for (const auto& [cell, count] : f.entries) {
        if (count < 0) throw std::invalid_argument("fingerprint counts must be >= 0");
        if (cell.first == 0 && cell.second == 0)
            throw std::invalid_argument("fingerprint must not contain a (0, 0) cell");
        labels += count;
    }
    if (domain_size == 0) domain_size = std::max<int64_t>(labels, 1);
    if (labels > domain_size)
        throw std::invalid_argument("fingerprint requires more distinct elements than the domain holds");

    std::vector<std::pair<int64_t, int64_t>> cells;
    cells.reserve(f.entries.size());
    for (const auto& [cell, count] : f.entries)
        if (count > 0) cells.push_back(cell);
    std::sort(cells.begin(), cells.end(), fingerprint_cell_less);

    SampleSet s1 = empty_sample_set(domain_size);
    SampleSet s2 = empty_sample_set(domain_size);
    int64_t e = 0;
    for (auto cell : cells) {
        const int64_t count = f.entries.at(cell);
        for (int64_t k = 0; k < count; ++k, ++e) {
            s1.counts[e] = cell.first;
            s1.total += cell.first;
            s2.counts[e] = cell.second;
            s2.total += cell.second;
        }
    }
    return {std::move(s1), std::move(s2)};
}

} // namespace subtest
