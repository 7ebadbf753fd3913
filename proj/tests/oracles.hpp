// Test-only reference implementations, kept independent of the library's
// computation paths: the normal tail comes from composite-Simpson quadrature
// of the density rather than erfc, and the selection rule is re-derived
// directly from its defining inequalities with explicit sorting.
#pragma once

#include "sensorfix/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

namespace oracle {

inline double normal_pdf(double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * 3.141592653589793238462643383279502884);
}

// Simpson integral of the standard normal density over [a, b].
inline double simpson_pdf(double a, double b, int intervals) {
    if (intervals % 2) ++intervals;
    const double h = (b - a) / intervals;
    double sum = normal_pdf(a) + normal_pdf(b);
    for (int i = 1; i < intervals; ++i) sum += normal_pdf(a + h * i) * (i % 2 ? 4.0 : 2.0);
    return sum * h / 3.0;
}

// One-sided upper tail P(Z >= z), z >= 0. Integrates the tail directly for
// large z to dodge cancellation.
inline double upper_tail(double z) {
    if (z < 2.0) return 0.5 - simpson_pdf(0.0, z, 40000);
    return simpson_pdf(z, z + 14.0, 40000);
}

inline double two_sided_tail(double z) { return 2.0 * upper_tail(std::fabs(z)); }

inline double normal_cdf(double z) {
    return z >= 0.0 ? 1.0 - upper_tail(z) : upper_tail(-z);
}

// Eq. 1-3 evaluated literally in long double.
inline double fds_brute(std::span<const double> a, std::span<const double> b) {
    long double mu_a = 0.0L, mu_b = 0.0L, grand = 0.0L;
    for (double v : a) mu_a += v;
    for (double v : b) mu_b += v;
    grand = (mu_a + mu_b) / static_cast<long double>(a.size() + b.size());
    mu_a /= static_cast<long double>(a.size());
    mu_b /= static_cast<long double>(b.size());

    const long double sb = (mu_a - grand) * (mu_a - grand) + (mu_b - grand) * (mu_b - grand);
    long double sw_a = 0.0L, sw_b = 0.0L;
    for (double v : a) sw_a += (v - mu_a) * (v - mu_a);
    for (double v : b) sw_b += (v - mu_b) * (v - mu_b);
    const long double sw =
        sw_a / static_cast<long double>(a.size()) + sw_b / static_cast<long double>(b.size());
    return static_cast<double>(sb / sw);
}

struct VerdictOracle {
    bool selected = false;
    std::optional<int> winning_class;
};

// Eq. 4-6 plus the agreement rule, re-derived with explicit sorting and
// guarded divisions.
inline VerdictOracle verdict_brute(double x, std::span<const sensorfix::ClassStats> stats,
                                   const sensorfix::SelectionThresholds& thr) {
    struct Entry {
        int class_id;
        double prob;
        double mahal;
    };
    std::vector<Entry> entries;
    for (const auto& s : stats) {
        if (s.std <= sensorfix::kVarianceEpsilon || s.count < 2) continue;
        const double z = (x - s.mean) / s.std;
        entries.push_back({s.class_id, two_sided_tail(z), z * z});
    }
    VerdictOracle out;
    if (entries.size() < 2) return out;

    std::vector<Entry> by_prob = entries;
    std::stable_sort(by_prob.begin(), by_prob.end(),
                     [](const Entry& a, const Entry& b) { return a.prob > b.prob; });
    std::vector<Entry> by_mahal = entries;
    std::stable_sort(by_mahal.begin(), by_mahal.end(),
                     [](const Entry& a, const Entry& b) { return a.mahal < b.mahal; });

    const double p1 = by_prob[0].prob, p2 = by_prob[1].prob;
    const double m1 = by_mahal[0].mahal, m2 = by_mahal[1].mahal;

    if (!(p1 > thr.thresh1)) return out;
    if (p2 > 0.0 && !(p1 / p2 > thr.thresh2)) return out;
    if (p2 == 0.0 && !(p1 > 0.0)) return out;
    if (m2 > 0.0 && !(m1 * m1 / m2 < thr.thresh3)) return out;
    if (m2 == 0.0) return out;
    if (by_prob[0].class_id != by_mahal[0].class_id) return out;
    out.selected = true;
    out.winning_class = by_prob[0].class_id;
    return out;
}

// Minimal deterministic generator for property tests.
struct Xorshift {
    std::uint64_t state;
    explicit Xorshift(std::uint64_t seed) : state(seed ? seed : 0x9E3779B97F4A7C15ULL) {}
    std::uint64_t next() {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        return state;
    }
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
    int uniform_int(int lo, int hi) {
        return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1));
    }
};

} // namespace oracle
