#include "sensorfix/stats.hpp"

#include "sensorfix/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace sensorfix {

double quantile(std::span<const double> values, double q) {
    if (values.empty()) throw ConfigError("quantile of empty sample");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = static_cast<std::size_t>(std::ceil(pos));
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

SummaryStats summarize_values(std::span<const double> values) {
    SummaryStats s;
    s.n = static_cast<long>(values.size());
    if (values.empty()) return s;

    s.mean = std::accumulate(values.begin(), values.end(), 0.0) /
             static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.stddev = values.size() > 1
                   ? std::sqrt(ss / static_cast<double>(values.size() - 1))
                   : 0.0;
    s.min = *std::min_element(values.begin(), values.end());
    s.max = *std::max_element(values.begin(), values.end());
    s.q1 = quantile(values, 0.25);
    s.median = quantile(values, 0.5);
    s.q3 = quantile(values, 0.75);
    return s;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

PairedComparison wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw ConfigError("wilcoxon: paired samples must have equal length");

    PairedComparison cmp;
    cmp.n_pairs = static_cast<long>(a.size());

    std::vector<double> diffs;
    diffs.reserve(a.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sum += d;
        if (d != 0.0) diffs.push_back(d);
    }
    cmp.mean_diff = a.empty() ? 0.0 : sum / static_cast<double>(a.size());
    cmp.n_nonzero = static_cast<long>(diffs.size());
    if (diffs.empty()) return cmp; // no evidence either way

    std::vector<std::size_t> order(diffs.size());
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        return std::fabs(diffs[x]) < std::fabs(diffs[y]);
    });

    // average ranks within ties, accumulate tie correction
    std::vector<double> rank(diffs.size(), 0.0);
    double tie_correction = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() &&
               std::fabs(diffs[order[j + 1]]) == std::fabs(diffs[order[i]]))
            ++j;
        const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) rank[order[k]] = avg;
        const double t = static_cast<double>(j - i + 1);
        tie_correction += t * t * t - t;
        i = j + 1;
    }

    double w_plus = 0.0;
    for (std::size_t k = 0; k < diffs.size(); ++k)
        if (diffs[k] > 0.0) w_plus += rank[k];
    cmp.w_plus = w_plus;

    const double n = static_cast<double>(diffs.size());
    const double mean = n * (n + 1.0) / 4.0;
    const double var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_correction / 48.0;
    if (var <= 0.0) return cmp;

    double z = w_plus - mean;
    // continuity correction toward the mean
    if (z > 0.5) z -= 0.5;
    else if (z < -0.5) z += 0.5;
    else z = 0.0;
    z /= std::sqrt(var);
    cmp.z = z;
    cmp.p_two_sided = 2.0 * (1.0 - normal_cdf(std::fabs(z)));
    return cmp;
}

} // namespace sensorfix
