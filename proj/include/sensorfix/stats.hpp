#pragma once

#include <span>
#include <vector>

namespace sensorfix {

struct SummaryStats {
    long n = 0;
    double mean = 0.0;
    double stddev = 0.0; // sample standard deviation
    double min = 0.0;
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
    double max = 0.0;
};

SummaryStats summarize_values(std::span<const double> values);

// Linear-interpolation quantile on a sorted copy, q in [0, 1].
double quantile(std::span<const double> values, double q);

// Paired rank-based comparison (Wilcoxon signed-rank, normal approximation
// with tie correction). Zero differences are dropped; an all-zero pairing
// reports p = 1.
struct PairedComparison {
    long n_pairs = 0;
    long n_nonzero = 0;
    double mean_diff = 0.0; // mean(a - b)
    double w_plus = 0.0;
    double z = 0.0;
    double p_two_sided = 1.0;

    bool significant(double alpha = 0.05) const { return p_two_sided < alpha; }
    bool significantly_greater(double alpha = 0.05) const {
        return mean_diff > 0.0 && significant(alpha);
    }
};

PairedComparison wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b);

// Standard normal cdf, used for the test's normal approximation.
double normal_cdf(double z);

} // namespace sensorfix
