#pragma once

#include "sensorfix/dataset.hpp"

#include <optional>
#include <span>
#include <vector>

namespace sensorfix {

// Variance guard, in feature units. A class whose template spread falls at or
// below this is excluded from per-feature verdicts instead of dividing by it.
inline constexpr double kVarianceEpsilon = 1e-12;

// Univariate normal fit of one class's templates for a single feature.
// std is the population standard deviation (1/count weighting).
struct ClassStats {
    int class_id = -1;
    double mean = 0.0;
    double std = 0.0;
    long count = 0;
};

ClassStats compute_class_stats(int class_id, std::span<const double> values);

struct SelectionThresholds {
    double thresh1 = 0.005; // minimum top membership probability
    double thresh2 = 5.0;   // minimum ratio of top-two membership probabilities
    double thresh3 = 0.1;   // maximum M1*M1/M2 distance criterion

    void validate() const;
};

struct FeatureVerdict {
    int feature_index = -1;
    bool selected = false;
    std::optional<int> winning_class;
};

// Fisher Discriminant Score of one feature for one unordered class pair.
// Throws DegenerateVariance when the pooled within-class variance vanishes;
// callers substitute +inf (means differ) or 0 (means equal).
double pairwise_fds(std::span<const double> values_a, std::span<const double> values_b);

// All pairwise FDS entries: fds(feature, pair) with pairs in (a<b) order.
struct FdsTable {
    int n_features = 0;
    int n_classes = 0;
    std::vector<double> entries; // [feature * n_pairs + pair]

    int n_pairs() const { return n_classes * (n_classes - 1) / 2; }
    double at(int feature, int class_a, int class_b) const;
    double max_for_feature(int feature) const;
};

FdsTable compute_fds_table(const LabeledMatrix& training);

// Training-phase pre-selection: keep feature i iff some class pair has
// FDS strictly greater than 1.
std::vector<char> preselect_features(const LabeledMatrix& training);

// Two-sided tail probability P(|Z| >= |x - mean| / std) under the class's
// normal fit. Throws DegenerateVariance when std <= kVarianceEpsilon.
double membership_probability(double x, const ClassStats& stats);

// Squared one-dimensional Mahalanobis distance ((x - mean) / std)^2.
double mahal_1d(double x, const ClassStats& stats);

// Per-class membership scores for one feature value, ready for the
// three-criteria rule. Classes with degenerate variance or fewer than two
// templates are skipped.
struct FeatureScores {
    std::vector<int> class_ids;
    std::vector<double> probabilities;
    std::vector<double> mahal;
};

FeatureScores score_feature(double x, std::span<const ClassStats> per_class);

// Three-criteria agreement rule on precomputed scores. Selected iff the top
// membership probability passes thresh1, dominates the runner-up by thresh2,
// the distance criterion M1*M1 < thresh3*M2 holds, and the probability argmax
// names the same class as the distance argmin.
FeatureVerdict verdict_from_scores(int feature_index, const FeatureScores& scores,
                                   const SelectionThresholds& thresholds);

FeatureVerdict feature_verdict(int feature_index, double x,
                               std::span<const ClassStats> per_class,
                               const SelectionThresholds& thresholds);

} // namespace sensorfix
