#include "sensorfix/numerics.hpp"

#include "sensorfix/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sensorfix {

namespace {

double mean_of(std::span<const double> values) {
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

// 1/L-weighted within-class scatter contribution of one class.
double scatter_of(std::span<const double> values, double mean) {
    double sum = 0.0;
    for (double v : values) sum += (v - mean) * (v - mean);
    return sum / static_cast<double>(values.size());
}

} // namespace

ClassStats compute_class_stats(int class_id, std::span<const double> values) {
    ClassStats stats;
    stats.class_id = class_id;
    stats.count = static_cast<long>(values.size());
    if (values.empty()) return stats;
    stats.mean = mean_of(values);
    stats.std = std::sqrt(scatter_of(values, stats.mean));
    return stats;
}

void SelectionThresholds::validate() const {
    if (!(thresh1 > 0.0 && thresh1 < 1.0))
        throw ConfigError("thresh1 must lie in (0, 1)");
    if (!(thresh2 > 1.0)) throw ConfigError("thresh2 must exceed 1");
    if (!(thresh3 > 0.0)) throw ConfigError("thresh3 must be positive");
}

double pairwise_fds(std::span<const double> values_a, std::span<const double> values_b) {
    if (values_a.size() < 2 || values_b.size() < 2)
        throw ConfigError("pairwise_fds: each class needs at least two values");

    const double mu_a = mean_of(values_a);
    const double mu_b = mean_of(values_b);

    double grand = 0.0;
    for (double v : values_a) grand += v;
    for (double v : values_b) grand += v;
    grand /= static_cast<double>(values_a.size() + values_b.size());

    const double sb = (mu_a - grand) * (mu_a - grand) + (mu_b - grand) * (mu_b - grand);
    const double sw = scatter_of(values_a, mu_a) + scatter_of(values_b, mu_b);

    if (sw < kVarianceEpsilon)
        throw DegenerateVariance("pairwise_fds: pooled within-class variance vanished");
    return sb / sw;
}

double FdsTable::at(int feature, int class_a, int class_b) const {
    if (class_a > class_b) std::swap(class_a, class_b);
    // pair index of (a, b), a < b, in lexicographic pair order
    int pair = 0;
    for (int i = 0; i < class_a; ++i) pair += n_classes - 1 - i;
    pair += class_b - class_a - 1;
    return entries[static_cast<std::size_t>(feature) * n_pairs() + pair];
}

double FdsTable::max_for_feature(int feature) const {
    double best = 0.0;
    const std::size_t base = static_cast<std::size_t>(feature) * n_pairs();
    for (int p = 0; p < n_pairs(); ++p) best = std::max(best, entries[base + p]);
    return best;
}

FdsTable compute_fds_table(const LabeledMatrix& training) {
    training.validate();
    if (training.n_classes < 2)
        throw ConfigError("compute_fds_table: need at least two classes");
    const auto counts = training.class_counts();
    for (int c = 0; c < training.n_classes; ++c) {
        if (counts[static_cast<std::size_t>(c)] < 2)
            throw ConfigError("compute_fds_table: class " + std::to_string(c) +
                              " has fewer than two samples");
    }

    FdsTable table;
    table.n_features = static_cast<int>(training.cols());
    table.n_classes = training.n_classes;
    table.entries.assign(static_cast<std::size_t>(table.n_features) * table.n_pairs(), 0.0);

    std::vector<std::vector<double>> column_by_class(
        static_cast<std::size_t>(training.n_classes));
    for (int f = 0; f < table.n_features; ++f) {
        for (auto& v : column_by_class) v.clear();
        for (long r = 0; r < training.rows(); ++r)
            column_by_class[static_cast<std::size_t>(training.labels[static_cast<std::size_t>(r)])]
                .push_back(training.x(r, f));

        int pair = 0;
        for (int a = 0; a < training.n_classes; ++a) {
            for (int b = a + 1; b < training.n_classes; ++b, ++pair) {
                const auto& va = column_by_class[static_cast<std::size_t>(a)];
                const auto& vb = column_by_class[static_cast<std::size_t>(b)];
                double fds = 0.0;
                try {
                    fds = pairwise_fds(va, vb);
                } catch (const DegenerateVariance&) {
                    // Both classes constant: infinitely discriminative if the
                    // constants differ, useless if they coincide.
                    fds = (mean_of(va) != mean_of(vb))
                              ? std::numeric_limits<double>::infinity()
                              : 0.0;
                }
                table.entries[static_cast<std::size_t>(f) * table.n_pairs() + pair] = fds;
            }
        }
    }
    return table;
}

std::vector<char> preselect_features(const LabeledMatrix& training) {
    const FdsTable table = compute_fds_table(training);
    std::vector<char> mask(static_cast<std::size_t>(table.n_features), 0);
    for (int f = 0; f < table.n_features; ++f)
        mask[static_cast<std::size_t>(f)] = table.max_for_feature(f) > 1.0 ? 1 : 0;
    return mask;
}

double membership_probability(double x, const ClassStats& stats) {
    if (stats.std <= kVarianceEpsilon)
        throw DegenerateVariance("membership_probability: class std below epsilon");
    const double z = std::fabs(x - stats.mean) / stats.std;
    return std::erfc(z / std::sqrt(2.0));
}

double mahal_1d(double x, const ClassStats& stats) {
    if (stats.std <= kVarianceEpsilon)
        throw DegenerateVariance("mahal_1d: class std below epsilon");
    const double z = (x - stats.mean) / stats.std;
    return z * z;
}

FeatureScores score_feature(double x, std::span<const ClassStats> per_class) {
    FeatureScores scores;
    for (const ClassStats& stats : per_class) {
        if (stats.std <= kVarianceEpsilon || stats.count < 2) continue;
        scores.class_ids.push_back(stats.class_id);
        scores.probabilities.push_back(membership_probability(x, stats));
        scores.mahal.push_back(mahal_1d(x, stats));
    }
    return scores;
}

FeatureVerdict verdict_from_scores(int feature_index, const FeatureScores& scores,
                                   const SelectionThresholds& thresholds) {
    FeatureVerdict verdict;
    verdict.feature_index = feature_index;

    const std::size_t n = scores.class_ids.size();
    if (n < 2) return verdict;

    std::size_t p1 = 0, p2 = 1;
    if (scores.probabilities[p2] > scores.probabilities[p1]) std::swap(p1, p2);
    std::size_t m1 = 0, m2 = 1;
    if (scores.mahal[m2] < scores.mahal[m1]) std::swap(m1, m2);
    for (std::size_t i = 2; i < n; ++i) {
        if (scores.probabilities[i] > scores.probabilities[p1]) {
            p2 = p1;
            p1 = i;
        } else if (scores.probabilities[i] > scores.probabilities[p2]) {
            p2 = i;
        }
        if (scores.mahal[i] < scores.mahal[m1]) {
            m2 = m1;
            m1 = i;
        } else if (scores.mahal[i] < scores.mahal[m2]) {
            m2 = i;
        }
    }

    const double prob1 = scores.probabilities[p1];
    const double prob2 = scores.probabilities[p2];
    const double mahal1 = scores.mahal[m1];
    const double mahal2 = scores.mahal[m2];

    // Multiplicative forms of prob1/prob2 > t2 and M1*M1/M2 < t3; immune to
    // zero denominators.
    const bool prob_ok = prob1 > thresholds.thresh1;
    const bool ratio_ok = prob1 > thresholds.thresh2 * prob2;
    const bool mahal_ok = mahal1 * mahal1 < thresholds.thresh3 * mahal2;
    const bool agree = scores.class_ids[p1] == scores.class_ids[m1];

    if (prob_ok && ratio_ok && mahal_ok && agree) {
        verdict.selected = true;
        verdict.winning_class = scores.class_ids[p1];
    }
    return verdict;
}

FeatureVerdict feature_verdict(int feature_index, double x,
                               std::span<const ClassStats> per_class,
                               const SelectionThresholds& thresholds) {
    return verdict_from_scores(feature_index, score_feature(x, per_class), thresholds);
}

} // namespace sensorfix
