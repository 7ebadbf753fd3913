#pragma once

#include "sensorfix/dataset.hpp"
#include "sensorfix/numerics.hpp"

#include <deque>
#include <vector>

namespace sensorfix {

// One template row of the reservoir. Inactive feature columns hold NaN until
// a merge writes them; active columns always hold measured values.
struct Template {
    Eigen::VectorXd row;
    long insert_order = 0;
    long stream_index = -1; // -1 for training templates
};

// Fixed-capacity per-class FIFO pools. Capacity is frozen at construction;
// eviction and insertion are paired, so per-class sizes never change.
class Reservoir {
public:
    Reservoir() = default;
    explicit Reservoir(const LabeledMatrix& training);

    int n_classes() const { return static_cast<int>(pools_.size()); }
    int n_features() const { return n_features_; }
    long capacity(int class_id) const;
    long total_templates() const;
    long next_insert_order() const { return next_insert_; }

    const std::deque<Template>& pool(int class_id) const;
    std::deque<Template>& pool_mutable(int class_id);

    // Evicts the oldest template of the class and appends the new row.
    // Returns the insertion order assigned to the new template.
    long replace_oldest(int class_id, Eigen::VectorXd row, long stream_index);

    // Mean and population std of one feature over one class's templates.
    ClassStats stats(int class_id, int feature) const;

    // True when every template was inserted after the watermark.
    bool fully_renewed_since(long watermark) const;

    // Templates stacked into a labeled block, restricted to the given columns.
    LabeledMatrix as_matrix(const std::vector<int>& feature_cols) const;

private:
    std::vector<std::deque<Template>> pools_;
    int n_features_ = 0;
    long next_insert_ = 0;
};

} // namespace sensorfix
