#include "sensorfix/reservoir.hpp"

#include "sensorfix/errors.hpp"

#include <cmath>

namespace sensorfix {

Reservoir::Reservoir(const LabeledMatrix& training) {
    training.validate();
    pools_.resize(static_cast<std::size_t>(training.n_classes));
    n_features_ = static_cast<int>(training.cols());
    for (long r = 0; r < training.rows(); ++r) {
        Template tpl;
        tpl.row = training.x.row(r).transpose();
        tpl.insert_order = next_insert_++;
        tpl.stream_index = -1;
        pools_[static_cast<std::size_t>(training.labels[static_cast<std::size_t>(r)])]
            .push_back(std::move(tpl));
    }
}

long Reservoir::capacity(int class_id) const {
    return static_cast<long>(pools_[static_cast<std::size_t>(class_id)].size());
}

long Reservoir::total_templates() const {
    long total = 0;
    for (const auto& pool : pools_) total += static_cast<long>(pool.size());
    return total;
}

const std::deque<Template>& Reservoir::pool(int class_id) const {
    return pools_[static_cast<std::size_t>(class_id)];
}

std::deque<Template>& Reservoir::pool_mutable(int class_id) {
    return pools_[static_cast<std::size_t>(class_id)];
}

long Reservoir::replace_oldest(int class_id, Eigen::VectorXd row, long stream_index) {
    auto& pool = pools_[static_cast<std::size_t>(class_id)];
    if (pool.empty())
        throw ConfigError("reservoir: class " + std::to_string(class_id) + " has no capacity");
    if (row.size() != n_features_)
        throw DimensionMismatch("reservoir: row width does not match templates");
    pool.pop_front();
    Template tpl;
    tpl.row = std::move(row);
    tpl.insert_order = next_insert_++;
    tpl.stream_index = stream_index;
    const long order = tpl.insert_order;
    pool.push_back(std::move(tpl));
    return order;
}

ClassStats Reservoir::stats(int class_id, int feature) const {
    const auto& pool = pools_[static_cast<std::size_t>(class_id)];
    ClassStats stats;
    stats.class_id = class_id;
    stats.count = static_cast<long>(pool.size());
    if (pool.empty()) return stats;
    double sum = 0.0;
    for (const Template& tpl : pool) sum += tpl.row(feature);
    stats.mean = sum / static_cast<double>(pool.size());
    double ss = 0.0;
    for (const Template& tpl : pool) {
        const double d = tpl.row(feature) - stats.mean;
        ss += d * d;
    }
    stats.std = std::sqrt(ss / static_cast<double>(pool.size()));
    return stats;
}

bool Reservoir::fully_renewed_since(long watermark) const {
    for (const auto& pool : pools_) {
        // FIFO: the front is the oldest template of the class.
        if (!pool.empty() && pool.front().insert_order <= watermark) return false;
    }
    return true;
}

LabeledMatrix Reservoir::as_matrix(const std::vector<int>& feature_cols) const {
    LabeledMatrix out;
    out.n_classes = n_classes();
    out.x.resize(total_templates(), static_cast<long>(feature_cols.size()));
    out.labels.reserve(static_cast<std::size_t>(total_templates()));
    long r = 0;
    for (int c = 0; c < n_classes(); ++c) {
        for (const Template& tpl : pools_[static_cast<std::size_t>(c)]) {
            for (std::size_t j = 0; j < feature_cols.size(); ++j)
                out.x(r, static_cast<long>(j)) = tpl.row(feature_cols[j]);
            out.labels.push_back(c);
            ++r;
        }
    }
    return out;
}

} // namespace sensorfix
