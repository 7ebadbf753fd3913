#include "sensorfix/uos.hpp"

#include "sensorfix/errors.hpp"
#include "sensorfix/log.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sensorfix {

UosEngine::UosEngine(const LabeledMatrix& training, SensorMap sensors, ClassifierSpec spec,
                     SelectionThresholds thresholds, UosOptions options)
    : reservoir_(training),
      sensors_(std::move(sensors)),
      spec_(spec),
      thresholds_(thresholds),
      options_(options) {
    thresholds_.validate();
    if (sensors_.n_features() != reservoir_.n_features())
        throw ConfigError("uos: sensor map does not cover the feature columns");
    const auto counts = training.class_counts();
    for (int c = 0; c < training.n_classes; ++c) {
        if (counts[static_cast<std::size_t>(c)] < 2)
            throw ConfigError("uos: class " + std::to_string(c) +
                              " has fewer than two training samples");
    }

    preselected_ = preselect_features(training);
    active_.assign(static_cast<std::size_t>(reservoir_.n_features()), 1);
    if (std::none_of(preselected_.begin(), preselected_.end(), [](char v) { return v != 0; }))
        throw EmptyPreselection("uos: no feature has an FDS ratio above 1");
}

std::vector<int> UosEngine::active_preselected() const {
    std::vector<int> cols;
    for (int f = 0; f < n_features(); ++f)
        if (active_[static_cast<std::size_t>(f)] && preselected_[static_cast<std::size_t>(f)])
            cols.push_back(f);
    return cols;
}

int UosEngine::active_sensor_count() const {
    int count = 0;
    for (int s = 0; s < sensors_.n_sensors(); ++s)
        if (sensor_active(s)) ++count;
    return count;
}

bool UosEngine::sensor_active(int sensor_id) const {
    for (int f : sensors_.features_of[static_cast<std::size_t>(sensor_id)])
        if (active_[static_cast<std::size_t>(f)]) return true;
    return false;
}

TrainedModel UosEngine::fit_with_retry(const LabeledMatrix& data, SampleRecord& record) const {
    try {
        return fit(spec_, data);
    } catch (const SingularCovariance&) {
        ClassifierSpec boosted = spec_;
        boosted.ridge = spec_.ridge > 0.0 ? spec_.ridge * 10.0 : 1e-5;
        try {
            return fit(boosted, data);
        } catch (const SingularCovariance&) {
            log::warn("uos: covariance singular after ridge retry, using knn for this sample");
            record.knn_fallback = true;
            ClassifierSpec knn_spec;
            knn_spec.kind = ClassifierKind::knn;
            knn_spec.k = spec_.k;
            return fit(knn_spec, data);
        }
    }
}

int UosEngine::classify_and_adapt(const Eigen::Ref<const Eigen::VectorXd>& sample) {
    if (sample.size() != n_features())
        throw DimensionMismatch("uos: sample width does not match the array view");

    SampleRecord record;
    record.stream_index = samples_seen();
    record.selected.assign(static_cast<std::size_t>(n_features()), 0);

    std::vector<int> candidates = active_preselected();
    if (candidates.empty()) {
        // Pre-selection can die out after removals; selection needs at least
        // one column to keep classifying.
        for (int f = 0; f < n_features(); ++f)
            if (active_[static_cast<std::size_t>(f)]) candidates.push_back(f);
        log::warn("uos: preselected mask empty, selecting over all active features");
    }

    std::vector<ClassStats> stats(static_cast<std::size_t>(n_classes()));
    std::vector<int> chosen;
    for (int f : candidates) {
        for (int c = 0; c < n_classes(); ++c)
            stats[static_cast<std::size_t>(c)] = reservoir_.stats(c, f);
        const FeatureVerdict verdict = feature_verdict(f, sample(f), stats, thresholds_);
        if (verdict.selected) {
            chosen.push_back(f);
            record.selected[static_cast<std::size_t>(f)] = 1;
        }
    }

    if (chosen.empty()) {
        record.fallback = true;
        chosen = candidates;
        for (int f : chosen) record.selected[static_cast<std::size_t>(f)] = 1;
    }

    const LabeledMatrix pool = reservoir_.as_matrix(chosen);
    const TrainedModel model = fit_with_retry(pool, record);

    Eigen::VectorXd projected(static_cast<long>(chosen.size()));
    for (std::size_t j = 0; j < chosen.size(); ++j) projected(static_cast<long>(j)) = sample(chosen[j]);
    record.predicted = model.predict(projected);

    Eigen::VectorXd stored = sample;
    for (int f = 0; f < n_features(); ++f)
        if (!active_[static_cast<std::size_t>(f)])
            stored(f) = std::numeric_limits<double>::quiet_NaN();
    reservoir_.replace_oldest(record.predicted, std::move(stored), record.stream_index);

    log_.push_back(std::move(record));
    return log_.back().predicted;
}

void UosEngine::deactivate_sensor(int sensor_id) {
    if (sensor_id < 0 || sensor_id >= sensors_.n_sensors())
        throw ConfigError("uos: sensor id out of range");
    if (!sensor_active(sensor_id))
        throw ConfigError("uos: sensor " + std::to_string(sensor_id) + " already removed");
    if (active_sensor_count() <= 1)
        throw LastSensor("uos: removing sensor " + std::to_string(sensor_id) +
                         " would empty the array");
    for (int f : sensors_.features_of[static_cast<std::size_t>(sensor_id)]) {
        active_[static_cast<std::size_t>(f)] = 0;
        preselected_[static_cast<std::size_t>(f)] = 0;
    }
}

void UosEngine::reactivate_sensor(int sensor_id) {
    if (sensor_id < 0 || sensor_id >= sensors_.n_sensors())
        throw ConfigError("uos: sensor id out of range");
    for (int f : sensors_.features_of[static_cast<std::size_t>(sensor_id)])
        active_[static_cast<std::size_t>(f)] = 1;
}

void UosEngine::refresh_preselection() {
    std::vector<int> cols;
    for (int f = 0; f < n_features(); ++f)
        if (active_[static_cast<std::size_t>(f)]) cols.push_back(f);

    const LabeledMatrix pool = reservoir_.as_matrix(cols);
    const std::vector<char> mask = preselect_features(pool);

    std::fill(preselected_.begin(), preselected_.end(), 0);
    for (std::size_t j = 0; j < cols.size(); ++j)
        preselected_[static_cast<std::size_t>(cols[j])] = mask[j];
    if (std::none_of(preselected_.begin(), preselected_.end(), [](char v) { return v != 0; }))
        log::warn("uos: refreshed preselection is empty");
}

SelectionTimeline UosEngine::selection_timeline() const {
    return selection_timeline(options_.timeline_window);
}

SelectionTimeline UosEngine::selection_timeline(int window) const {
    std::vector<std::vector<char>> masks;
    masks.reserve(log_.size());
    for (const SampleRecord& rec : log_) masks.push_back(rec.selected);

    SelectionTimeline timeline;
    timeline.n_samples = samples_seen();
    timeline.n_features = n_features();
    timeline.selected.reserve(static_cast<std::size_t>(timeline.n_samples) * timeline.n_features);
    for (const auto& mask : masks)
        timeline.selected.insert(timeline.selected.end(), mask.begin(), mask.end());
    timeline.sensor_rate = windowed_sensor_rates(masks, sensors_, window);
    return timeline;
}

std::vector<std::vector<double>> windowed_sensor_rates(
    const std::vector<std::vector<char>>& masks, const SensorMap& sensors, int window) {
    const long n = static_cast<long>(masks.size());
    std::vector<std::vector<double>> rates(
        static_cast<std::size_t>(sensors.n_sensors()),
        std::vector<double>(static_cast<std::size_t>(n), 0.0));
    if (n == 0) return rates;

    for (int s = 0; s < sensors.n_sensors(); ++s) {
        const auto& feats = sensors.features_of[static_cast<std::size_t>(s)];
        // running sum of per-sample means over the sensor's features
        std::vector<double> per_sample(static_cast<std::size_t>(n), 0.0);
        for (long t = 0; t < n; ++t) {
            double sum = 0.0;
            for (int f : feats) sum += masks[static_cast<std::size_t>(t)][static_cast<std::size_t>(f)];
            per_sample[static_cast<std::size_t>(t)] = sum / static_cast<double>(feats.size());
        }
        double acc = 0.0;
        for (long t = 0; t < n; ++t) {
            acc += per_sample[static_cast<std::size_t>(t)];
            if (t >= window) acc -= per_sample[static_cast<std::size_t>(t - window)];
            const long span = std::min<long>(t + 1, window);
            rates[static_cast<std::size_t>(s)][static_cast<std::size_t>(t)] =
                acc / static_cast<double>(span);
        }
    }
    return rates;
}

} // namespace sensorfix
