#pragma once

#include "sensorfix/classifier.hpp"
#include "sensorfix/dataset.hpp"
#include "sensorfix/numerics.hpp"
#include "sensorfix/reservoir.hpp"

#include <vector>

namespace sensorfix {

struct UosOptions {
    int timeline_window = 30;
};

// Outcome of one classified sample: which features survived selection, how
// the sample was handled, and the resulting pseudo-label.
struct SampleRecord {
    long stream_index = 0;
    std::vector<char> selected; // per view feature
    bool fallback = false;      // empty selection, full preselected mask used
    bool knn_fallback = false;  // covariance still singular after ridge retry
    int predicted = -1;
};

struct SelectionTimeline {
    long n_samples = 0;
    int n_features = 0;
    std::vector<char> selected; // row-major [sample][feature]
    // Trailing-window mean of the selection flags over each sensor's features.
    std::vector<std::vector<double>> sensor_rate; // [sensor][sample]

    bool at(long sample, int feature) const {
        return selected[static_cast<std::size_t>(sample) * n_features +
                        static_cast<std::size_t>(feature)] != 0;
    }
};

// The per-sample online loop: select features against the current reservoir,
// rebuild the core classifier on the surviving columns, predict, then replace
// the oldest template of the predicted class with the new sample.
//
// Ground truth never enters: the reservoir is updated with the prediction.
class UosEngine {
public:
    UosEngine(const LabeledMatrix& training, SensorMap sensors, ClassifierSpec spec,
              SelectionThresholds thresholds, UosOptions options = {});

    int classify_and_adapt(const Eigen::Ref<const Eigen::VectorXd>& sample);

    long samples_seen() const { return static_cast<long>(log_.size()); }
    const std::vector<SampleRecord>& selection_log() const { return log_; }
    SelectionTimeline selection_timeline() const;
    SelectionTimeline selection_timeline(int window) const;

    const SensorMap& sensor_map() const { return sensors_; }
    const Reservoir& reservoir() const { return reservoir_; }
    Reservoir& reservoir_mutable() { return reservoir_; }
    int n_classes() const { return reservoir_.n_classes(); }
    int n_features() const { return reservoir_.n_features(); }
    const ClassifierSpec& spec() const { return spec_; }
    const SelectionThresholds& thresholds() const { return thresholds_; }
    const std::vector<char>& preselected() const { return preselected_; }
    const std::vector<char>& active() const { return active_; }
    std::vector<int> active_preselected() const;
    int active_sensor_count() const;
    bool sensor_active(int sensor_id) const;

    // Self-repair hooks. Deactivation hides a sensor's columns from selection,
    // fitting, and reservoir updates; reactivation restores them.
    void deactivate_sensor(int sensor_id); // throws LastSensor
    void reactivate_sensor(int sensor_id);
    void refresh_preselection(); // FDS pre-selection over the current reservoir
    bool repair_active() const { return repair_active_; }
    void set_repair_active(bool active) { repair_active_ = active; }

private:
    Reservoir reservoir_;
    SensorMap sensors_;
    ClassifierSpec spec_;
    SelectionThresholds thresholds_;
    UosOptions options_;
    std::vector<char> preselected_;
    std::vector<char> active_;
    std::vector<SampleRecord> log_;
    bool repair_active_ = false;

    TrainedModel fit_with_retry(const LabeledMatrix& data, SampleRecord& record) const;
};

// Windowed per-sensor selection rates for an externally stored mask log.
std::vector<std::vector<double>> windowed_sensor_rates(
    const std::vector<std::vector<char>>& masks, const SensorMap& sensors, int window);

} // namespace sensorfix
