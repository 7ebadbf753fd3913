#pragma once

#include "sensorfix/dataset.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace sensorfix {

// Three-class, five-sensor virtual array with a common linear drift.
// The default profile is calibrated so that classifiers trained once at t=0
// degrade into the 40-55% band over the test stream while the per-sample
// adaptive loop stays near-perfect.
struct SynthConfig {
    int n_classes = 3;
    int n_sensors = 5;
    int train_per_class = 20;
    int n_test = 1200;
    Eigen::MatrixXd class_centers;   // n_classes x n_sensors
    Eigen::VectorXd drift_direction; // n_sensors, unit norm
    double drift_rate = 0.12;        // per test sample
    double noise_std = 1.0;
    std::pair<int, int> overlap_pair = {0, 1};
    double replica_max_dev = 0.20;
    std::uint64_t seed = 1;

    static SynthConfig default_profile();
    void validate() const;
};

struct SyntheticDataset {
    LabeledMatrix train; // time index 0, drift-free
    LabeledMatrix test;  // time index 1..n_test, labels alternate 1,2,3,...
    std::vector<std::string> class_names;
    SensorMap sensors;
    SynthConfig config;
};

SyntheticDataset generate(const SynthConfig& config);

// Noise-free response of one sensor at one time for one class.
double synth_clean_value(const SynthConfig& config, int class_id, int sensor, long t);

// Per-class multiplicative gains of a replacement unit for one sensor.
// Gains are drawn uniformly from [1-dev, 1+dev] and resampled until the
// class response ordering of the copied sensor is preserved.
struct ReplicaTransform {
    int sensor_id = -1;
    std::vector<double> gain_per_class;
};

ReplicaTransform make_replica(const SynthConfig& config, int sensor_id, std::uint64_t seed,
                              int max_retries = 100);

} // namespace sensorfix
