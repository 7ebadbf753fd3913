#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace sensorfix {

// Row-per-sample measurement block with one class label per row.
// Labels are dense ids in [0, n_classes); names live alongside in datasets.
struct LabeledMatrix {
    Eigen::MatrixXd x;
    std::vector<int> labels;
    int n_classes = 0;

    long rows() const { return x.rows(); }
    long cols() const { return x.cols(); }

    // Throws ConfigError on violated invariants (shape/label range/NaN).
    void validate() const;

    std::vector<long> class_counts() const;
};

// Maps feature columns to sensor identities. One feature per sensor for the
// synthetic array, eight per sensor for the MOx array.
struct SensorMap {
    std::vector<std::vector<int>> features_of;
    std::vector<int> sensor_of;

    static SensorMap uniform(int n_sensors, int features_per_sensor);

    int n_sensors() const { return static_cast<int>(features_of.size()); }
    int n_features() const { return static_cast<int>(sensor_of.size()); }
};

} // namespace sensorfix
