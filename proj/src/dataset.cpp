#include "sensorfix/dataset.hpp"

#include "sensorfix/errors.hpp"

#include <cmath>

namespace sensorfix {

void LabeledMatrix::validate() const {
    if (x.rows() != static_cast<long>(labels.size()))
        throw ConfigError("LabeledMatrix: row count does not match label count");
    if (x.cols() < 1) throw ConfigError("LabeledMatrix: needs at least one feature column");
    if (n_classes < 1) throw ConfigError("LabeledMatrix: n_classes must be positive");
    for (int lb : labels) {
        if (lb < 0 || lb >= n_classes)
            throw ConfigError("LabeledMatrix: label out of range");
    }
    if (!x.allFinite()) throw ConfigError("LabeledMatrix: non-finite value in data block");
}

std::vector<long> LabeledMatrix::class_counts() const {
    std::vector<long> counts(static_cast<std::size_t>(n_classes), 0);
    for (int lb : labels) ++counts[static_cast<std::size_t>(lb)];
    return counts;
}

SensorMap SensorMap::uniform(int n_sensors, int features_per_sensor) {
    SensorMap map;
    map.features_of.resize(static_cast<std::size_t>(n_sensors));
    map.sensor_of.resize(static_cast<std::size_t>(n_sensors) * features_per_sensor);
    for (int s = 0; s < n_sensors; ++s) {
        for (int j = 0; j < features_per_sensor; ++j) {
            const int f = s * features_per_sensor + j;
            map.features_of[static_cast<std::size_t>(s)].push_back(f);
            map.sensor_of[static_cast<std::size_t>(f)] = s;
        }
    }
    return map;
}

} // namespace sensorfix
