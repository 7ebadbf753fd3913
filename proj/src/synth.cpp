#include "sensorfix/synth.hpp"

#include "sensorfix/errors.hpp"
#include "sensorfix/rng.hpp"

#include <cmath>
#include <string>

namespace sensorfix {

SynthConfig SynthConfig::default_profile() {
    SynthConfig cfg;
    cfg.class_centers.resize(3, 5);
    // Classes march along a common axis on s0/s1/s3, so the drift sweeps each
    // class through the next one's old territory and the once-trained models
    // decay. s2 and s4 sit nearly orthogonal to the drift and carry distinct
    // class orderings, which keeps the selection robust under the reservoir
    // lag and the middle class linearly separable for one-hot regression.
    cfg.class_centers << 10.0, 20.0, 14.0, 30.0, 24.0, // class 1
        18.0, 28.0, 34.0, 38.0, 34.0,                  // class 2
        28.0, 40.0, 24.0, 48.0, 12.0;                  // class 3
    cfg.drift_direction.resize(5);
    cfg.drift_direction << 1.1, 1.0, 0.15, 1.05, 0.12;
    cfg.drift_direction.normalize();
    cfg.drift_rate = 0.12;
    return cfg;
}

void SynthConfig::validate() const {
    if (n_classes < 2) throw ConfigError("synth: need at least two classes");
    if (n_sensors < 1) throw ConfigError("synth: need at least one sensor");
    if (train_per_class < 2) throw ConfigError("synth: need at least two training samples per class");
    if (n_test < 1) throw ConfigError("synth: need a non-empty test stream");
    if (class_centers.rows() != n_classes || class_centers.cols() != n_sensors)
        throw ConfigError("synth: class_centers shape mismatch");
    if (drift_direction.size() != n_sensors)
        throw ConfigError("synth: drift_direction length mismatch");
    if (std::fabs(drift_direction.norm() - 1.0) > 1e-9)
        throw ConfigError("synth: drift_direction must have unit norm");
    if (noise_std < 0.0) throw ConfigError("synth: negative noise_std");
    if (replica_max_dev < 0.0 || replica_max_dev > 0.5)
        throw ConfigError("synth: replica_max_dev must lie in [0, 0.5]");
}

double synth_clean_value(const SynthConfig& config, int class_id, int sensor, long t) {
    return config.class_centers(class_id, sensor) +
           config.drift_rate * static_cast<double>(t) * config.drift_direction(sensor);
}

SyntheticDataset generate(const SynthConfig& config) {
    config.validate();
    Rng rng(config.seed);

    SyntheticDataset ds;
    ds.config = config;
    ds.sensors = SensorMap::uniform(config.n_sensors, 1);
    for (int c = 0; c < config.n_classes; ++c) ds.class_names.push_back(std::to_string(c + 1));

    const long n_train = static_cast<long>(config.n_classes) * config.train_per_class;
    ds.train.x.resize(n_train, config.n_sensors);
    ds.train.labels.resize(static_cast<std::size_t>(n_train));
    ds.train.n_classes = config.n_classes;
    long row = 0;
    for (int c = 0; c < config.n_classes; ++c) {
        for (int i = 0; i < config.train_per_class; ++i, ++row) {
            ds.train.labels[static_cast<std::size_t>(row)] = c;
            for (int s = 0; s < config.n_sensors; ++s)
                ds.train.x(row, s) =
                    config.class_centers(c, s) + rng.normal(0.0, config.noise_std);
        }
    }

    ds.test.x.resize(config.n_test, config.n_sensors);
    ds.test.labels.resize(static_cast<std::size_t>(config.n_test));
    ds.test.n_classes = config.n_classes;
    for (long t = 1; t <= config.n_test; ++t) {
        const int c = static_cast<int>((t - 1) % config.n_classes);
        ds.test.labels[static_cast<std::size_t>(t - 1)] = c;
        for (int s = 0; s < config.n_sensors; ++s)
            ds.test.x(t - 1, s) =
                synth_clean_value(config, c, s, t) + rng.normal(0.0, config.noise_std);
    }
    return ds;
}

namespace {

int sign_of(double x) { return x > 0.0 ? 1 : (x < 0.0 ? -1 : 0); }

bool ordering_preserved(const SynthConfig& config, int sensor,
                        const std::vector<double>& gains) {
    for (int a = 0; a < config.n_classes; ++a) {
        for (int b = a + 1; b < config.n_classes; ++b) {
            const double ca = config.class_centers(a, sensor);
            const double cb = config.class_centers(b, sensor);
            const double ra = gains[static_cast<std::size_t>(a)] * ca;
            const double rb = gains[static_cast<std::size_t>(b)] * cb;
            if (sign_of(ca - cb) != sign_of(ra - rb)) return false;
        }
    }
    return true;
}

} // namespace

ReplicaTransform make_replica(const SynthConfig& config, int sensor_id, std::uint64_t seed,
                              int max_retries) {
    config.validate();
    if (sensor_id < 0 || sensor_id >= config.n_sensors)
        throw ConfigError("make_replica: sensor out of range");

    Rng rng(seed);
    ReplicaTransform replica;
    replica.sensor_id = sensor_id;
    replica.gain_per_class.resize(static_cast<std::size_t>(config.n_classes));

    const double dev = config.replica_max_dev;
    for (int attempt = 0; attempt < max_retries; ++attempt) {
        for (int c = 0; c < config.n_classes; ++c)
            replica.gain_per_class[static_cast<std::size_t>(c)] =
                rng.uniform(1.0 - dev, 1.0 + dev);
        if (ordering_preserved(config, sensor_id, replica.gain_per_class)) return replica;
    }
    throw OrderingViolation("make_replica: could not preserve class response ordering for sensor " +
                            std::to_string(sensor_id));
}

} // namespace sensorfix
