#pragma once

#include "sensorfix/dataset.hpp"
#include "sensorfix/rng.hpp"

#include <string>
#include <vector>

namespace sensorfix {

enum class FaultType { zero, random };

FaultType fault_type_from_string(const std::string& s);
std::string to_string(FaultType type);

struct FaultEvent {
    long start = 0;     // test-relative sample index
    long duration = 0;  // 0 means permanent
    int sensor = -1;    // -1 means random, resolved per run
    FaultType type = FaultType::zero;
    bool replace = false; // permanent-fault action in sr mode

    bool permanent() const { return duration <= 0; }
};

struct ResolvedFault {
    FaultEvent event;
    int sensor = -1;
};

// Resolves `random` sensors to distinct picks from a shuffled sensor list and
// validates indices against the stream length.
std::vector<ResolvedFault> resolve_schedule(const std::vector<FaultEvent>& schedule,
                                            int n_sensors, long stream_length, Rng& rng);

// Applies active faults to view-feature rows. Zero faults pin the sensor's
// features to 0; random faults redraw each feature uniformly within its
// training range. Permanent faults persist until the sensor is cleared
// (physically replaced).
class FaultInjector {
public:
    FaultInjector() = default;
    FaultInjector(std::vector<ResolvedFault> schedule, SensorMap sensors,
                  Eigen::VectorXd train_min, Eigen::VectorXd train_max);

    void apply(long t, Eigen::VectorXd& row, Rng& rng) const;
    void clear_sensor(int sensor_id, long t);
    bool fault_active(int sensor_id, long t) const;
    const std::vector<ResolvedFault>& schedule() const { return schedule_; }

private:
    std::vector<ResolvedFault> schedule_;
    SensorMap sensors_;
    Eigen::VectorXd train_min_;
    Eigen::VectorXd train_max_;
    std::vector<char> cleared_;

    bool active_at(const ResolvedFault& fault, long t) const;
};

} // namespace sensorfix
