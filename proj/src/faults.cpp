#include "sensorfix/faults.hpp"

#include "sensorfix/errors.hpp"

#include <numeric>
#include <string>

namespace sensorfix {

FaultType fault_type_from_string(const std::string& s) {
    if (s == "zero") return FaultType::zero;
    if (s == "random") return FaultType::random;
    throw ConfigError("unknown fault type: " + s);
}

std::string to_string(FaultType type) {
    return type == FaultType::zero ? "zero" : "random";
}

std::vector<ResolvedFault> resolve_schedule(const std::vector<FaultEvent>& schedule,
                                            int n_sensors, long stream_length, Rng& rng) {
    std::vector<int> order(static_cast<std::size_t>(n_sensors));
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);

    std::vector<ResolvedFault> resolved;
    std::size_t next_random = 0;
    for (const FaultEvent& event : schedule) {
        if (event.start < 0 || event.start >= stream_length)
            throw ScheduleOutOfRange("fault start " + std::to_string(event.start) +
                                     " outside the test stream of length " +
                                     std::to_string(stream_length));
        ResolvedFault rf;
        rf.event = event;
        if (event.sensor >= 0) {
            if (event.sensor >= n_sensors)
                throw ScheduleOutOfRange("fault sensor " + std::to_string(event.sensor) +
                                         " outside the array of " + std::to_string(n_sensors));
            rf.sensor = event.sensor;
        } else {
            if (next_random >= order.size())
                throw ScheduleOutOfRange("more random fault events than sensors in the array");
            rf.sensor = order[next_random++];
        }
        resolved.push_back(rf);
    }
    return resolved;
}

FaultInjector::FaultInjector(std::vector<ResolvedFault> schedule, SensorMap sensors,
                             Eigen::VectorXd train_min, Eigen::VectorXd train_max)
    : schedule_(std::move(schedule)),
      sensors_(std::move(sensors)),
      train_min_(std::move(train_min)),
      train_max_(std::move(train_max)),
      cleared_(schedule_.size(), 0) {}

bool FaultInjector::active_at(const ResolvedFault& fault, long t) const {
    const std::size_t idx = static_cast<std::size_t>(&fault - schedule_.data());
    if (t < fault.event.start) return false;
    if (fault.event.permanent()) return !cleared_[idx];
    return t < fault.event.start + fault.event.duration;
}

void FaultInjector::apply(long t, Eigen::VectorXd& row, Rng& rng) const {
    for (const ResolvedFault& fault : schedule_) {
        if (!active_at(fault, t)) continue;
        for (int f : sensors_.features_of[static_cast<std::size_t>(fault.sensor)]) {
            if (fault.event.type == FaultType::zero)
                row(f) = 0.0;
            else
                row(f) = rng.uniform(train_min_(f), train_max_(f));
        }
    }
}

void FaultInjector::clear_sensor(int sensor_id, long t) {
    // A replacement ends the permanent faults already active on the slot;
    // faults scheduled for a later time stay armed.
    for (std::size_t i = 0; i < schedule_.size(); ++i) {
        const ResolvedFault& fault = schedule_[i];
        if (fault.sensor == sensor_id && fault.event.permanent() && fault.event.start <= t)
            cleared_[i] = 1;
    }
}

bool FaultInjector::fault_active(int sensor_id, long t) const {
    for (const ResolvedFault& fault : schedule_)
        if (fault.sensor == sensor_id && active_at(fault, t)) return true;
    return false;
}

} // namespace sensorfix
