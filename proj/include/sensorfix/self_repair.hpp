#pragma once

#include "sensorfix/uos.hpp"

#include <deque>
#include <vector>

namespace sensorfix {

enum class RepairStatus { collecting, ready, merged };

// One pseudo-labeled reading of the replacement sensor, captured while the
// residual array was classifying.
struct SrPoolEntry {
    Eigen::VectorXd new_features;
    int pseudo_label = -1;
    long stream_index = -1;
};

// Calibration state for one replacement sensor. The pool holds the most
// recent `capacity` entries per class; older surplus is dropped, matching the
// reservoir's FIFO semantics.
class RepairSession {
public:
    RepairSession(int sensor_id, int replacement_id, std::vector<int> quarantined_cols,
                  std::vector<long> capacity_per_class, long watermark);

    RepairStatus status() const { return status_; }
    int sensor_id() const { return sensor_id_; }
    int replacement_id() const { return replacement_id_; }
    long watermark() const { return watermark_; }
    const std::vector<int>& quarantined_cols() const { return quarantined_cols_; }
    const std::deque<SrPoolEntry>& pool(int class_id) const;
    long pool_count(int class_id) const;
    bool pool_full() const;

    void append(SrPoolEntry entry);
    void mark_ready() { status_ = RepairStatus::ready; }
    void mark_merged() { status_ = RepairStatus::merged; }

private:
    int sensor_id_;
    int replacement_id_;
    std::vector<int> quarantined_cols_;
    std::vector<long> capacity_;
    long watermark_;
    std::vector<std::deque<SrPoolEntry>> pools_;
    RepairStatus status_ = RepairStatus::collecting;
};

// Drops the failed sensor from the model; classification continues on the
// residual array. Throws LastSensor if nothing would remain.
void remove_sensor(UosEngine& engine, int sensor_id);

// Starts collecting pseudo-labeled readings for the replacement mounted in
// the removed sensor's position. The replacement's columns must already be
// quarantined (sensor removed). Throws RepairInProgress when a session is
// already active on this engine.
RepairSession begin_repair(UosEngine& engine, int failed_sensor_id, int replacement_id);

// Classifies on the residual view, records the replacement sensor's reading
// under the predicted label, and flips the session to ready once the
// reservoir is fully renewed and every class pool reached capacity.
int observe(UosEngine& engine, RepairSession& session,
            const Eigen::Ref<const Eigen::VectorXd>& sample);

// Writes the collected readings into the matching reservoir templates
// (matched by sample index), reactivates the sensor, and refreshes the FDS
// pre-selection over the merged reservoir.
void merge(UosEngine& engine, RepairSession& session);

// Abandons a session without merging; the sensor stays removed.
void abandon(UosEngine& engine, RepairSession& session);

} // namespace sensorfix
