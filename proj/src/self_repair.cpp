#include "sensorfix/self_repair.hpp"

#include "sensorfix/errors.hpp"

#include <string>
#include <unordered_map>

namespace sensorfix {

RepairSession::RepairSession(int sensor_id, int replacement_id,
                             std::vector<int> quarantined_cols,
                             std::vector<long> capacity_per_class, long watermark)
    : sensor_id_(sensor_id),
      replacement_id_(replacement_id),
      quarantined_cols_(std::move(quarantined_cols)),
      capacity_(std::move(capacity_per_class)),
      watermark_(watermark),
      pools_(capacity_.size()) {}

const std::deque<SrPoolEntry>& RepairSession::pool(int class_id) const {
    return pools_[static_cast<std::size_t>(class_id)];
}

long RepairSession::pool_count(int class_id) const {
    return static_cast<long>(pools_[static_cast<std::size_t>(class_id)].size());
}

bool RepairSession::pool_full() const {
    for (std::size_t c = 0; c < pools_.size(); ++c)
        if (static_cast<long>(pools_[c].size()) < capacity_[c]) return false;
    return true;
}

void RepairSession::append(SrPoolEntry entry) {
    const int c = entry.pseudo_label;
    auto& pool = pools_[static_cast<std::size_t>(c)];
    pool.push_back(std::move(entry));
    while (static_cast<long>(pool.size()) > capacity_[static_cast<std::size_t>(c)])
        pool.pop_front();
}

void remove_sensor(UosEngine& engine, int sensor_id) {
    engine.deactivate_sensor(sensor_id);
}

RepairSession begin_repair(UosEngine& engine, int failed_sensor_id, int replacement_id) {
    if (engine.repair_active())
        throw RepairInProgress("self-repair: a session is already active on this model");
    if (engine.sensor_active(failed_sensor_id))
        throw ConfigError("self-repair: sensor " + std::to_string(failed_sensor_id) +
                          " must be removed before repair starts");

    std::vector<long> capacities;
    for (int c = 0; c < engine.n_classes(); ++c)
        capacities.push_back(engine.reservoir().capacity(c));

    RepairSession session(failed_sensor_id, replacement_id,
                          engine.sensor_map().features_of[static_cast<std::size_t>(failed_sensor_id)],
                          std::move(capacities), engine.reservoir().next_insert_order() - 1);
    engine.set_repair_active(true);
    return session;
}

int observe(UosEngine& engine, RepairSession& session,
            const Eigen::Ref<const Eigen::VectorXd>& sample) {
    if (session.status() == RepairStatus::merged)
        throw ConfigError("self-repair: observe called on a merged session");

    const int predicted = engine.classify_and_adapt(sample);

    SrPoolEntry entry;
    entry.pseudo_label = predicted;
    entry.stream_index = engine.samples_seen() - 1;
    entry.new_features.resize(static_cast<long>(session.quarantined_cols().size()));
    for (std::size_t j = 0; j < session.quarantined_cols().size(); ++j)
        entry.new_features(static_cast<long>(j)) = sample(session.quarantined_cols()[j]);
    session.append(std::move(entry));

    if (session.status() == RepairStatus::collecting && session.pool_full() &&
        engine.reservoir().fully_renewed_since(session.watermark()))
        session.mark_ready();
    return predicted;
}

void merge(UosEngine& engine, RepairSession& session) {
    if (session.status() != RepairStatus::ready)
        throw ConfigError("self-repair: merge requires a ready session");

    Reservoir& reservoir = engine.reservoir_mutable();
    for (int c = 0; c < reservoir.n_classes(); ++c) {
        std::unordered_map<long, const SrPoolEntry*> by_index;
        for (const SrPoolEntry& entry : session.pool(c)) by_index[entry.stream_index] = &entry;

        for (Template& tpl : reservoir.pool_mutable(c)) {
            const auto it = by_index.find(tpl.stream_index);
            if (it == by_index.end())
                throw AlignmentGap("self-repair: reservoir template at stream index " +
                                   std::to_string(tpl.stream_index) +
                                   " has no collected entry for the new sensor");
            const SrPoolEntry& entry = *it->second;
            for (std::size_t j = 0; j < session.quarantined_cols().size(); ++j)
                tpl.row(session.quarantined_cols()[j]) = entry.new_features(static_cast<long>(j));
        }
    }

    engine.reactivate_sensor(session.sensor_id());
    engine.refresh_preselection();
    engine.set_repair_active(false);
    session.mark_merged();
}

void abandon(UosEngine& engine, RepairSession& session) {
    if (session.status() == RepairStatus::merged)
        throw ConfigError("self-repair: cannot abandon a merged session");
    engine.set_repair_active(false);
}

} // namespace sensorfix
