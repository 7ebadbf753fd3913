#include "sensorfix/experiment.hpp"

#include "sensorfix/errors.hpp"
#include "sensorfix/log.hpp"
#include "sensorfix/self_repair.hpp"
#include "sensorfix/uos.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <memory>
#include <sstream>
#include <thread>
#include <utility>

namespace sensorfix {

RunMode run_mode_from_string(const std::string& s) {
    if (s == "standard") return RunMode::standard;
    if (s == "uos") return RunMode::uos;
    if (s == "sr") return RunMode::sr;
    throw ConfigError("unknown mode: " + s);
}

std::string to_string(RunMode mode) {
    switch (mode) {
        case RunMode::standard: return "standard";
        case RunMode::uos: return "uos";
        case RunMode::sr: return "sr";
    }
    return "?";
}

std::string ExperimentConfig::fault_type_label() const {
    if (faults.empty()) return "none";
    const FaultType first = faults.front().type;
    for (const auto& f : faults)
        if (f.type != first) return "mixed";
    return to_string(first);
}

namespace {

// Per-run view of the test stream with faults and replacements applied.
// The engine never sees anything but what comes out of emit().
class SampleSource {
public:
    virtual ~SampleSource() = default;

    const LabeledMatrix& training() const { return train_; }
    const SensorMap& view_map() const { return view_map_; }
    long test_size() const { return n_test_; }
    int truth(long t) const { return truth_[static_cast<std::size_t>(t)]; }

    Eigen::VectorXd emit(long t) {
        Eigen::VectorXd row = base_row(t);
        injector_.apply(t, row, fault_rng_);
        return row;
    }

    const std::vector<ResolvedFault>& schedule() const { return injector_.schedule(); }

    // Swaps the slot's stream to the replacement unit/replica and ends its
    // active permanent faults. Returns an id for the episode log.
    virtual int replace_sensor(int slot, long t) = 0;

protected:
    virtual Eigen::VectorXd base_row(long t) = 0;

    void init_injector(const std::vector<FaultEvent>& schedule, Rng& schedule_rng) {
        Eigen::VectorXd lo = train_.x.colwise().minCoeff().transpose();
        Eigen::VectorXd hi = train_.x.colwise().maxCoeff().transpose();
        injector_ = FaultInjector(
            resolve_schedule(schedule, view_map_.n_sensors(), n_test_, schedule_rng),
            view_map_, std::move(lo), std::move(hi));
    }

    LabeledMatrix train_;
    SensorMap view_map_;
    long n_test_ = 0;
    std::vector<int> truth_;
    FaultInjector injector_;
    Rng fault_rng_{0};
};

class SynthSource final : public SampleSource {
public:
    SynthSource(SyntheticDataset dataset, const std::vector<FaultEvent>& schedule,
                Rng& schedule_rng, std::uint64_t fault_seed, std::uint64_t noise_seed)
        : dataset_(std::move(dataset)), noise_rng_(noise_seed) {
        train_ = dataset_.train;
        view_map_ = dataset_.sensors;
        n_test_ = dataset_.test.rows();
        truth_ = dataset_.test.labels;
        fault_rng_ = Rng(fault_seed);
        replica_.resize(static_cast<std::size_t>(dataset_.config.n_sensors));
        replaced_at_.assign(static_cast<std::size_t>(dataset_.config.n_sensors), -1);
        replica_seed_rng_ = &schedule_rng;
        init_injector(schedule, schedule_rng);
    }

    int replace_sensor(int slot, long t) override {
        replica_[static_cast<std::size_t>(slot)] =
            make_replica(dataset_.config, slot, replica_seed_rng_->next_u64());
        replaced_at_[static_cast<std::size_t>(slot)] = t;
        injector_.clear_sensor(slot, t);
        return slot;
    }

protected:
    Eigen::VectorXd base_row(long t) override {
        Eigen::VectorXd row = dataset_.test.x.row(t).transpose();
        const int c = truth_[static_cast<std::size_t>(t)];
        for (int s = 0; s < dataset_.config.n_sensors; ++s) {
            const long at = replaced_at_[static_cast<std::size_t>(s)];
            if (at < 0 || t < at) continue;
            const auto& gains = replica_[static_cast<std::size_t>(s)]->gain_per_class;
            // replica response: scaled clean class response + common drift + fresh noise
            row(s) = gains[static_cast<std::size_t>(c)] * dataset_.config.class_centers(c, s) +
                     dataset_.config.drift_rate * static_cast<double>(t + 1) *
                         dataset_.config.drift_direction(s) +
                     noise_rng_.normal(0.0, dataset_.config.noise_std);
        }
        return row;
    }

private:
    SyntheticDataset dataset_;
    Rng noise_rng_;
    Rng* replica_seed_rng_ = nullptr;
    std::vector<std::optional<ReplicaTransform>> replica_;
    std::vector<long> replaced_at_;
};

// Experimental source: the stored records keep all 16 units (128 columns);
// the live array is one unit per commercial model. Replacement re-points a
// slot at an unused unit of the same model.
class MoxSource final : public SampleSource {
public:
    MoxSource(const StoredDataset& data, const std::vector<FaultEvent>& schedule,
              Rng& schedule_rng, std::uint64_t fault_seed)
        : data_(&data) {
        model_groups_ = data.meta.value("model_groups", std::vector<std::vector<int>>{});
        if (model_groups_.empty()) {
            // fall back to grouping consecutive units
            const int per_model = 4;
            const int n_models = data.sensors.n_sensors() / per_model;
            for (int m = 0; m < n_models; ++m) {
                model_groups_.emplace_back();
                for (int u = 0; u < per_model; ++u)
                    model_groups_.back().push_back(m * per_model + u);
            }
        }

        const int n_slots = static_cast<int>(model_groups_.size());
        const int feats_per_sensor =
            static_cast<int>(data.sensors.features_of.front().size());
        view_map_ = SensorMap::uniform(n_slots, feats_per_sensor);

        used_.assign(static_cast<std::size_t>(data.sensors.n_sensors()), 0);
        slot_unit_.resize(static_cast<std::size_t>(n_slots));
        for (int m = 0; m < n_slots; ++m) {
            const auto& units = model_groups_[static_cast<std::size_t>(m)];
            const int pick = units[static_cast<std::size_t>(
                schedule_rng.uniform_int(0, static_cast<int>(units.size()) - 1))];
            slot_unit_[static_cast<std::size_t>(m)] = pick;
            used_[static_cast<std::size_t>(pick)] = 1;
        }

        n_test_ = data.test.rows();
        truth_ = data.test.labels;
        fault_rng_ = Rng(fault_seed);
        schedule_rng_ = &schedule_rng;

        train_.n_classes = data.train.n_classes;
        train_.labels = data.train.labels;
        train_.x.resize(data.train.rows(), view_map_.n_features());
        for (long r = 0; r < data.train.rows(); ++r) train_.x.row(r) = gather(data.train.x.row(r));

        init_injector(schedule, schedule_rng);
    }

    int replace_sensor(int slot, long t) override {
        const int current = slot_unit_[static_cast<std::size_t>(slot)];
        int model = -1;
        for (std::size_t m = 0; m < model_groups_.size(); ++m)
            for (int u : model_groups_[m])
                if (u == current) model = static_cast<int>(m);

        std::vector<int> candidates;
        for (int u : model_groups_[static_cast<std::size_t>(model)])
            if (!used_[static_cast<std::size_t>(u)]) candidates.push_back(u);
        if (candidates.empty())
            throw ScheduleOutOfRange("no unused replacement unit left for model " +
                                     std::to_string(model));
        const int pick = candidates[static_cast<std::size_t>(
            schedule_rng_->uniform_int(0, static_cast<int>(candidates.size()) - 1))];
        used_[static_cast<std::size_t>(pick)] = 1;
        slot_unit_[static_cast<std::size_t>(slot)] = pick;
        injector_.clear_sensor(slot, t);
        return pick;
    }

protected:
    Eigen::VectorXd base_row(long t) override { return gather(data_->test.x.row(t)); }

private:
    Eigen::VectorXd gather(const Eigen::RowVectorXd& full) const {
        Eigen::VectorXd row(view_map_.n_features());
        long out = 0;
        for (std::size_t slot = 0; slot < slot_unit_.size(); ++slot) {
            const auto& feats =
                data_->sensors.features_of[static_cast<std::size_t>(slot_unit_[slot])];
            for (int f : feats) row(out++) = full(f);
        }
        return row;
    }

    const StoredDataset* data_;
    std::vector<std::vector<int>> model_groups_;
    std::vector<int> slot_unit_;
    std::vector<char> used_;
    Rng* schedule_rng_ = nullptr;
};

std::unique_ptr<SampleSource> make_source(const ExperimentConfig& config,
                                          const StoredDataset* csv_data, Rng& schedule_rng,
                                          std::uint64_t data_seed, std::uint64_t fault_seed,
                                          std::uint64_t noise_seed) {
    if (config.source == ExperimentConfig::Source::synthetic) {
        SynthConfig synth = config.synth;
        synth.seed = data_seed;
        return std::make_unique<SynthSource>(generate(synth), config.faults, schedule_rng,
                                             fault_seed, noise_seed);
    }
    if (!csv_data) throw ConfigError("csv dataset source requires loaded data");
    if (csv_data->kind() == "synthetic") {
        SyntheticDataset ds;
        ds.train = csv_data->train;
        ds.test = csv_data->test;
        ds.class_names = csv_data->class_names;
        ds.sensors = csv_data->sensors;
        ds.config = config.synth; // profile travels in the run config / meta
        return std::make_unique<SynthSource>(std::move(ds), config.faults, schedule_rng,
                                             fault_seed, noise_seed);
    }
    return std::make_unique<MoxSource>(*csv_data, config.faults, schedule_rng, fault_seed);
}

} // namespace

RunResult run_one(const ExperimentConfig& config, const StoredDataset* csv_data,
                  int run_index) {
    RunResult res;
    res.run_index = run_index;
    res.seed = mix_seed(config.base_seed, static_cast<std::uint64_t>(run_index), 1);

    try {
        Rng schedule_rng(mix_seed(config.base_seed, static_cast<std::uint64_t>(run_index), 2));
        auto source = make_source(
            config, csv_data, schedule_rng, res.seed,
            mix_seed(config.base_seed, static_cast<std::uint64_t>(run_index), 3),
            mix_seed(config.base_seed, static_cast<std::uint64_t>(run_index), 4));

        for (const ResolvedFault& f : source->schedule()) res.fault_sensors.push_back(f.sensor);

        const long n = source->test_size();
        res.predicted.reserve(static_cast<std::size_t>(n));
        res.truth.reserve(static_cast<std::size_t>(n));
        for (long t = 0; t < n; ++t) res.truth.push_back(source->truth(t));

        if (config.mode == RunMode::standard) {
            const TrainedModel model = fit(config.classifier, source->training());
            for (long t = 0; t < n; ++t)
                res.predicted.push_back(model.predict(source->emit(t)));
        } else {
            UosEngine engine(source->training(), source->view_map(), config.classifier,
                             config.thresholds, UosOptions{config.timeline_window});
            std::optional<RepairSession> session;
            std::vector<std::pair<long, int>> pending; // (due time, slot)

            for (long t = 0; t < n; ++t) {
                for (const ResolvedFault& fault : source->schedule()) {
                    if (fault.event.start != t) continue;
                    res.episodes.push_back(
                        {"fault", t, fault.sensor,
                         to_string(fault.event.type) +
                             (fault.event.permanent()
                                  ? std::string(",permanent")
                                  : ",duration=" + std::to_string(fault.event.duration))});
                    if (config.mode == RunMode::sr && fault.event.permanent() &&
                        fault.event.replace)
                        pending.emplace_back(t + config.detection_latency, fault.sensor);
                }

                for (auto it = pending.begin(); it != pending.end();) {
                    if (it->first > t) {
                        ++it;
                        continue;
                    }
                    const int slot = it->second;
                    it = pending.erase(it);
                    if (session) {
                        // a new failure arrived before the previous repair
                        // finished; the old sensor stays out of the array
                        res.flagged = true;
                        log::warn("run " + std::to_string(run_index) +
                                  ": overlapping repair, abandoning sensor " +
                                  std::to_string(session->sensor_id()));
                        abandon(engine, *session);
                        session.reset();
                    }
                    remove_sensor(engine, slot);
                    res.episodes.push_back({"remove", t, slot, ""});
                    const int replacement = source->replace_sensor(slot, t);
                    res.replacements.push_back(replacement);
                    session.emplace(begin_repair(engine, slot, replacement));
                    res.episodes.push_back(
                        {"begin_repair", t, slot, "replacement=" + std::to_string(replacement)});
                }

                const Eigen::VectorXd x = source->emit(t);
                int pred = 0;
                if (session) {
                    pred = observe(engine, *session, x);
                    if (session->status() == RepairStatus::ready) {
                        res.episodes.push_back({"ready", t, session->sensor_id(), ""});
                        merge(engine, *session);
                        res.episodes.push_back({"merge", t, session->sensor_id(), ""});
                        session.reset();
                    }
                } else {
                    pred = engine.classify_and_adapt(x);
                }
                res.predicted.push_back(pred);
                res.masks.push_back(engine.selection_log().back().selected);
            }

            for (const SampleRecord& rec : engine.selection_log()) {
                if (rec.fallback) ++res.mask_fallbacks;
                if (rec.knn_fallback) ++res.knn_fallbacks;
            }
        }

        long correct = 0;
        for (long t = 0; t < n; ++t)
            if (res.predicted[static_cast<std::size_t>(t)] ==
                res.truth[static_cast<std::size_t>(t)])
                ++correct;
        res.classification_rate = static_cast<double>(correct) / static_cast<double>(n);
    } catch (const std::exception& e) {
        res.failed = true;
        res.error = e.what();
    }
    return res;
}

ExperimentSummary summarize(const ExperimentConfig& config, const std::vector<RunResult>& runs) {
    ExperimentSummary summary;
    summary.n_runs = static_cast<long>(runs.size());

    std::vector<double> rates;
    for (const RunResult& run : runs) {
        if (run.failed) {
            ++summary.n_failed;
            continue;
        }
        if (run.flagged) ++summary.n_flagged;
        rates.push_back(run.classification_rate);
    }
    if (!rates.empty()) summary.rates = summarize_values(rates);

    // mean per-sensor overall selection rate over successful adaptive runs
    int n_sensors = 0;
    for (const RunResult& run : runs)
        if (!run.failed && !run.masks.empty()) n_sensors = std::max(n_sensors, 1);
    if (n_sensors > 0) {
        std::vector<double> acc;
        long contributing = 0;
        for (const RunResult& run : runs) {
            if (run.failed || run.masks.empty()) continue;
            const std::size_t width = run.masks.front().size();
            if (acc.empty()) acc.assign(width, 0.0);
            std::vector<double> per_feature(width, 0.0);
            for (const auto& mask : run.masks)
                for (std::size_t f = 0; f < width; ++f) per_feature[f] += mask[f];
            for (std::size_t f = 0; f < width; ++f)
                acc[f] += per_feature[f] / static_cast<double>(run.masks.size());
            ++contributing;
        }
        if (contributing > 0) {
            summary.sensor_selection_rate.assign(acc.size(), 0.0);
            for (std::size_t f = 0; f < acc.size(); ++f)
                summary.sensor_selection_rate[f] = acc[f] / static_cast<double>(contributing);
        }
    }
    (void)config;
    return summary;
}

ExperimentResult run_experiment(const ExperimentConfig& config, const StoredDataset* csv_data) {
    if (config.n_runs < 1) throw ConfigError("run_experiment: n_runs must be positive");

    StoredDataset loaded;
    if (config.source == ExperimentConfig::Source::csv && !csv_data) {
        loaded = load_dataset(config.dataset_path);
        csv_data = &loaded;
    }

    ExperimentResult result;
    result.config = config;
    result.runs.resize(static_cast<std::size_t>(config.n_runs));

    const int hw = static_cast<int>(std::thread::hardware_concurrency());
    const int workers = std::max(1, std::min(config.workers > 0 ? config.workers : hw,
                                             config.n_runs));

    std::atomic<int> next{0};
    auto work = [&]() {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= config.n_runs) return;
            result.runs[static_cast<std::size_t>(i)] = run_one(config, csv_data, i);
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }

    long failed = 0;
    std::string first_error;
    for (const RunResult& run : result.runs) {
        if (run.failed) {
            ++failed;
            if (first_error.empty()) first_error = run.error;
        }
    }
    const long needed = static_cast<long>(
        std::ceil(config.min_success_fraction * static_cast<double>(config.n_runs)));
    if (config.n_runs - failed < needed)
        throw Error("experiment aborted: only " + std::to_string(config.n_runs - failed) +
                    " of " + std::to_string(config.n_runs) + " runs succeeded (need " +
                    std::to_string(needed) + "); first failure: " + first_error);

    result.summary = summarize(config, result.runs);
    return result;
}

PairedComparison compare_modes(const ExperimentResult& a, const ExperimentResult& b) {
    std::vector<double> ra, rb;
    const std::size_t n = std::min(a.runs.size(), b.runs.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (a.runs[i].failed || b.runs[i].failed) continue;
        ra.push_back(a.runs[i].classification_rate);
        rb.push_back(b.runs[i].classification_rate);
    }
    return wilcoxon_signed_rank(ra, rb);
}

std::vector<long> repair_durations(const RunResult& run) {
    std::vector<long> durations;
    long begin = -1;
    for (const EpisodeEvent& ev : run.episodes) {
        if (ev.event == "begin_repair") begin = ev.sample_index;
        if (ev.event == "ready" && begin >= 0) {
            durations.push_back(ev.sample_index - begin + 1);
            begin = -1;
        }
    }
    return durations;
}

namespace {

std::string join_ints(const std::vector<int>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += "|";
        s += std::to_string(v[i]);
    }
    return s;
}

} // namespace

void write_reports(const ExperimentResult& result, const std::filesystem::path& dir,
                   const std::vector<int>& timeline_runs) {
    std::filesystem::create_directories(dir);
    const ExperimentConfig& config = result.config;

    {
        std::ostringstream out;
        out << "run_index,seed,failed,flagged,rate,knn_fallbacks,mask_fallbacks,"
               "fault_sensors,replacements,error\n";
        char buf[64];
        for (const RunResult& run : result.runs) {
            std::snprintf(buf, sizeof buf, "%.10g", run.classification_rate);
            out << run.run_index << "," << run.seed << "," << (run.failed ? 1 : 0) << ","
                << (run.flagged ? 1 : 0) << "," << buf << "," << run.knn_fallbacks << ","
                << run.mask_fallbacks << "," << join_ints(run.fault_sensors) << ","
                << join_ints(run.replacements) << "," << run.error << "\n";
        }
        write_text_file(dir / "rates.csv", out.str());
    }

    {
        const SummaryStats& s = result.summary.rates;
        std::ostringstream out;
        out << "mode,classifier,fault_type,n_runs,n_failed,mean,std,min,q1,median,q3,max\n";
        char buf[256];
        std::snprintf(buf, sizeof buf, "%s,%s,%s,%ld,%ld,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g\n",
                      to_string(config.mode).c_str(), to_string(config.classifier.kind).c_str(),
                      config.fault_type_label().c_str(), result.summary.n_runs,
                      result.summary.n_failed, s.mean, s.stddev, s.min, s.q1, s.median, s.q3,
                      s.max);
        out << buf;
        write_text_file(dir / "summary.csv", out.str());

        nlohmann::json js;
        js["mode"] = to_string(config.mode);
        js["classifier"] = to_string(config.classifier.kind);
        js["fault_type"] = config.fault_type_label();
        js["n_runs"] = result.summary.n_runs;
        js["n_failed"] = result.summary.n_failed;
        js["n_flagged"] = result.summary.n_flagged;
        js["rates"] = {{"mean", s.mean}, {"std", s.stddev}, {"min", s.min}, {"q1", s.q1},
                       {"median", s.median}, {"q3", s.q3}, {"max", s.max}};
        js["sensor_selection_rate"] = result.summary.sensor_selection_rate;
        write_text_file(dir / "summary.json", js.dump(2) + "\n");
    }

    auto want_timeline = [&](const RunResult& run) {
        if (run.failed || run.masks.empty()) return false;
        if (run.flagged) return true;
        return std::find(timeline_runs.begin(), timeline_runs.end(), run.run_index) !=
               timeline_runs.end();
    };
    for (const RunResult& run : result.runs) {
        if (!want_timeline(run)) continue;
        std::ostringstream out;
        out << "sample_index";
        for (std::size_t f = 0; f < run.masks.front().size(); ++f) out << ",feature_" << f;
        out << ",predicted,truth\n";
        for (std::size_t t = 0; t < run.masks.size(); ++t) {
            out << t;
            for (char v : run.masks[t]) out << "," << (v ? 1 : 0);
            out << "," << run.predicted[t] << "," << run.truth[t] << "\n";
        }
        char name[64];
        std::snprintf(name, sizeof name, "timeline_run%04d.csv", run.run_index);
        write_text_file(dir / name, out.str());
    }

    bool any_episodes = false;
    for (const RunResult& run : result.runs) any_episodes |= !run.episodes.empty();
    if (any_episodes) {
        std::filesystem::create_directories(dir / "episodes");
        for (const RunResult& run : result.runs) {
            if (run.episodes.empty()) continue;
            std::ostringstream out;
            out << "event,sample_index,sensor_id,detail\n";
            for (const EpisodeEvent& ev : run.episodes)
                out << ev.event << "," << ev.sample_index << "," << ev.sensor_id << ","
                    << ev.detail << "\n";
            char name[64];
            std::snprintf(name, sizeof name, "run%04d.csv", run.run_index);
            write_text_file(dir / "episodes" / name, out.str());
        }
    }
}

} // namespace sensorfix
