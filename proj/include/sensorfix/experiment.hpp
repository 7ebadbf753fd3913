#pragma once

#include "sensorfix/classifier.hpp"
#include "sensorfix/faults.hpp"
#include "sensorfix/io.hpp"
#include "sensorfix/numerics.hpp"
#include "sensorfix/stats.hpp"
#include "sensorfix/synth.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace sensorfix {

enum class RunMode { standard, uos, sr };

RunMode run_mode_from_string(const std::string& s);
std::string to_string(RunMode mode);

struct ExperimentConfig {
    enum class Source { synthetic, csv };
    Source source = Source::synthetic;
    std::string dataset_path; // csv source: directory with train/test/meta
    SynthConfig synth = SynthConfig::default_profile();

    ClassifierSpec classifier;
    SelectionThresholds thresholds;
    std::vector<FaultEvent> faults;

    int n_runs = 100;
    std::uint64_t base_seed = 42;
    int workers = 0; // 0 = hardware concurrency
    RunMode mode = RunMode::uos;

    // The harness is the failure-detection oracle; latency delays the
    // remove/replace reaction past the fault start.
    long detection_latency = 0;
    int timeline_window = 30;
    double min_success_fraction = 0.95;

    std::string fault_type_label() const;
};

struct EpisodeEvent {
    std::string event; // fault | remove | begin_repair | ready | merge
    long sample_index = 0;
    int sensor_id = -1;
    std::string detail;
};

struct RunResult {
    int run_index = 0;
    std::uint64_t seed = 0; // per-run data seed
    bool failed = false;
    bool flagged = false; // e.g. overlapping repairs
    std::string error;

    std::vector<int> predicted;
    std::vector<int> truth;
    std::vector<std::vector<char>> masks; // empty in standard mode
    double classification_rate = 0.0;

    std::vector<EpisodeEvent> episodes;
    std::vector<int> fault_sensors; // resolved, in event order
    std::vector<int> replacements;  // replacement unit/replica ids
    long knn_fallbacks = 0;
    long mask_fallbacks = 0;
};

struct ExperimentSummary {
    SummaryStats rates; // successful runs only
    long n_runs = 0;
    long n_failed = 0;
    long n_flagged = 0;
    std::vector<double> sensor_selection_rate; // mean over successful runs
};

struct ExperimentResult {
    ExperimentConfig config;
    std::vector<RunResult> runs;
    ExperimentSummary summary;
};

RunResult run_one(const ExperimentConfig& config, const StoredDataset* csv_data, int run_index);

// Runs all seeds, possibly concurrently; aborts loudly when fewer than
// min_success_fraction of the runs succeed.
ExperimentResult run_experiment(const ExperimentConfig& config,
                                const StoredDataset* csv_data = nullptr);

ExperimentSummary summarize(const ExperimentConfig& config, const std::vector<RunResult>& runs);

// Paired rank-based comparison of per-run rates across shared seeds.
PairedComparison compare_modes(const ExperimentResult& a, const ExperimentResult& b);

// Samples from begin_repair to ready, one entry per completed episode.
std::vector<long> repair_durations(const RunResult& run);

// CSV reports: per-run rates, box-plot summary, selection timelines for the
// requested runs (plus flagged ones), and per-run SR episode logs.
void write_reports(const ExperimentResult& result, const std::filesystem::path& dir,
                   const std::vector<int>& timeline_runs = {0});

} // namespace sensorfix
