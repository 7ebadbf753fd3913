#pragma once

#include "sensorfix/dataset.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace sensorfix {

inline constexpr int kMoxFeatureCount = 128; // 16 sensors x 8 descriptors
inline constexpr int kMoxSensorCount = 16;
inline constexpr int kMoxFeaturesPerSensor = 8;

// One measurement of the public MOx drift dataset: gas id, concentration in
// ppm, and the 128 precomputed descriptors.
struct RawRecord {
    int gas_id = 0;
    double concentration = 0.0;
    Eigen::VectorXd features; // dense, 128 entries
    std::string source_file;
    long source_line = 0;
};

struct ParseOptions {
    bool permissive = false; // skip malformed lines with a warning
};

// Parses batch files in the sparse `<gas>;<conc> 1:v1 2:v2 ... 128:v128`
// format. Files are processed in the given order; callers pass batches in
// ascending batch number to keep records chronological.
std::vector<RawRecord> parse_files(const std::vector<std::filesystem::path>& paths,
                                   const ParseOptions& options = {});

std::string serialize_record(const RawRecord& record);

struct GasFilter {
    int gas_id = 0;
    double concentration = 0.0;
    long target_count = 0;
    std::string name;
};

struct SubsetSpec {
    std::vector<GasFilter> gases;
    long train_count = 60;
    long test_count = 240;
    double concentration_rel_tol = 1e-6;

    // 50 ppm acetaldehyde, 250 ppm ethylene, 1 ppm toluene; gas ids from the
    // public dataset's documentation.
    static SubsetSpec default_spec();
    void validate() const;
};

struct IngestedDataset {
    LabeledMatrix train; // chronological head, full 128 columns
    LabeledMatrix test;
    std::vector<std::string> class_names;
    SensorMap sensors; // 16 sensors x 8 features
};

// Chronological subset selection: per filter, the first target_count matching
// records; merged back into input order, then split head/tail into train and
// test. Throws InsufficientRecords with a per-gas deficit report.
IngestedDataset select_subset(const std::vector<RawRecord>& records, const SubsetSpec& spec);

// Sensor units grouped by commercial model, for replacement draws.
// Default assumes four consecutive units per model.
std::vector<std::vector<int>> default_model_groups();

} // namespace sensorfix
