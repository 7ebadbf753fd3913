#pragma once

#include "sensorfix/dataset.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace sensorfix {

// On-disk dataset: train.csv + test.csv in `index,label,f0..f{p-1}` form and
// a meta.json sidecar with class names, sensor map, and generator/ingest
// provenance. The same layout serves synthetic exports and ingested subsets.
struct StoredDataset {
    LabeledMatrix train;
    LabeledMatrix test;
    std::vector<std::string> class_names;
    SensorMap sensors;
    nlohmann::json meta;

    std::string kind() const { return meta.value("kind", "synthetic"); }
};

void save_dataset(const StoredDataset& dataset, const std::filesystem::path& dir);
StoredDataset load_dataset(const std::filesystem::path& dir);

// FNV-1a 64-bit over the file bytes, as 16 hex digits.
std::string file_checksum(const std::filesystem::path& path);

void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

} // namespace sensorfix
