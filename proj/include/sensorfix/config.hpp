#pragma once

#include "sensorfix/experiment.hpp"
#include "sensorfix/ingest.hpp"
#include "sensorfix/synth.hpp"

#include <json.hpp>

#include <filesystem>
#include <map>
#include <string>

namespace sensorfix {

nlohmann::json synth_config_to_json(const SynthConfig& config);
SynthConfig synth_config_from_json(const nlohmann::json& js,
                                   SynthConfig base = SynthConfig::default_profile());

// Full experiment config from the structured config document. Unknown keys
// are rejected so typos fail loudly.
ExperimentConfig experiment_config_from_json(const nlohmann::json& js);
nlohmann::json experiment_config_to_json(const ExperimentConfig& config);

SubsetSpec subset_spec_from_json(const nlohmann::json& js);

// Applies one `--set a.b.c=value` override; the value is parsed as a JSON
// literal and falls back to a plain string.
void apply_override(nlohmann::json& root, const std::string& assignment);

struct Manifest {
    std::string command;
    nlohmann::json config;
    std::map<std::string, std::string> artifacts; // path relative to manifest dir -> checksum
};

void write_manifest(const Manifest& manifest, const std::filesystem::path& dir);
Manifest read_manifest(const std::filesystem::path& path);

// Verifies every recorded artifact checksum; throws ChecksumMismatch.
void verify_artifacts(const Manifest& manifest, const std::filesystem::path& base_dir);

} // namespace sensorfix
