#include "sensorfix/config.hpp"

#include "sensorfix/errors.hpp"
#include "sensorfix/io.hpp"

#include <set>
#include <sstream>

namespace sensorfix {

namespace {

using nlohmann::json;

void reject_unknown(const json& js, const std::set<std::string>& known, const std::string& where) {
    for (auto it = js.begin(); it != js.end(); ++it) {
        if (!known.count(it.key()))
            throw ConfigError("config: unknown key `" + it.key() + "` in " + where);
    }
}

} // namespace

json synth_config_to_json(const SynthConfig& config) {
    json js;
    js["n_classes"] = config.n_classes;
    js["n_sensors"] = config.n_sensors;
    js["train_per_class"] = config.train_per_class;
    js["n_test"] = config.n_test;
    std::vector<std::vector<double>> centers;
    for (int c = 0; c < config.n_classes; ++c) {
        centers.emplace_back();
        for (int s = 0; s < config.n_sensors; ++s)
            centers.back().push_back(config.class_centers(c, s));
    }
    js["class_centers"] = centers;
    std::vector<double> dir;
    for (int s = 0; s < config.n_sensors; ++s) dir.push_back(config.drift_direction(s));
    js["drift_direction"] = dir;
    js["drift_rate"] = config.drift_rate;
    js["noise_std"] = config.noise_std;
    js["overlap_pair"] = {config.overlap_pair.first, config.overlap_pair.second};
    js["replica_max_dev"] = config.replica_max_dev;
    js["seed"] = config.seed;
    return js;
}

SynthConfig synth_config_from_json(const nlohmann::json& js, SynthConfig base) {
    reject_unknown(js,
                   {"n_classes", "n_sensors", "train_per_class", "n_test", "class_centers",
                    "drift_direction", "drift_rate", "noise_std", "overlap_pair",
                    "replica_max_dev", "seed"},
                   "dataset.synth");
    SynthConfig cfg = base;
    cfg.n_classes = js.value("n_classes", cfg.n_classes);
    cfg.n_sensors = js.value("n_sensors", cfg.n_sensors);
    cfg.train_per_class = js.value("train_per_class", cfg.train_per_class);
    cfg.n_test = js.value("n_test", cfg.n_test);
    if (js.contains("class_centers")) {
        const auto rows = js.at("class_centers").get<std::vector<std::vector<double>>>();
        cfg.class_centers.resize(static_cast<long>(rows.size()),
                                 rows.empty() ? 0 : static_cast<long>(rows.front().size()));
        for (std::size_t r = 0; r < rows.size(); ++r)
            for (std::size_t c = 0; c < rows[r].size(); ++c)
                cfg.class_centers(static_cast<long>(r), static_cast<long>(c)) = rows[r][c];
    }
    if (js.contains("drift_direction")) {
        const auto dir = js.at("drift_direction").get<std::vector<double>>();
        cfg.drift_direction.resize(static_cast<long>(dir.size()));
        for (std::size_t i = 0; i < dir.size(); ++i)
            cfg.drift_direction(static_cast<long>(i)) = dir[i];
        cfg.drift_direction.normalize();
    }
    cfg.drift_rate = js.value("drift_rate", cfg.drift_rate);
    cfg.noise_std = js.value("noise_std", cfg.noise_std);
    if (js.contains("overlap_pair")) {
        const auto pair = js.at("overlap_pair").get<std::vector<int>>();
        if (pair.size() != 2) throw ConfigError("config: overlap_pair needs two entries");
        cfg.overlap_pair = {pair[0], pair[1]};
    }
    cfg.replica_max_dev = js.value("replica_max_dev", cfg.replica_max_dev);
    cfg.seed = js.value("seed", cfg.seed);
    return cfg;
}

ExperimentConfig experiment_config_from_json(const nlohmann::json& js) {
    reject_unknown(js, {"dataset", "classifier", "thresholds", "faults", "runs", "mode",
                        "harness", "report", "ingest"},
                   "config root");
    ExperimentConfig cfg;

    if (js.contains("dataset")) {
        const json& ds = js.at("dataset");
        reject_unknown(ds, {"source", "path", "profile", "synth"}, "dataset");
        const std::string source = ds.value("source", "synthetic");
        if (source == "synthetic") cfg.source = ExperimentConfig::Source::synthetic;
        else if (source == "csv") cfg.source = ExperimentConfig::Source::csv;
        else throw ConfigError("config: unknown dataset.source `" + source + "`");
        cfg.dataset_path = ds.value("path", std::string());

        const std::string profile = ds.value("profile", "default");
        if (profile == "default") cfg.synth = SynthConfig::default_profile();
        else if (profile == "stationary") {
            cfg.synth = SynthConfig::default_profile();
            cfg.synth.drift_rate = 0.0;
        } else {
            throw ConfigError("config: unknown dataset.profile `" + profile + "`");
        }
        if (ds.contains("synth")) cfg.synth = synth_config_from_json(ds.at("synth"), cfg.synth);
    }

    if (js.contains("classifier")) {
        const json& cl = js.at("classifier");
        reject_unknown(cl, {"kind", "k", "latent_vars", "ridge"}, "classifier");
        cfg.classifier.kind = classifier_kind_from_string(cl.value("kind", "knn"));
        cfg.classifier.k = cl.value("k", cfg.classifier.k);
        cfg.classifier.latent_vars = cl.value("latent_vars", cfg.classifier.latent_vars);
        cfg.classifier.ridge = cl.value("ridge", cfg.classifier.ridge);
    }

    if (js.contains("thresholds")) {
        const json& th = js.at("thresholds");
        reject_unknown(th, {"t1", "t2", "t3"}, "thresholds");
        cfg.thresholds.thresh1 = th.value("t1", cfg.thresholds.thresh1);
        cfg.thresholds.thresh2 = th.value("t2", cfg.thresholds.thresh2);
        cfg.thresholds.thresh3 = th.value("t3", cfg.thresholds.thresh3);
        cfg.thresholds.validate();
    }

    if (js.contains("faults")) {
        for (const json& fj : js.at("faults")) {
            reject_unknown(fj, {"start", "duration", "sensor", "type", "action"}, "faults[]");
            FaultEvent ev;
            ev.start = fj.at("start").get<long>();
            if (fj.contains("duration")) {
                if (fj.at("duration").is_string()) {
                    if (fj.at("duration").get<std::string>() != "permanent")
                        throw ConfigError("config: duration must be a count or `permanent`");
                    ev.duration = 0;
                } else {
                    ev.duration = fj.at("duration").get<long>();
                    if (ev.duration < 0) throw ConfigError("config: negative fault duration");
                }
            }
            if (fj.contains("sensor")) {
                if (fj.at("sensor").is_string()) {
                    if (fj.at("sensor").get<std::string>() != "random")
                        throw ConfigError("config: sensor must be an index or `random`");
                    ev.sensor = -1;
                } else {
                    ev.sensor = fj.at("sensor").get<int>();
                }
            }
            ev.type = fault_type_from_string(fj.value("type", "zero"));
            const std::string action = fj.value("action", "none");
            if (action == "replace") ev.replace = true;
            else if (action == "none") ev.replace = false;
            else throw ConfigError("config: unknown fault action `" + action + "`");
            cfg.faults.push_back(ev);
        }
    }

    if (js.contains("runs")) {
        const json& runs = js.at("runs");
        reject_unknown(runs, {"n", "seed", "workers"}, "runs");
        cfg.n_runs = runs.value("n", cfg.n_runs);
        cfg.base_seed = runs.value("seed", cfg.base_seed);
        cfg.workers = runs.value("workers", cfg.workers);
    }

    if (js.contains("mode")) cfg.mode = run_mode_from_string(js.at("mode").get<std::string>());

    if (js.contains("harness")) {
        const json& h = js.at("harness");
        reject_unknown(h, {"detection_latency", "timeline_window", "min_success_fraction"},
                       "harness");
        cfg.detection_latency = h.value("detection_latency", cfg.detection_latency);
        cfg.timeline_window = h.value("timeline_window", cfg.timeline_window);
        cfg.min_success_fraction = h.value("min_success_fraction", cfg.min_success_fraction);
    }
    return cfg;
}

nlohmann::json experiment_config_to_json(const ExperimentConfig& config) {
    json js;
    js["dataset"]["source"] =
        config.source == ExperimentConfig::Source::synthetic ? "synthetic" : "csv";
    if (!config.dataset_path.empty()) js["dataset"]["path"] = config.dataset_path;
    js["dataset"]["synth"] = synth_config_to_json(config.synth);
    js["classifier"] = {{"kind", to_string(config.classifier.kind)},
                        {"k", config.classifier.k},
                        {"latent_vars", config.classifier.latent_vars},
                        {"ridge", config.classifier.ridge}};
    js["thresholds"] = {{"t1", config.thresholds.thresh1},
                        {"t2", config.thresholds.thresh2},
                        {"t3", config.thresholds.thresh3}};
    js["faults"] = json::array();
    for (const FaultEvent& ev : config.faults) {
        json fj;
        fj["start"] = ev.start;
        if (ev.permanent()) fj["duration"] = "permanent";
        else fj["duration"] = ev.duration;
        if (ev.sensor < 0) fj["sensor"] = "random";
        else fj["sensor"] = ev.sensor;
        fj["type"] = to_string(ev.type);
        fj["action"] = ev.replace ? "replace" : "none";
        js["faults"].push_back(fj);
    }
    js["runs"] = {{"n", config.n_runs}, {"seed", config.base_seed}, {"workers", config.workers}};
    js["mode"] = to_string(config.mode);
    js["harness"] = {{"detection_latency", config.detection_latency},
                     {"timeline_window", config.timeline_window},
                     {"min_success_fraction", config.min_success_fraction}};
    return js;
}

SubsetSpec subset_spec_from_json(const nlohmann::json& js) {
    reject_unknown(js, {"gases", "train_count", "test_count", "concentration_rel_tol"},
                   "ingest");
    SubsetSpec spec = SubsetSpec::default_spec();
    if (js.contains("gases")) {
        spec.gases.clear();
        for (const json& gj : js.at("gases")) {
            reject_unknown(gj, {"gas_id", "concentration", "target_count", "name"},
                           "ingest.gases[]");
            GasFilter filter;
            filter.gas_id = gj.at("gas_id").get<int>();
            filter.concentration = gj.at("concentration").get<double>();
            filter.target_count = gj.at("target_count").get<long>();
            filter.name = gj.value("name", "gas" + std::to_string(filter.gas_id));
            spec.gases.push_back(filter);
        }
    }
    spec.train_count = js.value("train_count", spec.train_count);
    spec.test_count = js.value("test_count", spec.test_count);
    spec.concentration_rel_tol = js.value("concentration_rel_tol", spec.concentration_rel_tol);
    return spec;
}

void apply_override(nlohmann::json& root, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos)
        throw ConfigError("override `" + assignment + "` is not key=value");
    const std::string key = assignment.substr(0, eq);
    const std::string value = assignment.substr(eq + 1);

    nlohmann::json* node = &root;
    std::istringstream keys(key);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(keys, part, '.')) {
        if (part.empty()) throw ConfigError("override `" + assignment + "` has an empty key part");
        parts.push_back(part);
    }
    if (parts.empty()) throw ConfigError("override `" + assignment + "` has no key");
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) node = &(*node)[parts[i]];

    nlohmann::json parsed = nlohmann::json::parse(value, nullptr, false);
    if (parsed.is_discarded()) parsed = value; // plain string
    (*node)[parts.back()] = parsed;
}

void write_manifest(const Manifest& manifest, const std::filesystem::path& dir) {
    nlohmann::json js;
    js["command"] = manifest.command;
    js["config"] = manifest.config;
    js["artifacts"] = manifest.artifacts;
    write_text_file(dir / "manifest.json", js.dump(2) + "\n");
}

Manifest read_manifest(const std::filesystem::path& path) {
    const nlohmann::json js = nlohmann::json::parse(read_text_file(path));
    Manifest manifest;
    manifest.command = js.value("command", std::string());
    manifest.config = js.value("config", nlohmann::json::object());
    if (js.contains("artifacts"))
        manifest.artifacts = js.at("artifacts").get<std::map<std::string, std::string>>();
    return manifest;
}

void verify_artifacts(const Manifest& manifest, const std::filesystem::path& base_dir) {
    for (const auto& [rel, expected] : manifest.artifacts) {
        const std::filesystem::path path = base_dir / rel;
        if (!std::filesystem::exists(path))
            throw ChecksumMismatch("artifact missing: " + path.string());
        const std::string actual = file_checksum(path);
        if (actual != expected)
            throw ChecksumMismatch("artifact " + path.string() + " checksum " + actual +
                                   " does not match recorded " + expected);
    }
}

} // namespace sensorfix
