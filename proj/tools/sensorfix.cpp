#include "sensorfix/config.hpp"
#include "sensorfix/errors.hpp"
#include "sensorfix/experiment.hpp"
#include "sensorfix/ingest.hpp"
#include "sensorfix/io.hpp"
#include "sensorfix/log.hpp"
#include "sensorfix/synth.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace sensorfix;

namespace {

json load_config_json(const std::string& path, const std::vector<std::string>& overrides) {
    json js = json::object();
    if (!path.empty()) js = json::parse(read_text_file(path));
    for (const std::string& assignment : overrides) apply_override(js, assignment);
    return js;
}

std::string relative_or_absolute(const fs::path& target, const fs::path& base) {
    std::error_code ec;
    const fs::path rel = fs::relative(target, base, ec);
    if (ec || rel.empty()) return fs::absolute(target).string();
    return rel.string();
}

void record_dataset_artifacts(Manifest& manifest, const fs::path& dataset_dir,
                              const fs::path& out_dir) {
    for (const char* name : {"train.csv", "test.csv", "meta.json"}) {
        const fs::path p = dataset_dir / name;
        manifest.artifacts[relative_or_absolute(p, out_dir)] = file_checksum(p);
    }
}

int cmd_gen_synth(const std::string& config_path, const std::string& out,
                  const std::vector<std::string>& overrides,
                  std::optional<std::uint64_t> seed) {
    json js = load_config_json(config_path, overrides);
    ExperimentConfig cfg = experiment_config_from_json(js);
    if (seed) cfg.synth.seed = *seed;

    const SyntheticDataset ds = generate(cfg.synth);
    StoredDataset stored;
    stored.train = ds.train;
    stored.test = ds.test;
    stored.class_names = ds.class_names;
    stored.sensors = ds.sensors;
    stored.meta["kind"] = "synthetic";
    stored.meta["synth"] = synth_config_to_json(cfg.synth);
    save_dataset(stored, out);

    Manifest manifest;
    manifest.command = "gen-synth";
    manifest.config = json{{"dataset", {{"source", "synthetic"},
                                        {"synth", synth_config_to_json(cfg.synth)}}}};
    record_dataset_artifacts(manifest, out, out);
    write_manifest(manifest, out);

    std::printf("wrote %ld train and %ld test samples to %s\n",
                static_cast<long>(ds.train.rows()), static_cast<long>(ds.test.rows()),
                out.c_str());
    return 0;
}

int cmd_ingest(const std::vector<std::string>& files, const std::string& config_path,
               const std::string& out, const std::vector<std::string>& overrides,
               bool permissive) {
    json js = load_config_json(config_path, overrides);
    SubsetSpec spec = js.contains("ingest") ? subset_spec_from_json(js.at("ingest"))
                                            : SubsetSpec::default_spec();

    std::vector<fs::path> paths(files.begin(), files.end());
    ParseOptions options;
    options.permissive = permissive;
    const std::vector<RawRecord> records = parse_files(paths, options);
    const IngestedDataset ds = select_subset(records, spec);

    StoredDataset stored;
    stored.train = ds.train;
    stored.test = ds.test;
    stored.class_names = ds.class_names;
    stored.sensors = ds.sensors;
    stored.meta["kind"] = "experimental";
    stored.meta["model_groups"] = default_model_groups();
    stored.meta["n_records_parsed"] = records.size();
    save_dataset(stored, out);

    Manifest manifest;
    manifest.command = "ingest";
    manifest.config = js;
    record_dataset_artifacts(manifest, out, out);
    write_manifest(manifest, out);

    const auto counts = ds.train.class_counts();
    std::ostringstream msg;
    msg << "ingested " << records.size() << " records; train capacities:";
    for (std::size_t c = 0; c < counts.size(); ++c)
        msg << " " << ds.class_names[c] << "=" << counts[c];
    std::printf("%s\n", msg.str().c_str());
    return 0;
}

std::vector<int> timeline_runs_from(const json& js) {
    if (js.contains("report") && js.at("report").contains("timeline_runs"))
        return js.at("report").at("timeline_runs").get<std::vector<int>>();
    return {0};
}

int cmd_run(const std::string& config_path, const std::string& out,
            const std::vector<std::string>& overrides, std::optional<std::uint64_t> seed,
            std::optional<int> workers) {
    json js = load_config_json(config_path, overrides);
    ExperimentConfig cfg = experiment_config_from_json(js);
    if (seed) cfg.base_seed = *seed;
    if (workers) cfg.workers = *workers;

    const ExperimentResult result = run_experiment(cfg);
    fs::create_directories(out);
    write_reports(result, out, timeline_runs_from(js));

    Manifest manifest;
    manifest.command = "run";
    manifest.config = experiment_config_to_json(cfg);
    if (cfg.source == ExperimentConfig::Source::csv)
        record_dataset_artifacts(manifest, cfg.dataset_path, out);
    for (const char* name : {"rates.csv", "summary.csv", "summary.json"})
        manifest.artifacts[name] = file_checksum(fs::path(out) / name);
    write_manifest(manifest, out);

    const SummaryStats& s = result.summary.rates;
    std::printf("%s/%s/%s: mean rate %.4f (std %.4f, min %.4f, max %.4f), %ld/%d runs ok\n",
                to_string(cfg.mode).c_str(), to_string(cfg.classifier.kind).c_str(),
                cfg.fault_type_label().c_str(), s.mean, s.stddev, s.min, s.max,
                result.summary.n_runs - result.summary.n_failed, cfg.n_runs);
    return 0;
}

struct LoadedResults {
    std::string dir;
    json summary;
    std::vector<double> rates;
    std::vector<std::uint64_t> seeds;
};

LoadedResults load_results(const std::string& dir) {
    LoadedResults loaded;
    loaded.dir = dir;
    loaded.summary = json::parse(read_text_file(fs::path(dir) / "summary.json"));

    std::ifstream in(fs::path(dir) / "rates.csv");
    if (!in) throw ConfigError("cannot open rates.csv in " + dir);
    std::string line;
    std::getline(in, line); // header
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (cells.size() < 5) continue;
        if (cells[2] == "1") continue; // failed run
        loaded.seeds.push_back(std::stoull(cells[1]));
        loaded.rates.push_back(std::stod(cells[4]));
    }
    return loaded;
}

int cmd_report(const std::vector<std::string>& dirs, const std::string& out) {
    std::vector<LoadedResults> all;
    for (const std::string& dir : dirs) all.push_back(load_results(dir));

    std::ostringstream table;
    table << "directory                                mode      classifier fault    n    mean     std      median\n";
    std::ostringstream csv;
    csv << "directory,mode,classifier,fault_type,n_runs,mean,std,min,q1,median,q3,max\n";
    for (const LoadedResults& r : all) {
        const json& s = r.summary;
        const json& rates = s.at("rates");
        char buf[512];
        std::snprintf(buf, sizeof buf, "%-40s %-9s %-10s %-8s %-4ld %-8.4f %-8.4f %-8.4f\n",
                      r.dir.c_str(), s.value("mode", "?").c_str(),
                      s.value("classifier", "?").c_str(), s.value("fault_type", "?").c_str(),
                      static_cast<long>(r.rates.size()), rates.value("mean", 0.0),
                      rates.value("std", 0.0), rates.value("median", 0.0));
        table << buf;
        std::snprintf(buf, sizeof buf, "%s,%s,%s,%s,%ld,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g\n",
                      r.dir.c_str(), s.value("mode", "?").c_str(),
                      s.value("classifier", "?").c_str(), s.value("fault_type", "?").c_str(),
                      static_cast<long>(r.rates.size()), rates.value("mean", 0.0),
                      rates.value("std", 0.0), rates.value("min", 0.0), rates.value("q1", 0.0),
                      rates.value("median", 0.0), rates.value("q3", 0.0),
                      rates.value("max", 0.0));
        csv << buf;
    }
    std::printf("%s", table.str().c_str());

    if (all.size() == 2 && all[0].seeds == all[1].seeds && !all[0].seeds.empty()) {
        const PairedComparison cmp = wilcoxon_signed_rank(all[0].rates, all[1].rates);
        std::printf("\npaired comparison (%s minus %s): mean diff %+.4f, p = %.4g%s\n",
                    all[0].dir.c_str(), all[1].dir.c_str(), cmp.mean_diff, cmp.p_two_sided,
                    cmp.significant() ? " (significant at 0.05)" : "");
        char buf[256];
        std::snprintf(buf, sizeof buf, "\n# paired,%s,%s,%.10g,%.10g,%d\n", all[0].dir.c_str(),
                      all[1].dir.c_str(), cmp.mean_diff, cmp.p_two_sided,
                      cmp.significant() ? 1 : 0);
        csv << buf;
    }

    if (!out.empty()) {
        fs::create_directories(out);
        write_text_file(fs::path(out) / "report.csv", csv.str());
    }
    return 0;
}

int cmd_replay(const std::string& manifest_path, int run_index) {
    const fs::path mpath = fs::absolute(manifest_path);
    const fs::path base = mpath.parent_path();
    const Manifest manifest = read_manifest(mpath);
    if (manifest.command != "run")
        throw ConfigError("replay needs a manifest produced by `run`, got `" +
                          manifest.command + "`");
    verify_artifacts(manifest, base);

    ExperimentConfig cfg = experiment_config_from_json(manifest.config);
    if (cfg.source == ExperimentConfig::Source::csv) {
        // dataset.path in the manifest may be relative to the manifest dir
        if (!fs::exists(cfg.dataset_path) && fs::exists(base / cfg.dataset_path))
            cfg.dataset_path = (base / cfg.dataset_path).string();
    }
    if (run_index < 0 || run_index >= cfg.n_runs)
        throw ConfigError("run index " + std::to_string(run_index) + " outside 0.." +
                          std::to_string(cfg.n_runs - 1));

    StoredDataset loaded;
    const StoredDataset* data = nullptr;
    if (cfg.source == ExperimentConfig::Source::csv) {
        loaded = load_dataset(cfg.dataset_path);
        data = &loaded;
    }
    const RunResult replayed = run_one(cfg, data, run_index);
    if (replayed.failed) throw Error("replayed run failed: " + replayed.error);

    // compare to the archived record
    std::ifstream in(base / "rates.csv");
    if (!in) throw ConfigError("cannot open archived rates.csv");
    std::string line;
    std::getline(in, line);
    bool found = false;
    double archived_rate = 0.0;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (cells.size() >= 5 && std::stoi(cells[0]) == run_index) {
            archived_rate = std::stod(cells[4]);
            found = true;
            break;
        }
    }
    if (!found) throw ConfigError("run " + std::to_string(run_index) + " not in rates.csv");

    if (replayed.classification_rate != archived_rate) {
        std::fprintf(stderr, "error: replay mismatch: rate %.10g vs archived %.10g\n",
                     replayed.classification_rate, archived_rate);
        return 1;
    }

    // bit-compare the timeline when one was archived
    char name[64];
    std::snprintf(name, sizeof name, "timeline_run%04d.csv", run_index);
    if (fs::exists(base / name)) {
        ExperimentResult one;
        one.config = cfg;
        one.runs.push_back(replayed);
        one.summary = summarize(cfg, one.runs);
        const fs::path tmp = base / "replay_tmp";
        write_reports(one, tmp, {run_index});
        const bool same =
            read_text_file(tmp / name) == read_text_file(base / name);
        fs::remove_all(tmp);
        if (!same) {
            std::fprintf(stderr, "error: replay mismatch: timeline differs\n");
            return 1;
        }
    }

    std::printf("replay of run %d identical: rate %.10g\n", run_index,
                replayed.classification_rate);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"sensorfix: adaptive classification and self-repair for drifting sensor arrays"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    std::vector<std::string> overrides;
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;

    auto add_common = [&](CLI::App* sub, bool out_required) {
        sub->add_option("--config", config_path, "config file (JSON)");
        auto* o = sub->add_option("--out", out_dir, "output directory");
        if (out_required) o->required();
        sub->add_option("--set", overrides, "override config value, dotted key=value")
            ->take_all();
        sub->add_option("--seed", seed, "override base seed");
        sub->add_option("--workers", workers, "worker thread count");
    };

    CLI::App* gen = app.add_subcommand("gen-synth", "generate the synthetic benchmark dataset");
    add_common(gen, true);

    CLI::App* ingest = app.add_subcommand("ingest", "parse public MOx batch files into a dataset");
    std::vector<std::string> ingest_files;
    bool permissive = false;
    ingest->add_option("files", ingest_files, "batch files in ascending batch order")
        ->required();
    ingest->add_flag("--permissive", permissive, "skip malformed lines with a warning");
    add_common(ingest, true);

    CLI::App* run = app.add_subcommand("run", "run a Monte Carlo experiment");
    add_common(run, true);

    CLI::App* report = app.add_subcommand("report", "summarize result directories");
    std::vector<std::string> report_dirs;
    report->add_option("dirs", report_dirs, "result directories")->required();
    report->add_option("--out", out_dir, "write report.csv here");

    CLI::App* replay = app.add_subcommand("replay", "reproduce one archived run bit-exactly");
    std::string manifest_path;
    int replay_run = 0;
    replay->add_option("manifest", manifest_path, "manifest.json of a run")->required();
    replay->add_option("--run", replay_run, "run index to replay");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return cmd_gen_synth(config_path, out_dir, overrides, seed);
        if (ingest->parsed())
            return cmd_ingest(ingest_files, config_path, out_dir, overrides, permissive);
        if (run->parsed()) return cmd_run(config_path, out_dir, overrides, seed, workers);
        if (report->parsed()) return cmd_report(report_dirs, out_dir);
        if (replay->parsed()) return cmd_replay(manifest_path, replay_run);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
