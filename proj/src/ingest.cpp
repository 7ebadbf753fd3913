#include "sensorfix/ingest.hpp"

#include "sensorfix/errors.hpp"
#include "sensorfix/log.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace sensorfix {

namespace {

RawRecord parse_line(const std::string& line, const std::string& file, long line_no) {
    RawRecord record;
    record.source_file = file;
    record.source_line = line_no;
    record.features = Eigen::VectorXd::Zero(kMoxFeatureCount);

    std::istringstream in(line);
    std::string head;
    if (!(in >> head))
        throw MalformedLine(file + ":" + std::to_string(line_no) + ": empty record");

    const auto semi = head.find(';');
    if (semi == std::string::npos)
        throw MalformedLine(file + ":" + std::to_string(line_no) +
                            ": expected `<gas>;<concentration>`");
    try {
        record.gas_id = std::stoi(head.substr(0, semi));
        record.concentration = std::stod(head.substr(semi + 1));
    } catch (const std::exception&) {
        throw MalformedLine(file + ":" + std::to_string(line_no) + ": bad gas/concentration");
    }

    std::vector<char> seen(kMoxFeatureCount, 0);
    std::string token;
    while (in >> token) {
        const auto colon = token.find(':');
        if (colon == std::string::npos)
            throw MalformedLine(file + ":" + std::to_string(line_no) +
                                ": expected `idx:value`, got `" + token + "`");
        int idx = 0;
        double value = 0.0;
        try {
            idx = std::stoi(token.substr(0, colon));
            value = std::stod(token.substr(colon + 1));
        } catch (const std::exception&) {
            throw MalformedLine(file + ":" + std::to_string(line_no) + ": bad `" + token + "`");
        }
        if (idx < 1 || idx > kMoxFeatureCount)
            throw MalformedLine(file + ":" + std::to_string(line_no) + ": feature index " +
                                std::to_string(idx) + " outside 1..128");
        record.features(idx - 1) = value;
        seen[static_cast<std::size_t>(idx - 1)] = 1;
    }

    for (int i = 0; i < kMoxFeatureCount; ++i) {
        if (!seen[static_cast<std::size_t>(i)])
            throw MissingFeatureIndex(file + ":" + std::to_string(line_no) +
                                      ": feature index " + std::to_string(i + 1) + " missing");
    }
    return record;
}

} // namespace

std::vector<RawRecord> parse_files(const std::vector<std::filesystem::path>& paths,
                                   const ParseOptions& options) {
    std::vector<RawRecord> records;
    if (paths.empty()) {
        log::warn("ingest: no input files given, returning an empty record list");
        return records;
    }
    for (const auto& path : paths) {
        std::ifstream in(path);
        if (!in) throw ConfigError("ingest: cannot open " + path.string());
        std::string line;
        long line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
            try {
                records.push_back(parse_line(line, path.filename().string(), line_no));
            } catch (const Error& e) {
                if (!options.permissive) throw;
                log::warn(std::string("ingest: skipping line: ") + e.what());
            }
        }
    }
    return records;
}

std::string serialize_record(const RawRecord& record) {
    std::ostringstream out;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%d;%.17g", record.gas_id, record.concentration);
    out << buf;
    for (int i = 0; i < kMoxFeatureCount; ++i) {
        std::snprintf(buf, sizeof buf, " %d:%.17g", i + 1, record.features(i));
        out << buf;
    }
    return out.str();
}

SubsetSpec SubsetSpec::default_spec() {
    SubsetSpec spec;
    spec.gases = {{4, 50.0, 100, "acetaldehyde"},
                  {2, 250.0, 100, "ethylene"},
                  {6, 1.0, 100, "toluene"}};
    return spec;
}

void SubsetSpec::validate() const {
    if (gases.empty()) throw ConfigError("subset: no gas filters given");
    long total = 0;
    for (const auto& g : gases) {
        if (g.target_count <= 0) throw ConfigError("subset: target counts must be positive");
        total += g.target_count;
    }
    if (total != train_count + test_count)
        throw ConfigError("subset: targets sum to " + std::to_string(total) + ", expected " +
                          std::to_string(train_count + test_count));
}

IngestedDataset select_subset(const std::vector<RawRecord>& records, const SubsetSpec& spec) {
    spec.validate();

    std::vector<long> taken(spec.gases.size(), 0);
    std::vector<long> picked; // indices into records, chronological by construction
    for (std::size_t r = 0; r < records.size(); ++r) {
        const RawRecord& record = records[r];
        for (std::size_t g = 0; g < spec.gases.size(); ++g) {
            const GasFilter& filter = spec.gases[g];
            if (record.gas_id != filter.gas_id) continue;
            const double tol = spec.concentration_rel_tol *
                               std::max(1.0, std::fabs(filter.concentration));
            if (std::fabs(record.concentration - filter.concentration) > tol) continue;
            if (taken[g] >= filter.target_count) break;
            ++taken[g];
            picked.push_back(static_cast<long>(r));
            break;
        }
    }

    std::string deficit;
    for (std::size_t g = 0; g < spec.gases.size(); ++g) {
        if (taken[g] < spec.gases[g].target_count)
            deficit += " " + spec.gases[g].name + ": have " + std::to_string(taken[g]) +
                       " of " + std::to_string(spec.gases[g].target_count);
    }
    if (!deficit.empty())
        throw InsufficientRecords("ingest: not enough matching records —" + deficit);

    IngestedDataset out;
    out.sensors = SensorMap::uniform(kMoxSensorCount, kMoxFeaturesPerSensor);
    for (const auto& g : spec.gases) out.class_names.push_back(g.name);

    auto label_of = [&](const RawRecord& record) {
        for (std::size_t g = 0; g < spec.gases.size(); ++g)
            if (record.gas_id == spec.gases[g].gas_id) return static_cast<int>(g);
        return -1;
    };

    const long n_total = static_cast<long>(picked.size());
    auto fill = [&](LabeledMatrix& block, long from, long count) {
        block.x.resize(count, kMoxFeatureCount);
        block.labels.resize(static_cast<std::size_t>(count));
        block.n_classes = static_cast<int>(spec.gases.size());
        for (long i = 0; i < count; ++i) {
            const RawRecord& record = records[static_cast<std::size_t>(picked[static_cast<std::size_t>(from + i)])];
            block.x.row(i) = record.features.transpose();
            block.labels[static_cast<std::size_t>(i)] = label_of(record);
        }
    };
    if (n_total != spec.train_count + spec.test_count)
        throw InsufficientRecords("ingest: selected " + std::to_string(n_total) + " records");
    fill(out.train, 0, spec.train_count);
    fill(out.test, spec.train_count, spec.test_count);
    return out;
}

std::vector<std::vector<int>> default_model_groups() {
    std::vector<std::vector<int>> groups(4);
    for (int m = 0; m < 4; ++m)
        for (int u = 0; u < 4; ++u) groups[static_cast<std::size_t>(m)].push_back(m * 4 + u);
    return groups;
}

} // namespace sensorfix
