#include "sensorfix/io.hpp"

#include "sensorfix/errors.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace sensorfix {

namespace {

void write_block_csv(const std::filesystem::path& path, const LabeledMatrix& block,
                     const std::vector<std::string>& class_names,
                     const std::vector<long>& indices) {
    std::ostringstream out;
    out << "index,label";
    for (long f = 0; f < block.cols(); ++f) out << ",f" << f;
    out << "\n";
    char buf[64];
    for (long r = 0; r < block.rows(); ++r) {
        out << indices[static_cast<std::size_t>(r)] << ","
            << class_names[static_cast<std::size_t>(block.labels[static_cast<std::size_t>(r)])];
        for (long f = 0; f < block.cols(); ++f) {
            std::snprintf(buf, sizeof buf, ",%.17g", block.x(r, f));
            out << buf;
        }
        out << "\n";
    }
    write_text_file(path, out.str());
}

LabeledMatrix read_block_csv(const std::filesystem::path& path,
                             const std::vector<std::string>& class_names) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path.string());

    std::string header;
    if (!std::getline(in, header)) throw ConfigError("empty dataset file " + path.string());
    long n_cols = -1; // feature columns
    {
        long commas = 0;
        for (char c : header)
            if (c == ',') ++commas;
        n_cols = commas - 1;
    }
    if (n_cols < 1) throw ConfigError("no feature columns in " + path.string());

    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        std::getline(ls, cell, ','); // index, unused on load
        std::getline(ls, cell, ',');
        int label = -1;
        for (std::size_t c = 0; c < class_names.size(); ++c)
            if (class_names[c] == cell) label = static_cast<int>(c);
        if (label < 0) throw ConfigError("unknown class name `" + cell + "` in " + path.string());
        labels.push_back(label);
        std::vector<double> row;
        row.reserve(static_cast<std::size_t>(n_cols));
        while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
        if (static_cast<long>(row.size()) != n_cols)
            throw ConfigError("ragged row in " + path.string());
        rows.push_back(std::move(row));
    }

    LabeledMatrix block;
    block.n_classes = static_cast<int>(class_names.size());
    block.labels = std::move(labels);
    block.x.resize(static_cast<long>(rows.size()), n_cols);
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (long f = 0; f < n_cols; ++f) block.x(static_cast<long>(r), f) = rows[r][static_cast<std::size_t>(f)];
    return block;
}

} // namespace

void save_dataset(const StoredDataset& dataset, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);

    std::vector<long> train_idx(static_cast<std::size_t>(dataset.train.rows()), 0);
    std::vector<long> test_idx(static_cast<std::size_t>(dataset.test.rows()), 0);
    if (dataset.kind() == "synthetic") {
        // training carries no time information; the test stream is 1-based
        for (std::size_t i = 0; i < test_idx.size(); ++i) test_idx[i] = static_cast<long>(i) + 1;
    } else {
        for (std::size_t i = 0; i < train_idx.size(); ++i) train_idx[i] = static_cast<long>(i);
        for (std::size_t i = 0; i < test_idx.size(); ++i)
            test_idx[i] = dataset.train.rows() + static_cast<long>(i);
    }
    write_block_csv(dir / "train.csv", dataset.train, dataset.class_names, train_idx);
    write_block_csv(dir / "test.csv", dataset.test, dataset.class_names, test_idx);

    nlohmann::json meta = dataset.meta;
    meta["class_names"] = dataset.class_names;
    meta["sensor_map"] = {{"n_sensors", dataset.sensors.n_sensors()},
                          {"features_of", dataset.sensors.features_of}};
    write_text_file(dir / "meta.json", meta.dump(2) + "\n");
}

StoredDataset load_dataset(const std::filesystem::path& dir) {
    StoredDataset dataset;
    dataset.meta = nlohmann::json::parse(read_text_file(dir / "meta.json"));
    dataset.class_names = dataset.meta.at("class_names").get<std::vector<std::string>>();

    const auto& sm = dataset.meta.at("sensor_map");
    dataset.sensors.features_of = sm.at("features_of").get<std::vector<std::vector<int>>>();
    int n_features = 0;
    for (const auto& feats : dataset.sensors.features_of)
        n_features += static_cast<int>(feats.size());
    dataset.sensors.sensor_of.assign(static_cast<std::size_t>(n_features), -1);
    for (std::size_t s = 0; s < dataset.sensors.features_of.size(); ++s)
        for (int f : dataset.sensors.features_of[s])
            dataset.sensors.sensor_of[static_cast<std::size_t>(f)] = static_cast<int>(s);

    dataset.train = read_block_csv(dir / "train.csv", dataset.class_names);
    dataset.test = read_block_csv(dir / "test.csv", dataset.class_names);
    dataset.train.validate();
    dataset.test.validate();
    return dataset;
}

std::string file_checksum(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + path.string() + " for checksum");
    std::uint64_t hash = 0xCBF29CE484222325ULL;
    char buf[65536];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        const std::streamsize got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            hash ^= static_cast<unsigned char>(buf[i]);
            hash *= 0x100000001B3ULL;
        }
    }
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(hash));
    return hex;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << content;
    if (!out) throw ConfigError("failed writing " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace sensorfix
