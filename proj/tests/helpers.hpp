#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "wavecast/epiweek.hpp"
#include "wavecast/preprocess.hpp"

namespace testutil {

/// Self-cleaning unique directory under the system temp root.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        auto base = std::filesystem::temp_directory_path();
        for (int i = 0;; ++i) {
            path_ = base / (tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(i));
            if (!std::filesystem::exists(path_))
                break;
        }
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream os(path);
    os << content;
}

inline std::string read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

inline std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream is(path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(is, line))
        lines.push_back(line);
    return lines;
}

/// Single-feature dataset (x = row index) with the given targets.
inline wavecast::SupervisedDataset index_feature_dataset(const std::vector<double>& targets) {
    wavecast::SupervisedDataset ds;
    ds.features = wavecast::Matrix(targets.size(), 1);
    for (std::size_t i = 0; i < targets.size(); ++i)
        ds.features.at(i, 0) = static_cast<double>(i);
    ds.targets = targets;
    ds.column_labels = {{"x", 1}};
    for (std::size_t i = 0; i < targets.size(); ++i)
        ds.row_weeks.push_back(static_cast<long>(i));
    return ds;
}

inline wavecast::SupervisedDataset make_dataset(const std::vector<std::vector<double>>& rows,
                                                const std::vector<double>& targets) {
    wavecast::SupervisedDataset ds;
    ds.features = wavecast::Matrix(rows.size(), rows.empty() ? 0 : rows[0].size());
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c)
            ds.features.at(r, c) = rows[r][c];
    ds.targets = targets;
    for (std::size_t c = 0; c < ds.features.n_cols; ++c)
        ds.column_labels.push_back({"f" + std::to_string(c), 1});
    for (std::size_t r = 0; r < rows.size(); ++r)
        ds.row_weeks.push_back(static_cast<long>(r));
    return ds;
}

} // namespace testutil
