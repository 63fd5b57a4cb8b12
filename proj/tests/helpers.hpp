// Small shared fixtures and filesystem scratch space for the test suite.

#pragma once

#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "iids/dataset.hpp"

namespace helpers {

// Per-process scratch directory, wiped lazily on first use.
inline std::filesystem::path scratch_dir() {
    static const std::filesystem::path dir = [] {
        auto d = std::filesystem::temp_directory_path() /
                 ("iids_tests_" + std::to_string(::getpid()));
        std::filesystem::remove_all(d);
        std::filesystem::create_directories(d);
        return d;
    }();
    return dir;
}

inline std::string scratch_file(const std::string& name) {
    return (scratch_dir() / name).string();
}

inline std::string write_file(const std::string& name, const std::string& contents) {
    const std::string path = scratch_file(name);
    std::ofstream out(path, std::ios::binary);
    out << contents;
    return path;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Dataset literal: one row per entry of `rows`, label appended per row.
inline iids::Dataset make_dataset(const std::vector<std::vector<double>>& rows,
                                  const std::vector<int>& labels,
                                  std::vector<std::string> class_names = {}) {
    iids::Dataset data;
    for (std::size_t j = 0; rows.size() > 0 && j < rows.front().size(); ++j) {
        data.feature_names.push_back("x" + std::to_string(j));
    }
    for (const auto& row : rows) {
        data.features.insert(data.features.end(), row.begin(), row.end());
    }
    data.labels = labels;
    if (class_names.empty()) {
        int max_label = -1;
        for (int l : labels) max_label = std::max(max_label, l);
        for (int c = 0; c <= max_label; ++c) class_names.push_back("c" + std::to_string(c));
    }
    data.class_names = std::move(class_names);
    return data;
}

}  // namespace helpers
