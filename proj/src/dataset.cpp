#include "iids/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "iids/error.hpp"
#include "iids/rng.hpp"

namespace iids {

std::vector<double> Dataset::column(std::size_t j) const {
    std::vector<double> out(n());
    for (std::size_t i = 0; i < n(); ++i) out[i] = at(i, j);
    return out;
}

std::vector<std::size_t> Dataset::class_counts() const {
    std::vector<std::size_t> counts(num_classes(), 0);
    for (int label : labels) counts[static_cast<std::size_t>(label)]++;
    return counts;
}

void Dataset::validate() const {
    if (k() > 0 && features.size() % k() != 0) {
        throw DataError("dataset: feature matrix size is not a multiple of k");
    }
    if (!labels.empty() && labels.size() != n()) {
        throw DataError("dataset: label count does not match row count");
    }
    for (int label : labels) {
        if (label < 0 || static_cast<std::size_t>(label) >= num_classes()) {
            throw DataError("dataset: label out of range of class_names");
        }
    }
    std::unordered_set<std::string> seen;
    for (const auto& name : feature_names) {
        if (!seen.insert(name).second) {
            throw DataError("dataset: duplicate feature name '" + name + "'");
        }
    }
}

const char* to_string(ClassLevel level) {
    switch (level) {
        case ClassLevel::kFine34: return "fine34";
        case ClassLevel::kCategory8: return "category8";
        case ClassLevel::kBinary2: return "binary2";
    }
    return "?";
}

ClassLevel class_level_from_string(const std::string& s) {
    if (s == "fine34" || s == "fine") return ClassLevel::kFine34;
    if (s == "category8" || s == "category") return ClassLevel::kCategory8;
    if (s == "binary2" || s == "binary") return ClassLevel::kBinary2;
    throw ConfigError("unknown class level '" + s + "' (expected fine34|category8|binary2)");
}

// --- label hierarchy ---------------------------------------------------

LabelHierarchy::LabelHierarchy(std::vector<std::pair<std::string, std::string>> fine_to_category,
                               std::string benign_category)
    : fine_to_category_(std::move(fine_to_category)),
      benign_category_(std::move(benign_category)) {
    if (fine_to_category_.empty()) throw DataError("label hierarchy: empty mapping");
    std::unordered_set<std::string> fine_seen;
    std::unordered_set<std::string> cat_seen;
    for (const auto& [fine, cat] : fine_to_category_) {
        if (!fine_seen.insert(fine).second) {
            throw DataError("label hierarchy: fine label '" + fine + "' mapped twice");
        }
        fine_labels_.push_back(fine);
        if (cat_seen.insert(cat).second) categories_.push_back(cat);
    }
    if (!cat_seen.count(benign_category_)) {
        throw DataError("label hierarchy: benign category '" + benign_category_ +
                        "' does not appear in the mapping");
    }
}

LabelHierarchy LabelHierarchy::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("label hierarchy: cannot open '" + path + "'");
    std::string line;
    std::string benign;
    std::vector<std::pair<std::string, std::string>> mapping;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream fields(line);
        std::string a, b, extra;
        if (!(fields >> a)) continue;  // blank line
        if (!(fields >> b) || (fields >> extra)) {
            throw DataError("label hierarchy: '" + path + "' line " + std::to_string(line_no) +
                            ": expected two whitespace-separated fields");
        }
        if (a == "benign") {
            if (!benign.empty()) {
                throw DataError("label hierarchy: duplicate benign directive at line " +
                                std::to_string(line_no));
            }
            benign = b;
        } else {
            mapping.emplace_back(a, b);
        }
    }
    if (benign.empty()) {
        throw DataError("label hierarchy: '" + path + "' is missing the 'benign <category>' line");
    }
    return LabelHierarchy(std::move(mapping), std::move(benign));
}

void LabelHierarchy::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw DataError("label hierarchy: cannot write '" + path + "'");
    out << "benign\t" << benign_category_ << "\n";
    for (const auto& [fine, cat] : fine_to_category_) out << fine << "\t" << cat << "\n";
}

const std::string& LabelHierarchy::category_of(const std::string& fine_label) const {
    for (const auto& [fine, cat] : fine_to_category_) {
        if (fine == fine_label) return cat;
    }
    throw DataError("label hierarchy: unmapped fine label '" + fine_label + "'");
}

const std::string& LabelHierarchy::binary_of(const std::string& fine_label) const {
    static const std::string kBenign = "benign";
    static const std::string kAttack = "attack";
    return category_of(fine_label) == benign_category_ ? kBenign : kAttack;
}

bool LabelHierarchy::contains(const std::string& fine_label) const {
    return std::any_of(fine_to_category_.begin(), fine_to_category_.end(),
                       [&](const auto& p) { return p.first == fine_label; });
}

// --- CSV ----------------------------------------------------------------

namespace {

// RFC 4180 field splitter. Handles quoted fields, doubled-quote escapes,
// and CR/LF line endings. Returns one vector of fields per record.
std::vector<std::vector<std::string>> parse_csv(std::istream& in, const std::string& path) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> fields;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;
    char c;
    auto end_field = [&] {
        fields.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_record = [&] {
        end_field();
        records.push_back(std::move(fields));
        fields.clear();
    };
    while (in.get(c)) {
        if (in_quotes) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get(c);
                    field.push_back('"');
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(c);
            }
            continue;
        }
        switch (c) {
            case '"':
                if (field.empty() && !field_started) {
                    in_quotes = true;
                    field_started = true;
                } else {
                    field.push_back(c);  // stray quote inside unquoted field
                }
                break;
            case ',':
                end_field();
                break;
            case '\r':
                break;
            case '\n':
                end_record();
                break;
            default:
                field.push_back(c);
                field_started = true;
                break;
        }
    }
    if (in_quotes) throw DataError("csv: '" + path + "' ends inside a quoted field");
    // Final record without trailing newline.
    if (field_started || !field.empty() || !fields.empty()) end_record();
    return records;
}

double parse_cell(const std::string& cell, std::size_t row, const std::string& column,
                  const std::string& path) {
    double value = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    // Tolerate leading whitespace and a leading '+', which from_chars rejects.
    while (first != last && (*first == ' ' || *first == '\t')) ++first;
    if (first != last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, value);
    while (ptr != last && (*ptr == ' ' || *ptr == '\t')) ++ptr;
    if (ec != std::errc() || ptr != last || !std::isfinite(value)) {
        throw DataError("csv: '" + path + "' row " + std::to_string(row) + ", column '" + column +
                        "': cell '" + cell + "' is not a finite number");
    }
    return value;
}

void append_double(std::string& out, double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, ptr);
}

}  // namespace

Dataset load_csv(const std::string& path, const std::string& label_column,
                 const std::vector<std::string>& class_names) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("csv: cannot open '" + path + "'");
    auto records = parse_csv(in, path);
    if (records.empty()) throw DataError("csv: '" + path + "' is empty");

    const auto& header = records.front();
    std::size_t label_idx = header.size();
    std::unordered_set<std::string> seen;
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (!seen.insert(header[j]).second) {
            throw DataError("csv: '" + path + "' has duplicate header name '" + header[j] + "'");
        }
        if (header[j] == label_column) label_idx = j;
    }
    if (label_idx == header.size()) {
        throw DataError("csv: '" + path + "' has no label column named '" + label_column + "'");
    }

    Dataset out;
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (j != label_idx) out.feature_names.push_back(header[j]);
    }
    std::unordered_map<std::string, int> label_codes;
    out.class_names = class_names;
    for (std::size_t c = 0; c < out.class_names.size(); ++c) {
        label_codes[out.class_names[c]] = static_cast<int>(c);
    }

    const std::size_t k = out.feature_names.size();
    out.features.reserve((records.size() - 1) * k);
    out.labels.reserve(records.size() - 1);
    for (std::size_t r = 1; r < records.size(); ++r) {
        const auto& rec = records[r];
        if (rec.size() != header.size()) {
            throw DataError("csv: '" + path + "' row " + std::to_string(r) + " has " +
                            std::to_string(rec.size()) + " fields, expected " +
                            std::to_string(header.size()));
        }
        for (std::size_t j = 0; j < rec.size(); ++j) {
            if (j == label_idx) continue;
            out.features.push_back(parse_cell(rec[j], r, header[j], path));
        }
        const std::string& label = rec[label_idx];
        auto it = label_codes.find(label);
        if (it == label_codes.end()) {
            if (!class_names.empty()) {
                throw DataError("csv: '" + path + "' row " + std::to_string(r) + ": label '" +
                                label + "' is not in the canonical class table");
            }
            it = label_codes.emplace(label, static_cast<int>(out.class_names.size())).first;
            out.class_names.push_back(label);
        }
        out.labels.push_back(it->second);
    }
    if (out.labels.empty()) {
        throw DataError("csv: '" + path + "' has a header but no data rows");
    }
    return out;
}

std::string csv_quote(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string q = "\"";
    for (char c : field) {
        if (c == '"') q += "\"\"";
        else q.push_back(c);
    }
    q.push_back('"');
    return q;
}

void save_csv(const Dataset& data, const std::string& path, const std::string& label_column) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("csv: cannot write '" + path + "'");
    std::string line;
    for (const auto& name : data.feature_names) {
        line += csv_quote(name);
        line.push_back(',');
    }
    line += csv_quote(label_column);
    line.push_back('\n');
    out << line;
    for (std::size_t i = 0; i < data.n(); ++i) {
        line.clear();
        for (std::size_t j = 0; j < data.k(); ++j) {
            append_double(line, data.at(i, j));
            line.push_back(',');
        }
        line += csv_quote(data.class_names[static_cast<std::size_t>(data.labels[i])]);
        line.push_back('\n');
        out << line;
    }
    if (!out) throw DataError("csv: write to '" + path + "' failed");
}

Dataset load_csv_columns(const std::string& path, const std::vector<std::string>& columns) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("csv: cannot open '" + path + "'");
    auto records = parse_csv(in, path);
    if (records.empty()) throw DataError("csv: '" + path + "' is empty");

    const auto& header = records.front();
    std::vector<std::size_t> positions;
    for (const auto& wanted : columns) {
        const auto it = std::find(header.begin(), header.end(), wanted);
        if (it == header.end()) {
            throw DataError("csv: '" + path + "' has no column named '" + wanted + "'");
        }
        positions.push_back(static_cast<std::size_t>(it - header.begin()));
    }

    Dataset out;
    out.feature_names = columns;
    out.features.reserve((records.size() - 1) * columns.size());
    for (std::size_t r = 1; r < records.size(); ++r) {
        const auto& rec = records[r];
        if (rec.size() != header.size()) {
            throw DataError("csv: '" + path + "' row " + std::to_string(r) + " has " +
                            std::to_string(rec.size()) + " fields, expected " +
                            std::to_string(header.size()));
        }
        for (std::size_t p : positions) {
            out.features.push_back(parse_cell(rec[p], r, header[p], path));
        }
    }
    if (records.size() == 1) {
        throw DataError("csv: '" + path + "' has a header but no data rows");
    }
    return out;
}

// --- scaler ---------------------------------------------------------------

ScalerParams fit_scaler(const Dataset& train) {
    if (train.n() == 0) throw DataError("fit_scaler: empty dataset");
    const std::size_t n = train.n();
    const std::size_t k = train.k();
    ScalerParams params;
    params.means.assign(k, 0.0);
    params.stddevs.assign(k, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < k; ++j) params.means[j] += train.at(i, j);
    }
    for (std::size_t j = 0; j < k; ++j) params.means[j] /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            const double d = train.at(i, j) - params.means[j];
            params.stddevs[j] += d * d;
        }
    }
    for (std::size_t j = 0; j < k; ++j) {
        params.stddevs[j] = std::sqrt(params.stddevs[j] / static_cast<double>(n));
    }
    return params;
}

Dataset apply_scaler(const Dataset& data, const ScalerParams& params) {
    if (params.k() != data.k()) {
        throw DataError("apply_scaler: params have " + std::to_string(params.k()) +
                        " columns, data has " + std::to_string(data.k()));
    }
    Dataset out = data;
    for (std::size_t i = 0; i < data.n(); ++i) {
        for (std::size_t j = 0; j < data.k(); ++j) {
            double& cell = out.features[i * data.k() + j];
            cell = params.stddevs[j] == 0.0 ? 0.0 : (cell - params.means[j]) / params.stddevs[j];
        }
    }
    return out;
}

// --- split ------------------------------------------------------------------

namespace {

Dataset take_rows(const Dataset& data, const std::vector<std::size_t>& rows) {
    Dataset out;
    out.feature_names = data.feature_names;
    out.class_names = data.class_names;
    out.features.reserve(rows.size() * data.k());
    out.labels.reserve(rows.size());
    for (std::size_t i : rows) {
        auto r = data.row(i);
        out.features.insert(out.features.end(), r.begin(), r.end());
        out.labels.push_back(data.labels[i]);
    }
    return out;
}

}  // namespace

SplitResult split_with_indices(const Dataset& data, const SplitSpec& spec) {
    if (spec.train_fraction <= 0.0 || spec.train_fraction >= 1.0) {
        throw DataError("split: train_fraction must be strictly between 0 and 1");
    }
    std::vector<std::size_t> train_rows;
    std::vector<std::size_t> test_rows;
    if (spec.stratified) {
        std::vector<std::vector<std::size_t>> by_class(data.num_classes());
        for (std::size_t i = 0; i < data.n(); ++i) {
            by_class[static_cast<std::size_t>(data.labels[i])].push_back(i);
        }
        for (std::size_t c = 0; c < by_class.size(); ++c) {
            if (by_class[c].empty()) {
                throw DataError("split: class '" + data.class_names[c] +
                                "' has zero samples; stratification is impossible");
            }
        }
        for (std::size_t c = 0; c < by_class.size(); ++c) {
            auto& rows = by_class[c];
            Rng rng(derive_seed(spec.seed, c));
            rng.shuffle(rows);
            const auto n_train = static_cast<std::size_t>(
                std::llround(spec.train_fraction * static_cast<double>(rows.size())));
            train_rows.insert(train_rows.end(), rows.begin(), rows.begin() + n_train);
            test_rows.insert(test_rows.end(), rows.begin() + n_train, rows.end());
        }
    } else {
        std::vector<std::size_t> rows(data.n());
        for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
        Rng rng(spec.seed);
        rng.shuffle(rows);
        const auto n_train = static_cast<std::size_t>(
            std::llround(spec.train_fraction * static_cast<double>(rows.size())));
        train_rows.assign(rows.begin(), rows.begin() + n_train);
        test_rows.assign(rows.begin() + n_train, rows.end());
    }
    std::sort(train_rows.begin(), train_rows.end());
    std::sort(test_rows.begin(), test_rows.end());
    SplitResult result;
    result.train = take_rows(data, train_rows);
    result.test = take_rows(data, test_rows);
    result.train_rows = std::move(train_rows);
    result.test_rows = std::move(test_rows);
    return result;
}

std::pair<Dataset, Dataset> split(const Dataset& data, const SplitSpec& spec) {
    auto result = split_with_indices(data, spec);
    return {std::move(result.train), std::move(result.test)};
}

// --- relabel ---------------------------------------------------------------

Dataset relabel(const Dataset& data, const LabelHierarchy& hierarchy, ClassLevel level) {
    if (level == ClassLevel::kFine34) return data;
    Dataset out;
    out.features = data.features;
    out.feature_names = data.feature_names;
    std::vector<int> code_of_old(data.num_classes());
    std::unordered_map<std::string, int> new_codes;
    for (std::size_t c = 0; c < data.num_classes(); ++c) {
        const std::string& target = level == ClassLevel::kCategory8
                                        ? hierarchy.category_of(data.class_names[c])
                                        : hierarchy.binary_of(data.class_names[c]);
        auto it = new_codes.find(target);
        if (it == new_codes.end()) {
            it = new_codes.emplace(target, static_cast<int>(out.class_names.size())).first;
            out.class_names.push_back(target);
        }
        code_of_old[c] = it->second;
    }
    out.labels.reserve(data.n());
    for (int label : data.labels) {
        out.labels.push_back(code_of_old[static_cast<std::size_t>(label)]);
    }
    return out;
}

Dataset select_columns(const Dataset& data, std::span<const std::size_t> indices) {
    for (std::size_t j : indices) {
        if (j >= data.k()) throw DataError("select_columns: feature index out of range");
    }
    Dataset out;
    out.labels = data.labels;
    out.class_names = data.class_names;
    out.feature_names.reserve(indices.size());
    for (std::size_t j : indices) out.feature_names.push_back(data.feature_names[j]);
    out.features.reserve(data.n() * indices.size());
    for (std::size_t i = 0; i < data.n(); ++i) {
        for (std::size_t j : indices) out.features.push_back(data.at(i, j));
    }
    return out;
}

}  // namespace iids
