#ifndef IIDS_DATASET_HPP
#define IIDS_DATASET_HPP

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace iids {

/// Labeled feature matrix: N rows of k real-valued flow statistics plus an
/// integer class label per row. Immutable by convention after construction;
/// every pipeline operation returns a fresh Dataset.
struct Dataset {
    std::vector<double> features;            // row-major, n() * k()
    std::vector<int> labels;                 // each in [0, num_classes())
    std::vector<std::string> feature_names;  // k entries, all distinct
    std::vector<std::string> class_names;    // m entries, all distinct

    // Row count also works for label-less prediction inputs.
    std::size_t n() const { return k() == 0 ? labels.size() : features.size() / k(); }
    std::size_t k() const { return feature_names.size(); }
    std::size_t num_classes() const { return class_names.size(); }

    double at(std::size_t row, std::size_t col) const { return features[row * k() + col]; }
    std::span<const double> row(std::size_t i) const { return {features.data() + i * k(), k()}; }
    std::vector<double> column(std::size_t j) const;

    /// Number of rows per class, indexed by label value.
    std::vector<std::size_t> class_counts() const;

    /// Throws DataError when a structural invariant is broken.
    void validate() const;
};

/// Per-column standardization parameters. Standard deviation is the
/// population form (divide by N).
struct ScalerParams {
    std::vector<double> means;
    std::vector<double> stddevs;

    std::size_t k() const { return means.size(); }
};

struct SplitSpec {
    double train_fraction = 0.8;
    std::uint64_t seed = 0;
    bool stratified = true;
};

enum class ClassLevel { kFine34, kCategory8, kBinary2 };

const char* to_string(ClassLevel level);
ClassLevel class_level_from_string(const std::string& s);

/// Two-level relabeling table: fine attack labels group into categories, and
/// every category except the benign one collapses into a single attack class.
///
/// File format (whitespace-separated, '#' comments, blank lines ignored):
///   benign <category>          -- first entry, names the benign category
///   <fine_label> <category>    -- one line per fine label
/// Row order of the fine labels is the canonical class-name order.
class LabelHierarchy {
public:
    LabelHierarchy(std::vector<std::pair<std::string, std::string>> fine_to_category,
                   std::string benign_category);

    static LabelHierarchy load(const std::string& path);
    void save(const std::string& path) const;

    /// Category of a fine label; throws DataError when unmapped.
    const std::string& category_of(const std::string& fine_label) const;

    /// "benign" or "attack".
    const std::string& binary_of(const std::string& fine_label) const;

    bool contains(const std::string& fine_label) const;

    /// Fine labels in file order (the canonical class order).
    const std::vector<std::string>& fine_labels() const { return fine_labels_; }

    /// Categories in first-appearance order.
    const std::vector<std::string>& categories() const { return categories_; }

    const std::string& benign_category() const { return benign_category_; }

private:
    std::vector<std::pair<std::string, std::string>> fine_to_category_;
    std::vector<std::string> fine_labels_;
    std::vector<std::string> categories_;
    std::string benign_category_;
};

/// Loads an RFC 4180 CSV with a header row. All columns except
/// `label_column` must parse as finite reals. When `class_names` is
/// non-empty it fixes the label encoding (labels outside the list are an
/// error); otherwise classes are numbered by first appearance.
Dataset load_csv(const std::string& path, const std::string& label_column = "label",
                 const std::vector<std::string>& class_names = {});

/// Inverse of load_csv: header then one row per sample, label column last.
void save_csv(const Dataset& data, const std::string& path,
              const std::string& label_column = "label");

/// Column means and population standard deviations of the training data.
ScalerParams fit_scaler(const Dataset& train);

/// (x - mean) / stddev per cell; columns with zero stddev become all-zero.
Dataset apply_scaler(const Dataset& data, const ScalerParams& params);

/// Disjoint train/test partition of the rows. Stratified mode keeps each
/// class's train share within one sample of train_fraction * count.
std::pair<Dataset, Dataset> split(const Dataset& data, const SplitSpec& spec);

/// Same as split but also reports which original row indices landed where.
struct SplitResult {
    Dataset train;
    Dataset test;
    std::vector<std::size_t> train_rows;
    std::vector<std::size_t> test_rows;
};
SplitResult split_with_indices(const Dataset& data, const SplitSpec& spec);

/// Re-labels every row at the requested level. Features and row order are
/// untouched; class_names are rebuilt in first-appearance order over the
/// original class_names sequence.
Dataset relabel(const Dataset& data, const LabelHierarchy& hierarchy, ClassLevel level);

/// Keeps only the listed feature columns, in the given order.
Dataset select_columns(const Dataset& data, std::span<const std::size_t> indices);

/// Loads only the named columns of a CSV as features, in the given order,
/// ignoring every other column (so non-numeric columns may be present as
/// long as they are not requested). labels and class_names stay empty.
Dataset load_csv_columns(const std::string& path, const std::vector<std::string>& columns);

/// RFC 4180 quoting: returns the field quoted iff it contains a comma,
/// quote, or line break.
std::string csv_quote(const std::string& field);

}  // namespace iids

#endif  // IIDS_DATASET_HPP
