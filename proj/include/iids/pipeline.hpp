#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "iids/balancing.hpp"
#include "iids/dataset.hpp"
#include "iids/feature_selection.hpp"
#include "iids/forest.hpp"
#include "iids/metrics.hpp"

namespace iids {

// One framework run: which selector and balancer wrap the forest, at
// which class level. The framework family follows from the combination:
// FW1 = (ALL, NONE), FW2 = (ALL, ROS|BRFC), FW3 = (CFS|IRM, NONE),
// FW4 = (CFS|IRM, ROS|BRFC).
struct FrameworkConfig {
    // Auto-derived by normalize() when empty, e.g. "FW4:CFS+BRFC".
    std::string name;
    SelectionMethod selector = SelectionMethod::kAll;
    BalanceMethod balancer = BalanceMethod::kNone;
    ClassLevel level = ClassLevel::kFine34;
    ForestConfig forest;
    SplitSpec split;
    int num_bins = 10;
    std::size_t irm_top_n = 25;
    double usc_threshold = 0.99;

    // Applies the structural implications (BRFC forces balanced
    // bootstrap mode) and fills in the default name. Throws ConfigError
    // on an unsupported selector (mRMR and RFE are ranking building
    // blocks, not standalone pipeline selectors).
    void normalize();
    int framework_family() const;
};

// What each stage actually consumed, kept so tests can audit that the
// test partition never leaks into fitting.
struct StageTrace {
    ScalerParams scaler;
    std::vector<std::size_t> train_rows;
    std::vector<std::size_t> test_rows;
    std::vector<std::size_t> balanced_class_counts;
};

struct ExperimentResult {
    FrameworkConfig framework;
    FeatureSubset selected_features;
    MetricsReport metrics;
    std::optional<GainReport> gain;
    // Stage name -> wall-clock seconds, in execution order. Excluded from
    // report files so report bytes stay reproducible.
    std::vector<std::pair<std::string, double>> timings;
    StageTrace trace;
    ForestModel model;
};

// Runs one framework end to end: relabel, split, fit scaler on train and
// apply to both partitions, select features on train, balance train,
// train the forest, predict the test partition, compute metrics. When a
// baseline result is given, also computes the F1 gain over the baseline's
// unsaturated classes. hierarchy may be null for kFine34. Errors raised
// inside a stage are rethrown as StageError tagged with the stage name.
ExperimentResult run_framework(const Dataset& data, const FrameworkConfig& config,
                               const ExperimentResult* baseline = nullptr,
                               const LabelHierarchy* hierarchy = nullptr);

// Writes report files into out_dir (created if missing): summary.tsv
// (framework x level table of macro precision/recall/F1, accuracy,
// kappa), per_class_f1_<level>.tsv (per-class F1 across frameworks),
// gains.txt (USC gain summary), report.kv (flat key-value dump). Output
// bytes are a pure function of the results. Throws DataError when
// results are empty or the directory cannot be written.
void emit_report(const std::vector<ExperimentResult>& results, const std::string& out_dir);

// Versioned JSON model file. An optional scaler travels with the model so
// raw CSVs can be standardized at prediction time. Corrupt or truncated
// files and unknown versions raise ModelIoError.
void save_model(const ForestModel& model, const std::string& path,
                const ScalerParams* scaler = nullptr);

struct LoadedModel {
    ForestModel model;
    std::optional<ScalerParams> scaler;
};

LoadedModel load_model(const std::string& path);

// JSON round-trip of the report-relevant slice of results (framework,
// metrics, gains, selected feature names), so separate runs can be merged
// into one report later. Models are not included.
void save_results(const std::vector<ExperimentResult>& results, const std::string& path);
std::vector<ExperimentResult> load_results(const std::string& path);

// A parsed experiment batch: the dataset and hierarchy to load, the
// shared split/forest settings, and the framework list to run at each
// class level. See parse_experiment_spec for the file format.
struct ExperimentSpec {
    std::string data_path;
    std::string hierarchy_path;
    std::string label_column = "label";
    std::vector<ClassLevel> levels{ClassLevel::kFine34};
    std::uint64_t seed = 0;
    double train_fraction = 0.8;
    bool stratified = true;
    int num_bins = 10;
    std::size_t num_trees = 100;
    std::size_t max_depth = 0;
    std::size_t min_samples_leaf = 1;
    FeaturesPerSplit features_per_split = FeaturesPerSplit::kSqrt;
    std::size_t explicit_features = 0;
    std::size_t brfc_per_class = 0;
    std::size_t irm_top_n = 25;
    double usc_threshold = 0.99;
    // selector/balancer pairs in run order.
    std::vector<std::pair<SelectionMethod, BalanceMethod>> frameworks;

    // Expands this spec into concrete per-framework configs for one
    // class level, deriving forest seeds from the master seed.
    std::vector<FrameworkConfig> materialize(ClassLevel level) const;
};

// Flat key-value format, one "key value" pair per line, '#' comments.
// Keys: data, hierarchy, label_column, levels (comma list), seed,
// train_fraction, stratified, num_bins, num_trees, max_depth,
// min_samples_leaf, features_per_split (sqrt|all|<n>), brfc_per_class,
// irm_top_n, usc_threshold, frameworks (comma list of
// <selector>[+<balancer>] entries; "Base" is an alias for ALL).
// Unknown keys raise ConfigError.
ExperimentSpec parse_experiment_spec(std::istream& in);
ExperimentSpec load_experiment_spec(const std::string& path);

// Runs every framework listed in the experiment config at every level,
// inserting an FW1 baseline per level when none is listed, and returns results
// in level-major, config order.
std::vector<ExperimentResult> run_experiment(const Dataset& data,
                                             const LabelHierarchy* hierarchy,
                                             const ExperimentSpec& spec);

}  // namespace iids
