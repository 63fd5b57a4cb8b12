#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "iids/dataset.hpp"

namespace iids {

enum class FeaturesPerSplit { kSqrt, kAll, kExplicit };
enum class BootstrapMode { kStandard, kBalanced };

struct ForestConfig {
    std::size_t num_trees = 100;
    // Zero means unlimited depth.
    std::size_t max_depth = 0;
    std::size_t min_samples_leaf = 1;
    FeaturesPerSplit features_per_split = FeaturesPerSplit::kSqrt;
    // Number of candidate features per split when features_per_split is
    // kExplicit; ignored otherwise.
    std::size_t explicit_features = 0;
    BootstrapMode bootstrap_mode = BootstrapMode::kStandard;
    // Per-class bootstrap size for kBalanced; zero means the minority
    // class count of the training set.
    std::size_t balanced_per_class = 0;
    std::uint64_t seed = 0;
};

// One node of a flat-array tree. feature_index < 0 marks a leaf, in which
// case class_counts holds the training-class histogram at that leaf and
// left/right are unused. Internal nodes route rows with
// feature <= threshold to the left child.
struct TreeNode {
    int feature_index = -1;
    double threshold = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::vector<std::uint32_t> class_counts;

    bool is_leaf() const { return feature_index < 0; }
};

struct Tree {
    // nodes[0] is the root.
    std::vector<TreeNode> nodes;

    int predict(std::span<const double> row) const;
};

struct ForestModel {
    std::vector<Tree> trees;
    ForestConfig config;
    std::vector<std::string> class_names;
    std::vector<std::string> feature_names;
    // Impurity-decrease importances over the trained features, normalized
    // to sum to 1 when any split exists, all zero otherwise.
    std::vector<double> importances;

    std::size_t k() const { return feature_names.size(); }
    int predict_row(std::span<const double> row) const;
};

// 1 - sum(p_i^2). Throws DataError when all counts are zero.
double gini_impurity(std::span<const std::size_t> class_counts);

struct SplitChoice {
    std::size_t feature = 0;
    double threshold = 0.0;
    double gain = 0.0;
};

// Finds the (feature, threshold) pair with maximal Gini gain over the
// given rows, considering only candidate_features and thresholds at
// midpoints between consecutive distinct sorted values. Splits leaving a
// child with fewer than min_child rows are discarded. Returns nullopt
// when no split has strictly positive gain. Ties break toward the lower
// feature index, then the lower threshold.
std::optional<SplitChoice> best_split(const Dataset& data,
                                      std::span<const std::size_t> rows,
                                      std::span<const std::size_t> candidate_features,
                                      std::size_t min_child = 1);

// Trains config.num_trees CART trees on independent bootstrap samples
// (standard or class-balanced per config.bootstrap_mode), each split
// drawing a fresh random candidate-feature subset. Deterministic for a
// fixed config, regardless of evaluation order. Throws DataError when the
// training set has fewer than 2 distinct classes present.
ForestModel train_forest(const Dataset& train, const ForestConfig& config);

// Plurality vote over the trees' leaf-majority predictions; all ties
// break toward the lower class index. Throws DataError on feature-width
// mismatch.
std::vector<int> predict(const ForestModel& model, const Dataset& data);

}  // namespace iids
