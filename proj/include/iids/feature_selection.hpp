#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "iids/dataset.hpp"
#include "iids/forest.hpp"

namespace iids {

enum class SelectionMethod { kAll, kCfs, kMrmr, kRfe, kIrm };

const char* to_string(SelectionMethod method);
SelectionMethod selection_method_from_string(const std::string& s);

// An ordered list of selected feature indices with the method that chose
// them. scores, when non-empty, is aligned with indices (meaning depends
// on the method: merit-free selectors leave it empty).
struct FeatureSubset {
    SelectionMethod method = SelectionMethod::kAll;
    std::vector<std::size_t> indices;
    std::vector<double> scores;
};

// Equal-frequency binning. Each value maps to
// (first sorted position of the value) * num_bins / N, so tied values
// share the lower bin and a constant column collapses to bin 0.
std::vector<int> discretize(std::span<const double> column, int num_bins);

// Shannon entropy in bits of a symbol sequence.
double entropy_bits(std::span<const int> x);

// Mutual information in bits between two equal-length symbol sequences.
double mutual_information_bits(std::span<const int> x, std::span<const int> y);

// SU = 2*I(x;y) / (H(x)+H(y)), clamped to [0,1]; defined as 0 when both
// entropies are zero. Throws DataError on length mismatch.
double symmetrical_uncertainty(std::span<const int> x, std::span<const int> y);

// Pairwise symmetrical uncertainty between discretized features, plus
// each feature's association with the labels.
struct AssociationMatrix {
    std::size_t k = 0;
    std::vector<double> feature_class;
    std::vector<double> feature_feature;

    double ff(std::size_t i, std::size_t j) const { return feature_feature[i * k + j]; }
};

AssociationMatrix build_association_matrix(const Dataset& data, int num_bins = 10);

// Merit = (s * mean_cf) / sqrt(s + s*(s-1) * mean_ff) for subset size s.
// Throws ConfigError on an empty subset.
double cfs_merit(std::span<const std::size_t> subset, const AssociationMatrix& assoc);

// Best-first search over feature subsets maximizing cfs_merit: starts
// from the empty set, always expands the best open subset by one feature,
// and stops after `patience` consecutive expansions that fail to improve
// the best merit seen. Ties between equal-merit subsets break toward the
// smaller subset, then lexicographically smaller indices. The returned
// indices are ascending; scores holds each feature's class association
// (the subset's merit is recomputable via cfs_merit).
FeatureSubset cfs_select(const Dataset& train, int num_bins = 10, int patience = 5);

// Greedy forward ranking under the mutual-information difference
// criterion: the first pick maximizes I(x;y), later picks maximize
// I(x;y) - mean over selected I(x;x_sel). Ties break toward the lower
// feature index. scores holds each pick's criterion value at selection
// time. Throws ConfigError when top_k is 0 or exceeds k.
FeatureSubset mrmr_rank(const Dataset& train, std::size_t top_k, int num_bins = 10);

// Trains a forest, eliminates the feature with the lowest importance
// (ties eliminate the higher index), and repeats until top_k features
// survive. Round r trains with seed derive_seed(config.seed, r). Returns
// the survivors ordered by descending importance in the final round
// (ties toward the lower index), importances as scores.
FeatureSubset rfe_rank(const Dataset& train, std::size_t top_k, const ForestConfig& config);

// Intersection of the top_n rfe_rank and top_n mrmr_rank features,
// ordered by ascending feature index. An empty intersection is returned
// as an empty subset; callers decide whether that is fatal.
FeatureSubset irm_select(const Dataset& train, std::size_t top_n, const ForestConfig& config,
                         int num_bins = 10);

// Text round-trip: a "method <tag>" line followed by one feature name per
// line, tab-separated from its score when scores are present.
void save_subset(const FeatureSubset& subset, const std::vector<std::string>& feature_names,
                 const std::string& path);
FeatureSubset load_subset(const std::string& path, const std::vector<std::string>& feature_names);

}  // namespace iids
