#include "iids/forest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "iids/balancing.hpp"
#include "iids/error.hpp"
#include "iids/rng.hpp"

namespace iids {

double gini_impurity(std::span<const std::size_t> class_counts) {
    std::size_t total = 0;
    for (std::size_t c : class_counts) total += c;
    if (total == 0) throw DataError("gini_impurity: all class counts are zero");
    double sum_sq = 0.0;
    for (std::size_t c : class_counts) {
        const double p = static_cast<double>(c) / static_cast<double>(total);
        sum_sq += p * p;
    }
    return 1.0 - sum_sq;
}

namespace {

double gini_from_counts(const std::vector<std::size_t>& counts, std::size_t total) {
    double sum_sq = 0.0;
    for (std::size_t c : counts) {
        const double p = static_cast<double>(c) / static_cast<double>(total);
        sum_sq += p * p;
    }
    return 1.0 - sum_sq;
}

}  // namespace

std::optional<SplitChoice> best_split(const Dataset& data, std::span<const std::size_t> rows,
                                      std::span<const std::size_t> candidate_features,
                                      std::size_t min_child) {
    if (rows.empty()) throw DataError("best_split: no rows");
    const std::size_t m = data.num_classes();
    const std::size_t n = rows.size();

    std::vector<std::size_t> parent_counts(m, 0);
    for (std::size_t i : rows) parent_counts[static_cast<std::size_t>(data.labels[i])]++;
    const double parent_impurity = gini_from_counts(parent_counts, n);
    if (parent_impurity == 0.0) return std::nullopt;

    // Evaluate candidates in ascending feature order so that requiring a
    // strictly larger gain to replace the incumbent realizes the
    // lower-feature, lower-threshold tie-break.
    std::vector<std::size_t> candidates(candidate_features.begin(), candidate_features.end());
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    std::optional<SplitChoice> best;
    std::vector<std::pair<double, int>> values(n);
    std::vector<std::size_t> left_counts(m);
    for (std::size_t feature : candidates) {
        for (std::size_t i = 0; i < n; ++i) {
            values[i] = {data.at(rows[i], feature), data.labels[rows[i]]};
        }
        std::sort(values.begin(), values.end());
        if (values.front().first == values.back().first) continue;

        std::fill(left_counts.begin(), left_counts.end(), 0);
        std::size_t n_left = 0;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            left_counts[static_cast<std::size_t>(values[i].second)]++;
            ++n_left;
            if (values[i].first == values[i + 1].first) continue;
            const std::size_t n_right = n - n_left;
            if (n_left < min_child || n_right < min_child) continue;

            double left_sq = 0.0;
            double right_sq = 0.0;
            for (std::size_t c = 0; c < m; ++c) {
                const double pl = static_cast<double>(left_counts[c]) / static_cast<double>(n_left);
                const double pr = static_cast<double>(parent_counts[c] - left_counts[c]) /
                                  static_cast<double>(n_right);
                left_sq += pl * pl;
                right_sq += pr * pr;
            }
            const double weighted = (static_cast<double>(n_left) * (1.0 - left_sq) +
                                     static_cast<double>(n_right) * (1.0 - right_sq)) /
                                    static_cast<double>(n);
            const double gain = parent_impurity - weighted;
            if (gain <= 0.0) continue;
            if (!best || gain > best->gain) {
                const double threshold =
                    values[i].first + (values[i + 1].first - values[i].first) / 2.0;
                best = SplitChoice{feature, threshold, gain};
            }
        }
    }
    return best;
}

namespace {

struct PendingNode {
    std::int32_t node = 0;
    std::size_t begin = 0;
    std::size_t end = 0;
    std::size_t depth = 0;
};

// Draws `count` distinct feature indices without replacement by a partial
// Fisher-Yates pass over a scratch index array.
void draw_features(std::vector<std::size_t>& pool, std::size_t count, Rng& rng,
                   std::vector<std::size_t>& out) {
    out.clear();
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
        std::swap(pool[i], pool[j]);
        out.push_back(pool[i]);
    }
}

Tree train_tree(const Dataset& train, const ForestConfig& config,
                std::vector<std::size_t> sample, Rng& split_rng,
                std::vector<double>& importance_accum) {
    const std::size_t m = train.num_classes();
    const std::size_t k = train.k();
    std::size_t features_per_split = k;
    if (config.features_per_split == FeaturesPerSplit::kSqrt) {
        features_per_split =
            std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(k))));
    } else if (config.features_per_split == FeaturesPerSplit::kExplicit) {
        features_per_split = std::min(config.explicit_features, k);
        if (features_per_split == 0) {
            throw ConfigError("train_forest: explicit features_per_split must be at least 1");
        }
    }

    Tree tree;
    std::vector<std::size_t> pool(k);
    std::iota(pool.begin(), pool.end(), 0);
    std::vector<std::size_t> candidates;
    const auto n_root = static_cast<double>(sample.size());

    tree.nodes.emplace_back();
    std::vector<PendingNode> stack{{0, 0, sample.size(), 0}};
    while (!stack.empty()) {
        const PendingNode cur = stack.back();
        stack.pop_back();
        const std::span<const std::size_t> rows(sample.data() + cur.begin,
                                                cur.end - cur.begin);

        std::vector<std::uint32_t> counts(m, 0);
        for (std::size_t i : rows) counts[static_cast<std::size_t>(train.labels[i])]++;
        const bool depth_capped = config.max_depth > 0 && cur.depth >= config.max_depth;
        const bool too_small = rows.size() < 2 * config.min_samples_leaf;

        std::optional<SplitChoice> choice;
        if (!depth_capped && !too_small) {
            draw_features(pool, features_per_split, split_rng, candidates);
            std::sort(candidates.begin(), candidates.end());
            choice = best_split(train, rows, candidates, config.min_samples_leaf);
        }
        if (!choice) {
            tree.nodes[static_cast<std::size_t>(cur.node)].class_counts = std::move(counts);
            continue;
        }

        importance_accum[choice->feature] +=
            (static_cast<double>(rows.size()) / n_root) * choice->gain;

        const auto mid_it = std::stable_partition(
            sample.begin() + static_cast<std::ptrdiff_t>(cur.begin),
            sample.begin() + static_cast<std::ptrdiff_t>(cur.end), [&](std::size_t i) {
                return train.at(i, choice->feature) <= choice->threshold;
            });
        const auto mid = static_cast<std::size_t>(mid_it - sample.begin());

        const auto left = static_cast<std::int32_t>(tree.nodes.size());
        const auto right = left + 1;
        tree.nodes.emplace_back();
        tree.nodes.emplace_back();
        TreeNode& node = tree.nodes[static_cast<std::size_t>(cur.node)];
        node.feature_index = static_cast<int>(choice->feature);
        node.threshold = choice->threshold;
        node.left = left;
        node.right = right;
        stack.push_back({right, mid, cur.end, cur.depth + 1});
        stack.push_back({left, cur.begin, mid, cur.depth + 1});
    }
    return tree;
}

}  // namespace

int Tree::predict(std::span<const double> row) const {
    std::size_t at = 0;
    while (!nodes[at].is_leaf()) {
        const TreeNode& node = nodes[at];
        at = static_cast<std::size_t>(
            row[static_cast<std::size_t>(node.feature_index)] <= node.threshold ? node.left
                                                                                : node.right);
    }
    const auto& counts = nodes[at].class_counts;
    std::size_t winner = 0;
    for (std::size_t c = 1; c < counts.size(); ++c) {
        if (counts[c] > counts[winner]) winner = c;
    }
    return static_cast<int>(winner);
}

ForestModel train_forest(const Dataset& train, const ForestConfig& config) {
    if (config.num_trees == 0) throw ConfigError("train_forest: num_trees must be at least 1");
    if (train.n() == 0) throw DataError("train_forest: empty training set");
    auto counts = train.class_counts();
    std::size_t present = 0;
    std::size_t minority = train.n();
    for (std::size_t c : counts) {
        if (c > 0) {
            ++present;
            minority = std::min(minority, c);
        }
    }
    if (present < 2) throw DataError("train_forest: training data has fewer than 2 classes");

    std::size_t per_class = config.balanced_per_class;
    if (config.bootstrap_mode == BootstrapMode::kBalanced && per_class == 0) per_class = minority;

    ForestModel model;
    model.config = config;
    model.class_names = train.class_names;
    model.feature_names = train.feature_names;
    model.importances.assign(train.k(), 0.0);
    model.trees.reserve(config.num_trees);

    for (std::size_t t = 0; t < config.num_trees; ++t) {
        const std::uint64_t tree_seed = derive_seed(config.seed, t);
        std::vector<std::size_t> sample;
        if (config.bootstrap_mode == BootstrapMode::kBalanced) {
            sample = balanced_bootstrap(train, per_class, derive_seed(tree_seed, 0));
        } else {
            Rng bootstrap_rng(derive_seed(tree_seed, 0));
            sample.resize(train.n());
            for (auto& i : sample) i = bootstrap_rng.below(train.n());
        }
        Rng split_rng(derive_seed(tree_seed, 1));
        model.trees.push_back(
            train_tree(train, config, std::move(sample), split_rng, model.importances));
    }

    const double total =
        std::accumulate(model.importances.begin(), model.importances.end(), 0.0);
    if (total > 0.0) {
        for (double& v : model.importances) v /= total;
    }
    return model;
}

int ForestModel::predict_row(std::span<const double> row) const {
    std::vector<std::size_t> votes(class_names.size(), 0);
    for (const Tree& tree : trees) votes[static_cast<std::size_t>(tree.predict(row))]++;
    std::size_t winner = 0;
    for (std::size_t c = 1; c < votes.size(); ++c) {
        if (votes[c] > votes[winner]) winner = c;
    }
    return static_cast<int>(winner);
}

std::vector<int> predict(const ForestModel& model, const Dataset& data) {
    if (data.k() != model.k()) {
        throw DataError("predict: model expects " + std::to_string(model.k()) +
                        " features, data has " + std::to_string(data.k()));
    }
    std::vector<int> out(data.n());
    for (std::size_t i = 0; i < data.n(); ++i) out[i] = model.predict_row(data.row(i));
    return out;
}

}  // namespace iids
