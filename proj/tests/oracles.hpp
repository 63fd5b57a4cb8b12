// Independent re-computations used to cross-check the library. Each oracle
// is written from the defining formula with its own data structures, so a
// bug in the library cannot hide in a shared helper.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "iids/dataset.hpp"
#include "iids/feature_selection.hpp"

namespace oracles {

inline double entropy(std::span<const int> x) {
    std::map<int, std::size_t> counts;
    for (int v : x) counts[v]++;
    double h = 0.0;
    for (const auto& [symbol, count] : counts) {
        (void)symbol;
        const double p = static_cast<double>(count) / static_cast<double>(x.size());
        h -= p * std::log(p);
    }
    return h / std::log(2.0);
}

inline double mutual_information(std::span<const int> x, std::span<const int> y) {
    std::map<std::pair<int, int>, std::size_t> joint;
    std::map<int, std::size_t> mx;
    std::map<int, std::size_t> my;
    for (std::size_t i = 0; i < x.size(); ++i) {
        joint[{x[i], y[i]}]++;
        mx[x[i]]++;
        my[y[i]]++;
    }
    const auto n = static_cast<double>(x.size());
    double mi = 0.0;
    for (const auto& [xy, count] : joint) {
        const double p_xy = static_cast<double>(count) / n;
        const double p_x = static_cast<double>(mx[xy.first]) / n;
        const double p_y = static_cast<double>(my[xy.second]) / n;
        mi += p_xy * (std::log(p_xy / (p_x * p_y)) / std::log(2.0));
    }
    return mi;
}

// Best subset over all 2^k - 1 candidates by exhaustive enumeration, with
// the library's tie rules (higher merit, then smaller subset, then
// lexicographically smaller indices). Merit itself comes from the
// library's cfs_merit so the comparison isolates the search strategy;
// the merit formula has its own hand-computed checks.
struct ExhaustiveCfs {
    std::vector<std::size_t> indices;
    double merit = 0.0;
};

inline ExhaustiveCfs exhaustive_cfs(const iids::AssociationMatrix& assoc) {
    ExhaustiveCfs best;
    bool have = false;
    const std::size_t k = assoc.k;
    for (std::uint32_t mask = 1; mask < (1u << k); ++mask) {
        std::vector<std::size_t> subset;
        for (std::size_t j = 0; j < k; ++j) {
            if (mask & (1u << j)) subset.push_back(j);
        }
        const double merit = iids::cfs_merit(subset, assoc);
        const bool better =
            !have || merit > best.merit ||
            (merit == best.merit && (subset.size() < best.indices.size() ||
                                     (subset.size() == best.indices.size() &&
                                      subset < best.indices)));
        if (better) {
            best.indices = std::move(subset);
            best.merit = merit;
            have = true;
        }
    }
    return best;
}

// Greedy difference-criterion ranking recomputed from scratch on top of
// the oracle mutual information.
inline std::vector<std::size_t> greedy_mrmr(const std::vector<std::vector<int>>& columns,
                                            std::span<const int> labels, std::size_t top_k) {
    const std::size_t k = columns.size();
    std::vector<double> relevance(k);
    for (std::size_t j = 0; j < k; ++j) relevance[j] = mutual_information(columns[j], labels);
    std::vector<std::size_t> picked;
    std::vector<bool> used(k, false);
    while (picked.size() < top_k) {
        std::size_t arg = k;
        double best = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            if (used[j]) continue;
            double redundancy = 0.0;
            for (std::size_t i : picked) {
                redundancy += mutual_information(columns[j], columns[i]);
            }
            const double score = picked.empty()
                                     ? relevance[j]
                                     : relevance[j] - redundancy /
                                           static_cast<double>(picked.size());
            if (arg == k || score > best) {
                best = score;
                arg = j;
            }
        }
        used[arg] = true;
        picked.push_back(arg);
    }
    return picked;
}

inline double gini(const std::map<int, std::size_t>& counts, std::size_t total) {
    double sum_sq = 0.0;
    for (const auto& [label, count] : counts) {
        (void)label;
        const double p = static_cast<double>(count) / static_cast<double>(total);
        sum_sq += p * p;
    }
    return 1.0 - sum_sq;
}

struct SplitCandidate {
    std::size_t feature = 0;
    double threshold = 0.0;
    double gain = 0.0;
};

// Every (feature, midpoint) split with strictly positive gain, from a
// direct per-sample scan.
inline std::vector<SplitCandidate> all_splits(const iids::Dataset& data,
                                              std::span<const std::size_t> rows,
                                              std::span<const std::size_t> features,
                                              std::size_t min_child) {
    std::map<int, std::size_t> parent;
    for (std::size_t i : rows) parent[data.labels[i]]++;
    const double parent_impurity = gini(parent, rows.size());

    std::vector<SplitCandidate> out;
    for (std::size_t f : features) {
        std::vector<double> distinct;
        for (std::size_t i : rows) distinct.push_back(data.at(i, f));
        std::sort(distinct.begin(), distinct.end());
        distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
        for (std::size_t v = 0; v + 1 < distinct.size(); ++v) {
            const double threshold = distinct[v] + (distinct[v + 1] - distinct[v]) / 2.0;
            std::map<int, std::size_t> left;
            std::map<int, std::size_t> right;
            std::size_t n_left = 0;
            for (std::size_t i : rows) {
                if (data.at(i, f) <= threshold) {
                    left[data.labels[i]]++;
                    ++n_left;
                } else {
                    right[data.labels[i]]++;
                }
            }
            const std::size_t n_right = rows.size() - n_left;
            if (n_left < min_child || n_right < min_child) continue;
            const double weighted =
                (static_cast<double>(n_left) * gini(left, n_left) +
                 static_cast<double>(n_right) * gini(right, n_right)) /
                static_cast<double>(rows.size());
            const double gain = parent_impurity - weighted;
            if (gain > 0.0) out.push_back({f, threshold, gain});
        }
    }
    return out;
}

// Per-sample recount of every metric the library reports.
struct ScalarMetrics {
    std::vector<double> precision;
    std::vector<double> recall;
    std::vector<double> f1;
    double macro_precision = 0.0;
    double macro_recall = 0.0;
    double macro_f1 = 0.0;
    double accuracy = 0.0;
    double kappa = 0.0;
};

inline ScalarMetrics scalar_metrics(std::span<const int> y_true, std::span<const int> y_pred,
                                    std::size_t m) {
    ScalarMetrics out;
    const auto n = y_true.size();
    std::size_t correct = 0;
    for (std::size_t c = 0; c < m; ++c) {
        std::size_t tp = 0;
        std::size_t fp = 0;
        std::size_t fn = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const bool is_true = y_true[i] == static_cast<int>(c);
            const bool is_pred = y_pred[i] == static_cast<int>(c);
            if (is_true && is_pred) ++tp;
            if (!is_true && is_pred) ++fp;
            if (is_true && !is_pred) ++fn;
        }
        const double precision =
            tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
        const double recall =
            tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
        const double f1 = precision + recall == 0.0
                              ? 0.0
                              : 2.0 * precision * recall / (precision + recall);
        out.precision.push_back(precision);
        out.recall.push_back(recall);
        out.f1.push_back(f1);
        out.macro_precision += precision / static_cast<double>(m);
        out.macro_recall += recall / static_cast<double>(m);
        out.macro_f1 += f1 / static_cast<double>(m);
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (y_true[i] == y_pred[i]) ++correct;
    }
    out.accuracy = static_cast<double>(correct) / static_cast<double>(n);

    double p_e = 0.0;
    for (std::size_t c = 0; c < m; ++c) {
        std::size_t row = 0;
        std::size_t col = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (y_true[i] == static_cast<int>(c)) ++row;
            if (y_pred[i] == static_cast<int>(c)) ++col;
        }
        p_e += (static_cast<double>(row) / static_cast<double>(n)) *
               (static_cast<double>(col) / static_cast<double>(n));
    }
    out.kappa = p_e >= 1.0 ? (out.accuracy == 1.0 ? 1.0 : 0.0)
                           : (out.accuracy - p_e) / (1.0 - p_e);
    return out;
}

}  // namespace oracles
