#include "iids/feature_selection.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include "iids/error.hpp"
#include "iids/rng.hpp"

namespace iids {

const char* to_string(SelectionMethod method) {
    switch (method) {
        case SelectionMethod::kAll: return "ALL";
        case SelectionMethod::kCfs: return "CFS";
        case SelectionMethod::kMrmr: return "MRMR";
        case SelectionMethod::kRfe: return "RFE";
        case SelectionMethod::kIrm: return "IRM";
    }
    return "?";
}

SelectionMethod selection_method_from_string(const std::string& s) {
    if (s == "ALL" || s == "all" || s == "Base" || s == "base") return SelectionMethod::kAll;
    if (s == "CFS" || s == "cfs") return SelectionMethod::kCfs;
    if (s == "MRMR" || s == "mrmr") return SelectionMethod::kMrmr;
    if (s == "RFE" || s == "rfe") return SelectionMethod::kRfe;
    if (s == "IRM" || s == "irm") return SelectionMethod::kIrm;
    throw ConfigError("unknown selection method '" + s + "' (expected ALL|CFS|MRMR|RFE|IRM)");
}

std::vector<int> discretize(std::span<const double> column, int num_bins) {
    if (num_bins < 1) throw ConfigError("discretize: num_bins must be at least 1");
    const std::size_t n = column.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return column[a] < column[b]; });
    std::vector<int> bins(n);
    std::size_t group_start = 0;
    for (std::size_t pos = 0; pos < n; ++pos) {
        if (pos > 0 && column[order[pos]] != column[order[pos - 1]]) group_start = pos;
        bins[order[pos]] =
            static_cast<int>(group_start * static_cast<std::size_t>(num_bins) / n);
    }
    return bins;
}

namespace {

// Frequency table over small non-negative symbols.
std::vector<std::size_t> symbol_counts(std::span<const int> x) {
    int max_symbol = 0;
    for (int v : x) {
        if (v < 0) throw DataError("entropy: negative symbol");
        max_symbol = std::max(max_symbol, v);
    }
    std::vector<std::size_t> counts(static_cast<std::size_t>(max_symbol) + 1, 0);
    for (int v : x) counts[static_cast<std::size_t>(v)]++;
    return counts;
}

}  // namespace

double entropy_bits(std::span<const int> x) {
    if (x.empty()) return 0.0;
    const auto counts = symbol_counts(x);
    const auto n = static_cast<double>(x.size());
    double h = 0.0;
    for (std::size_t c : counts) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / n;
        h -= p * std::log2(p);
    }
    return h;
}

double mutual_information_bits(std::span<const int> x, std::span<const int> y) {
    if (x.size() != y.size()) {
        throw DataError("mutual_information: sequences have different lengths");
    }
    if (x.empty()) return 0.0;
    const auto cx = symbol_counts(x);
    const auto cy = symbol_counts(y);
    std::vector<std::size_t> joint(cx.size() * cy.size(), 0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        joint[static_cast<std::size_t>(x[i]) * cy.size() + static_cast<std::size_t>(y[i])]++;
    }
    const auto n = static_cast<double>(x.size());
    double mi = 0.0;
    for (std::size_t a = 0; a < cx.size(); ++a) {
        for (std::size_t b = 0; b < cy.size(); ++b) {
            const std::size_t c = joint[a * cy.size() + b];
            if (c == 0) continue;
            const double p_ab = static_cast<double>(c) / n;
            const double p_a = static_cast<double>(cx[a]) / n;
            const double p_b = static_cast<double>(cy[b]) / n;
            mi += p_ab * std::log2(p_ab / (p_a * p_b));
        }
    }
    return std::max(mi, 0.0);
}

double symmetrical_uncertainty(std::span<const int> x, std::span<const int> y) {
    if (x.size() != y.size()) {
        throw DataError("symmetrical_uncertainty: sequences have different lengths");
    }
    const double hx = entropy_bits(x);
    const double hy = entropy_bits(y);
    if (hx + hy == 0.0) return 0.0;
    return std::clamp(2.0 * mutual_information_bits(x, y) / (hx + hy), 0.0, 1.0);
}

AssociationMatrix build_association_matrix(const Dataset& data, int num_bins) {
    if (data.n() < 2) throw DataError("build_association_matrix: need at least 2 rows");
    const std::size_t k = data.k();
    std::vector<std::vector<int>> bins(k);
    for (std::size_t j = 0; j < k; ++j) bins[j] = discretize(data.column(j), num_bins);

    AssociationMatrix assoc;
    assoc.k = k;
    assoc.feature_class.resize(k);
    assoc.feature_feature.assign(k * k, 0.0);
    for (std::size_t j = 0; j < k; ++j) {
        assoc.feature_class[j] = symmetrical_uncertainty(bins[j], data.labels);
    }
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i; j < k; ++j) {
            const double su = symmetrical_uncertainty(bins[i], bins[j]);
            assoc.feature_feature[i * k + j] = su;
            assoc.feature_feature[j * k + i] = su;
        }
    }
    return assoc;
}

double cfs_merit(std::span<const std::size_t> subset, const AssociationMatrix& assoc) {
    if (subset.empty()) throw ConfigError("cfs_merit: empty subset");
    const auto s = static_cast<double>(subset.size());
    double sum_cf = 0.0;
    for (std::size_t j : subset) sum_cf += assoc.feature_class[j];
    double sum_ff = 0.0;
    for (std::size_t a = 0; a < subset.size(); ++a) {
        for (std::size_t b = a + 1; b < subset.size(); ++b) {
            sum_ff += assoc.ff(subset[a], subset[b]);
        }
    }
    const double mean_cf = sum_cf / s;
    const double pairs = s * (s - 1.0) / 2.0;
    const double mean_ff = pairs == 0.0 ? 0.0 : sum_ff / pairs;
    return s * mean_cf / std::sqrt(s + s * (s - 1.0) * mean_ff);
}

namespace {

struct OpenNode {
    double merit = 0.0;
    std::vector<std::size_t> indices;
};

struct OpenBetter {
    bool operator()(const OpenNode& a, const OpenNode& b) const {
        if (a.merit != b.merit) return a.merit > b.merit;
        if (a.indices.size() != b.indices.size()) return a.indices.size() < b.indices.size();
        return a.indices < b.indices;
    }
};

}  // namespace

FeatureSubset cfs_select(const Dataset& train, int num_bins, int patience) {
    if (train.k() == 0) throw DataError("cfs_select: dataset has no features");
    const AssociationMatrix assoc = build_association_matrix(train, num_bins);
    const std::size_t k = assoc.k;

    std::set<OpenNode, OpenBetter> open;
    std::set<std::vector<std::size_t>> visited;
    open.insert(OpenNode{});
    visited.insert({});

    std::vector<std::size_t> best;
    double best_merit = -std::numeric_limits<double>::infinity();
    int stale = 0;
    while (!open.empty() && stale < patience) {
        const OpenNode node = *open.begin();
        open.erase(open.begin());
        bool improved = false;
        for (std::size_t f = 0; f < k; ++f) {
            if (std::binary_search(node.indices.begin(), node.indices.end(), f)) continue;
            std::vector<std::size_t> child = node.indices;
            child.insert(std::upper_bound(child.begin(), child.end(), f), f);
            if (!visited.insert(child).second) continue;
            const double merit = cfs_merit(child, assoc);
            if (merit > best_merit) {
                best_merit = merit;
                best = child;
                improved = true;
            } else if (merit == best_merit &&
                       (child.size() < best.size() ||
                        (child.size() == best.size() && child < best))) {
                best = child;
            }
            open.insert(OpenNode{merit, std::move(child)});
        }
        stale = improved ? 0 : stale + 1;
    }

    FeatureSubset out;
    out.method = SelectionMethod::kCfs;
    out.indices = std::move(best);
    for (std::size_t j : out.indices) out.scores.push_back(assoc.feature_class[j]);
    return out;
}

FeatureSubset mrmr_rank(const Dataset& train, std::size_t top_k, int num_bins) {
    const std::size_t k = train.k();
    if (top_k == 0 || top_k > k) {
        throw ConfigError("mrmr_rank: top_k must be in [1, " + std::to_string(k) + "]");
    }
    std::vector<std::vector<int>> bins(k);
    for (std::size_t j = 0; j < k; ++j) bins[j] = discretize(train.column(j), num_bins);

    std::vector<double> relevance(k);
    for (std::size_t j = 0; j < k; ++j) {
        relevance[j] = mutual_information_bits(bins[j], train.labels);
    }

    FeatureSubset out;
    out.method = SelectionMethod::kMrmr;
    std::vector<bool> taken(k, false);
    std::vector<double> redundancy_sum(k, 0.0);
    for (std::size_t pick = 0; pick < top_k; ++pick) {
        std::size_t best_j = k;
        double best_score = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < k; ++j) {
            if (taken[j]) continue;
            const double score =
                pick == 0 ? relevance[j]
                          : relevance[j] - redundancy_sum[j] / static_cast<double>(pick);
            if (score > best_score) {
                best_score = score;
                best_j = j;
            }
        }
        taken[best_j] = true;
        out.indices.push_back(best_j);
        out.scores.push_back(best_score);
        if (pick + 1 < top_k) {
            for (std::size_t j = 0; j < k; ++j) {
                if (!taken[j]) redundancy_sum[j] += mutual_information_bits(bins[j], bins[best_j]);
            }
        }
    }
    return out;
}

FeatureSubset rfe_rank(const Dataset& train, std::size_t top_k, const ForestConfig& config) {
    const std::size_t k = train.k();
    if (top_k == 0 || top_k > k) {
        throw ConfigError("rfe_rank: top_k must be in [1, " + std::to_string(k) + "]");
    }
    std::vector<std::size_t> surviving(k);
    std::iota(surviving.begin(), surviving.end(), 0);
    std::vector<double> importance;
    for (std::size_t round = 0;; ++round) {
        ForestConfig round_config = config;
        round_config.seed = derive_seed(config.seed, round);
        const ForestModel model = train_forest(select_columns(train, surviving), round_config);
        importance = model.importances;
        if (surviving.size() == top_k) break;
        std::size_t worst = 0;
        for (std::size_t j = 1; j < surviving.size(); ++j) {
            if (importance[j] < importance[worst] ||
                (importance[j] == importance[worst] && surviving[j] > surviving[worst])) {
                worst = j;
            }
        }
        surviving.erase(surviving.begin() + static_cast<std::ptrdiff_t>(worst));
    }

    std::vector<std::size_t> order(surviving.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (importance[a] != importance[b]) return importance[a] > importance[b];
        return surviving[a] < surviving[b];
    });
    FeatureSubset out;
    out.method = SelectionMethod::kRfe;
    for (std::size_t pos : order) {
        out.indices.push_back(surviving[pos]);
        out.scores.push_back(importance[pos]);
    }
    return out;
}

FeatureSubset irm_select(const Dataset& train, std::size_t top_n, const ForestConfig& config,
                         int num_bins) {
    const FeatureSubset rfe = rfe_rank(train, top_n, config);
    const FeatureSubset mrmr = mrmr_rank(train, top_n, num_bins);
    std::set<std::size_t> in_mrmr(mrmr.indices.begin(), mrmr.indices.end());
    FeatureSubset out;
    out.method = SelectionMethod::kIrm;
    for (std::size_t j : rfe.indices) {
        if (in_mrmr.count(j)) out.indices.push_back(j);
    }
    std::sort(out.indices.begin(), out.indices.end());
    return out;
}

void save_subset(const FeatureSubset& subset, const std::vector<std::string>& feature_names,
                 const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("save_subset: cannot write '" + path + "'");
    out << "method " << to_string(subset.method) << "\n";
    for (std::size_t i = 0; i < subset.indices.size(); ++i) {
        const std::size_t j = subset.indices[i];
        if (j >= feature_names.size()) throw DataError("save_subset: index out of range");
        out << feature_names[j];
        if (!subset.scores.empty()) {
            char buf[48];
            std::snprintf(buf, sizeof(buf), "\t%.17g", subset.scores[i]);
            out << buf;
        }
        out << "\n";
    }
}

FeatureSubset load_subset(const std::string& path,
                          const std::vector<std::string>& feature_names) {
    std::ifstream in(path);
    if (!in) throw DataError("load_subset: cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw DataError("load_subset: '" + path + "' is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream header(line);
    std::string word;
    std::string tag;
    if (!(header >> word >> tag) || word != "method") {
        throw DataError("load_subset: '" + path + "' does not start with a method line");
    }
    FeatureSubset out;
    out.method = selection_method_from_string(tag);
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::string name = line;
        const auto tab = line.find('\t');
        if (tab != std::string::npos) {
            name = line.substr(0, tab);
            out.scores.push_back(std::stod(line.substr(tab + 1)));
        }
        const auto it = std::find(feature_names.begin(), feature_names.end(), name);
        if (it == feature_names.end()) {
            throw DataError("load_subset: unknown feature '" + name + "'");
        }
        out.indices.push_back(static_cast<std::size_t>(it - feature_names.begin()));
    }
    if (!out.scores.empty() && out.scores.size() != out.indices.size()) {
        throw DataError("load_subset: '" + path + "' mixes scored and unscored lines");
    }
    return out;
}

}  // namespace iids
