#include "iids/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <type_traits>

#include "iids/error.hpp"
#include "iids/rng.hpp"

namespace iids {

namespace {

// Seed streams hanging off the master (split) seed, so that every stage
// draws independent randomness while the whole run stays a pure function
// of one seed.
constexpr std::uint64_t kStreamForest = 1;
constexpr std::uint64_t kStreamOversample = 2;
constexpr std::uint64_t kStreamSelectionForest = 3;

template <typename F>
decltype(auto) run_stage(const char* name, std::vector<std::pair<std::string, double>>& timings,
                         F&& f) {
    const auto start = std::chrono::steady_clock::now();
    auto record = [&] {
        timings.emplace_back(name, std::chrono::duration<double>(
                                       std::chrono::steady_clock::now() - start)
                                       .count());
    };
    try {
        if constexpr (std::is_void_v<std::invoke_result_t<F>>) {
            f();
            record();
        } else {
            auto result = f();
            record();
            return result;
        }
    } catch (const Error& e) {
        throw StageError(name, e.what());
    }
}

std::string format_double(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    return buf;
}

}  // namespace

int FrameworkConfig::framework_family() const {
    if (selector == SelectionMethod::kAll) {
        return balancer == BalanceMethod::kNone ? 1 : 2;
    }
    return balancer == BalanceMethod::kNone ? 3 : 4;
}

void FrameworkConfig::normalize() {
    if (selector == SelectionMethod::kMrmr || selector == SelectionMethod::kRfe) {
        throw ConfigError(std::string("framework selector ") + to_string(selector) +
                          " is a ranking primitive; use ALL, CFS, or IRM");
    }
    if (balancer == BalanceMethod::kBrfc) {
        forest.bootstrap_mode = BootstrapMode::kBalanced;
    }
    if (name.empty()) {
        const int family = framework_family();
        switch (family) {
            case 1: name = "FW1:Base"; break;
            case 2: name = std::string("FW2:") + to_string(balancer); break;
            case 3: name = std::string("FW3:") + to_string(selector); break;
            default:
                name = std::string("FW4:") + to_string(selector) + "+" + to_string(balancer);
                break;
        }
    }
}

ExperimentResult run_framework(const Dataset& data, const FrameworkConfig& config,
                               const ExperimentResult* baseline,
                               const LabelHierarchy* hierarchy) {
    FrameworkConfig cfg = config;
    cfg.normalize();

    ExperimentResult result;
    result.framework = cfg;
    auto& timings = result.timings;

    const Dataset leveled = run_stage("relabel", timings, [&] {
        if (cfg.level == ClassLevel::kFine34) return data;
        if (hierarchy == nullptr) {
            throw ConfigError(std::string("class level ") + to_string(cfg.level) +
                              " requires a label hierarchy");
        }
        return relabel(data, *hierarchy, cfg.level);
    });

    SplitResult parts = run_stage("split", timings, [&] {
        return split_with_indices(leveled, cfg.split);
    });
    result.trace.train_rows = parts.train_rows;
    result.trace.test_rows = parts.test_rows;

    run_stage("scale", timings, [&] {
        result.trace.scaler = fit_scaler(parts.train);
        parts.train = apply_scaler(parts.train, result.trace.scaler);
        parts.test = apply_scaler(parts.test, result.trace.scaler);
    });

    result.selected_features = run_stage("select", timings, [&]() -> FeatureSubset {
        FeatureSubset subset;
        switch (cfg.selector) {
            case SelectionMethod::kAll:
                subset.method = SelectionMethod::kAll;
                subset.indices.resize(parts.train.k());
                std::iota(subset.indices.begin(), subset.indices.end(), 0);
                break;
            case SelectionMethod::kCfs:
                subset = cfs_select(parts.train, cfg.num_bins);
                break;
            case SelectionMethod::kIrm: {
                ForestConfig selection_forest = cfg.forest;
                selection_forest.bootstrap_mode = BootstrapMode::kStandard;
                selection_forest.seed = derive_seed(cfg.forest.seed, kStreamSelectionForest);
                subset = irm_select(parts.train, cfg.irm_top_n, selection_forest, cfg.num_bins);
                break;
            }
            default:
                throw ConfigError("unsupported selector");
        }
        if (subset.indices.empty()) {
            throw DataError(std::string(to_string(cfg.selector)) +
                            " selected no features; nothing to train on");
        }
        return subset;
    });
    if (cfg.selector != SelectionMethod::kAll) {
        parts.train = select_columns(parts.train, result.selected_features.indices);
        parts.test = select_columns(parts.test, result.selected_features.indices);
    }

    run_stage("balance", timings, [&] {
        if (cfg.balancer == BalanceMethod::kRos) {
            parts.train =
                random_oversample(parts.train, derive_seed(cfg.split.seed, kStreamOversample));
            result.trace.balanced_class_counts = parts.train.class_counts();
        } else if (cfg.balancer == BalanceMethod::kBrfc) {
            // Training data is untouched; each tree balances its own
            // bootstrap. Record the per-tree class histogram.
            auto counts = parts.train.class_counts();
            std::size_t per_class = cfg.forest.balanced_per_class;
            if (per_class == 0) {
                per_class = *std::min_element(counts.begin(), counts.end());
            }
            result.trace.balanced_class_counts.assign(counts.size(), per_class);
        } else {
            result.trace.balanced_class_counts = parts.train.class_counts();
        }
    });

    result.model = run_stage("train", timings, [&] {
        return train_forest(parts.train, cfg.forest);
    });

    const std::vector<int> predictions = run_stage("predict", timings, [&] {
        return predict(result.model, parts.test);
    });

    run_stage("metrics", timings, [&] {
        const auto cm =
            confusion_matrix(parts.test.labels, predictions, parts.test.num_classes());
        result.metrics = compute_metrics(cm, parts.test.class_names);
        if (baseline != nullptr) {
            const auto usc = identify_usc(baseline->metrics, cfg.usc_threshold);
            result.gain = f1_gain(baseline->metrics, result.metrics, usc);
        }
    });
    return result;
}

void emit_report(const std::vector<ExperimentResult>& results, const std::string& out_dir) {
    if (results.empty()) throw DataError("emit_report: no results");
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw DataError("emit_report: cannot create '" + out_dir + "': " + ec.message());

    auto open = [&](const std::string& filename) {
        std::ofstream out(std::filesystem::path(out_dir) / filename);
        if (!out) throw DataError("emit_report: cannot write '" + filename + "'");
        return out;
    };

    {
        auto out = open("summary.tsv");
        out << "# precision/recall/F1 are macro (unweighted) averages over classes\n";
        out << "framework\tlevel\tprecision\trecall\tf1\taccuracy\tkappa\tfeatures\n";
        for (const auto& r : results) {
            out << r.framework.name << "\t" << to_string(r.framework.level) << "\t"
                << format_double(r.metrics.macro_precision, 4) << "\t"
                << format_double(r.metrics.macro_recall, 4) << "\t"
                << format_double(r.metrics.macro_f1, 4) << "\t"
                << format_double(r.metrics.accuracy, 4) << "\t"
                << format_double(r.metrics.kappa, 4) << "\t"
                << r.selected_features.indices.size() << "\n";
        }
    }

    std::vector<ClassLevel> levels;
    for (const auto& r : results) {
        if (std::find(levels.begin(), levels.end(), r.framework.level) == levels.end()) {
            levels.push_back(r.framework.level);
        }
    }
    for (ClassLevel level : levels) {
        std::vector<const ExperimentResult*> at_level;
        for (const auto& r : results) {
            if (r.framework.level == level) at_level.push_back(&r);
        }
        auto out = open(std::string("per_class_f1_") + to_string(level) + ".tsv");
        out << "class";
        for (const auto* r : at_level) out << "\t" << r->framework.name;
        out << "\n";
        const auto& names = at_level.front()->metrics.class_names;
        const std::size_t m = at_level.front()->metrics.per_class.size();
        for (std::size_t c = 0; c < m; ++c) {
            out << (c < names.size() ? names[c] : "class" + std::to_string(c));
            for (const auto* r : at_level) {
                if (r->metrics.per_class.size() != m) {
                    throw DataError("emit_report: results at one level disagree on class count");
                }
                out << "\t" << format_double(r->metrics.per_class[c].f1, 4);
            }
            out << "\n";
        }
    }

    {
        auto out = open("gains.txt");
        out << "Average F1 gain over the FW1 baseline, in percentage points,\n"
               "averaged over the baseline's unsaturated classes (F1 below the\n"
               "saturation threshold under FW1).\n";
        for (const auto& r : results) {
            if (!r.gain.has_value()) continue;
            out << "\n" << r.framework.name << " level=" << to_string(r.framework.level)
                << " usc_classes=" << r.gain->usc_classes.size()
                << " average_gain=" << format_double(r.gain->average_gain, 4) << "\n";
            const auto& names = r.metrics.class_names;
            for (std::size_t i = 0; i < r.gain->usc_classes.size(); ++i) {
                const std::size_t c = r.gain->usc_classes[i];
                out << "  " << (c < names.size() ? names[c] : "class" + std::to_string(c))
                    << "\t" << format_double(r.gain->per_class_gain[i], 4) << "\n";
            }
        }
    }

    {
        auto out = open("report.kv");
        out << "averaging macro\n";
        out << "results " << results.size() << "\n";
        for (std::size_t i = 0; i < results.size(); ++i) {
            const auto& r = results[i];
            const std::string p = "result." + std::to_string(i) + ".";
            out << p << "framework " << r.framework.name << "\n";
            out << p << "level " << to_string(r.framework.level) << "\n";
            out << p << "selector " << to_string(r.framework.selector) << "\n";
            out << p << "balancer " << to_string(r.framework.balancer) << "\n";
            out << p << "features " << r.selected_features.indices.size() << "\n";
            out << p << "precision " << format_double(r.metrics.macro_precision, 6) << "\n";
            out << p << "recall " << format_double(r.metrics.macro_recall, 6) << "\n";
            out << p << "f1 " << format_double(r.metrics.macro_f1, 6) << "\n";
            out << p << "accuracy " << format_double(r.metrics.accuracy, 6) << "\n";
            out << p << "kappa " << format_double(r.metrics.kappa, 6) << "\n";
            if (r.gain.has_value()) {
                out << p << "usc_classes " << r.gain->usc_classes.size() << "\n";
                out << p << "average_gain " << format_double(r.gain->average_gain, 6) << "\n";
            }
        }
    }
}

std::vector<FrameworkConfig> ExperimentSpec::materialize(ClassLevel level) const {
    std::vector<FrameworkConfig> configs;
    for (const auto& [selector, balancer] : frameworks) {
        FrameworkConfig fc;
        fc.selector = selector;
        fc.balancer = balancer;
        fc.level = level;
        fc.split.train_fraction = train_fraction;
        fc.split.seed = seed;
        fc.split.stratified = stratified;
        fc.num_bins = num_bins;
        fc.irm_top_n = irm_top_n;
        fc.usc_threshold = usc_threshold;
        fc.forest.num_trees = num_trees;
        fc.forest.max_depth = max_depth;
        fc.forest.min_samples_leaf = min_samples_leaf;
        fc.forest.features_per_split = features_per_split;
        fc.forest.explicit_features = explicit_features;
        fc.forest.balanced_per_class = brfc_per_class;
        fc.forest.seed = derive_seed(seed, kStreamForest);
        fc.normalize();
        configs.push_back(std::move(fc));
    }
    return configs;
}

namespace {

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const std::uint64_t v = std::stoull(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("experiment spec: key '" + key + "' has non-integer value '" + value +
                          "'");
    }
}

double parse_real(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("experiment spec: key '" + key + "' has non-numeric value '" + value +
                          "'");
    }
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw ConfigError("experiment spec: key '" + key + "' expects true|false, got '" + value +
                      "'");
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> items;
    std::string item;
    std::istringstream stream(value);
    while (std::getline(stream, item, ',')) {
        if (!item.empty()) items.push_back(item);
    }
    return items;
}

}  // namespace

ExperimentSpec parse_experiment_spec(std::istream& in) {
    ExperimentSpec spec;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream fields(line);
        std::string key;
        if (!(fields >> key)) continue;
        std::string value;
        std::getline(fields, value);
        const auto start = value.find_first_not_of(" \t");
        value = start == std::string::npos ? "" : value.substr(start);
        const auto end = value.find_last_not_of(" \t");
        if (end != std::string::npos) value.erase(end + 1);
        if (value.empty()) {
            throw ConfigError("experiment spec line " + std::to_string(line_no) + ": key '" +
                              key + "' has no value");
        }

        if (key == "data") {
            spec.data_path = value;
        } else if (key == "hierarchy") {
            spec.hierarchy_path = value;
        } else if (key == "label_column") {
            spec.label_column = value;
        } else if (key == "levels") {
            spec.levels.clear();
            for (const auto& item : split_list(value)) {
                spec.levels.push_back(class_level_from_string(item));
            }
            if (spec.levels.empty()) throw ConfigError("experiment spec: empty levels list");
        } else if (key == "seed") {
            spec.seed = parse_u64(key, value);
        } else if (key == "train_fraction") {
            spec.train_fraction = parse_real(key, value);
        } else if (key == "stratified") {
            spec.stratified = parse_bool(key, value);
        } else if (key == "num_bins") {
            spec.num_bins = static_cast<int>(parse_u64(key, value));
        } else if (key == "num_trees") {
            spec.num_trees = parse_u64(key, value);
        } else if (key == "max_depth") {
            spec.max_depth = parse_u64(key, value);
        } else if (key == "min_samples_leaf") {
            spec.min_samples_leaf = parse_u64(key, value);
        } else if (key == "features_per_split") {
            if (value == "sqrt") {
                spec.features_per_split = FeaturesPerSplit::kSqrt;
            } else if (value == "all") {
                spec.features_per_split = FeaturesPerSplit::kAll;
            } else {
                spec.features_per_split = FeaturesPerSplit::kExplicit;
                spec.explicit_features = parse_u64(key, value);
            }
        } else if (key == "brfc_per_class") {
            spec.brfc_per_class = parse_u64(key, value);
        } else if (key == "irm_top_n") {
            spec.irm_top_n = parse_u64(key, value);
        } else if (key == "usc_threshold") {
            spec.usc_threshold = parse_real(key, value);
        } else if (key == "frameworks") {
            spec.frameworks.clear();
            for (const auto& item : split_list(value)) {
                const auto plus = item.find('+');
                const std::string selector =
                    plus == std::string::npos ? item : item.substr(0, plus);
                SelectionMethod method = selection_method_from_string(selector);
                BalanceMethod balancer = BalanceMethod::kNone;
                if (plus != std::string::npos) {
                    balancer = balance_method_from_string(item.substr(plus + 1));
                }
                spec.frameworks.emplace_back(method, balancer);
            }
            if (spec.frameworks.empty()) {
                throw ConfigError("experiment spec: empty frameworks list");
            }
        } else {
            throw ConfigError("experiment spec line " + std::to_string(line_no) +
                              ": unknown key '" + key + "'");
        }
    }
    return spec;
}

ExperimentSpec load_experiment_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open experiment spec '" + path + "'");
    return parse_experiment_spec(in);
}

std::vector<ExperimentResult> run_experiment(const Dataset& data,
                                             const LabelHierarchy* hierarchy,
                                             const ExperimentSpec& spec) {
    if (spec.frameworks.empty()) {
        throw ConfigError("experiment spec lists no frameworks");
    }
    for (ClassLevel level : spec.levels) {
        if (level != ClassLevel::kFine34 && hierarchy == nullptr) {
            throw ConfigError(std::string("class level ") + to_string(level) +
                              " requires a hierarchy file");
        }
    }

    std::vector<ExperimentResult> results;
    for (ClassLevel level : spec.levels) {
        auto configs = spec.materialize(level);
        std::size_t baseline_at = configs.size();
        for (std::size_t i = 0; i < configs.size(); ++i) {
            if (configs[i].framework_family() == 1) {
                baseline_at = i;
                break;
            }
        }
        if (baseline_at == configs.size()) {
            ExperimentSpec base_spec = spec;
            base_spec.frameworks = {{SelectionMethod::kAll, BalanceMethod::kNone}};
            configs.insert(configs.begin(), base_spec.materialize(level).front());
            baseline_at = 0;
        }

        // The baseline runs first so every other framework at this level
        // can measure gains against it; results still come out in config
        // order.
        ExperimentResult baseline = run_framework(data, configs[baseline_at], nullptr, hierarchy);
        std::vector<ExperimentResult> at_level(configs.size());
        for (std::size_t i = 0; i < configs.size(); ++i) {
            if (i == baseline_at) continue;
            at_level[i] = run_framework(data, configs[i], &baseline, hierarchy);
        }
        at_level[baseline_at] = std::move(baseline);
        for (auto& r : at_level) results.push_back(std::move(r));
    }
    return results;
}

}  // namespace iids
