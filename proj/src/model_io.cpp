#include <fstream>

#include <json.hpp>

#include "iids/error.hpp"
#include "iids/pipeline.hpp"

namespace iids {

namespace {

using nlohmann::json;

constexpr int kModelFormatVersion = 1;
constexpr int kResultsFormatVersion = 1;

json config_to_json(const ForestConfig& config) {
    json j;
    j["num_trees"] = config.num_trees;
    j["max_depth"] = config.max_depth;
    j["min_samples_leaf"] = config.min_samples_leaf;
    switch (config.features_per_split) {
        case FeaturesPerSplit::kSqrt: j["features_per_split"] = "sqrt"; break;
        case FeaturesPerSplit::kAll: j["features_per_split"] = "all"; break;
        case FeaturesPerSplit::kExplicit: j["features_per_split"] = "explicit"; break;
    }
    j["explicit_features"] = config.explicit_features;
    j["bootstrap_mode"] =
        config.bootstrap_mode == BootstrapMode::kBalanced ? "balanced" : "standard";
    j["balanced_per_class"] = config.balanced_per_class;
    j["seed"] = config.seed;
    return j;
}

ForestConfig config_from_json(const json& j) {
    ForestConfig config;
    config.num_trees = j.at("num_trees").get<std::size_t>();
    config.max_depth = j.at("max_depth").get<std::size_t>();
    config.min_samples_leaf = j.at("min_samples_leaf").get<std::size_t>();
    const std::string fps = j.at("features_per_split").get<std::string>();
    if (fps == "sqrt") {
        config.features_per_split = FeaturesPerSplit::kSqrt;
    } else if (fps == "all") {
        config.features_per_split = FeaturesPerSplit::kAll;
    } else if (fps == "explicit") {
        config.features_per_split = FeaturesPerSplit::kExplicit;
    } else {
        throw ModelIoError("unknown features_per_split '" + fps + "'");
    }
    config.explicit_features = j.at("explicit_features").get<std::size_t>();
    const std::string mode = j.at("bootstrap_mode").get<std::string>();
    if (mode == "standard") {
        config.bootstrap_mode = BootstrapMode::kStandard;
    } else if (mode == "balanced") {
        config.bootstrap_mode = BootstrapMode::kBalanced;
    } else {
        throw ModelIoError("unknown bootstrap_mode '" + mode + "'");
    }
    config.balanced_per_class = j.at("balanced_per_class").get<std::size_t>();
    config.seed = j.at("seed").get<std::uint64_t>();
    return config;
}

json tree_to_json(const Tree& tree) {
    json feature = json::array();
    json threshold = json::array();
    json left = json::array();
    json right = json::array();
    json counts = json::array();
    for (const TreeNode& node : tree.nodes) {
        feature.push_back(node.feature_index);
        threshold.push_back(node.threshold);
        left.push_back(node.left);
        right.push_back(node.right);
        counts.push_back(node.class_counts);
    }
    return json{{"feature", std::move(feature)},
                {"threshold", std::move(threshold)},
                {"left", std::move(left)},
                {"right", std::move(right)},
                {"counts", std::move(counts)}};
}

Tree tree_from_json(const json& j, std::size_t num_classes) {
    const auto& feature = j.at("feature");
    const auto& threshold = j.at("threshold");
    const auto& left = j.at("left");
    const auto& right = j.at("right");
    const auto& counts = j.at("counts");
    const std::size_t n = feature.size();
    if (threshold.size() != n || left.size() != n || right.size() != n || counts.size() != n ||
        n == 0) {
        throw ModelIoError("tree arrays are missing or have mismatched lengths");
    }
    Tree tree;
    tree.nodes.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        TreeNode& node = tree.nodes[i];
        node.feature_index = feature[i].get<int>();
        node.threshold = threshold[i].get<double>();
        node.left = left[i].get<std::int32_t>();
        node.right = right[i].get<std::int32_t>();
        node.class_counts = counts[i].get<std::vector<std::uint32_t>>();
        if (node.is_leaf()) {
            if (node.class_counts.size() != num_classes) {
                throw ModelIoError("leaf histogram does not match the class count");
            }
        } else {
            const auto last = static_cast<std::int32_t>(n);
            if (node.left <= 0 || node.left >= last || node.right <= 0 || node.right >= last) {
                throw ModelIoError("internal node references an invalid child");
            }
        }
    }
    return tree;
}

json scaler_to_json(const ScalerParams& scaler) {
    return json{{"means", scaler.means}, {"stddevs", scaler.stddevs}};
}

ScalerParams scaler_from_json(const json& j) {
    ScalerParams scaler;
    scaler.means = j.at("means").get<std::vector<double>>();
    scaler.stddevs = j.at("stddevs").get<std::vector<double>>();
    if (scaler.means.size() != scaler.stddevs.size()) {
        throw ModelIoError("scaler means/stddevs length mismatch");
    }
    return scaler;
}

json load_json_file(const std::string& path, const char* what) {
    std::ifstream in(path);
    if (!in) throw ModelIoError(std::string("cannot open ") + what + " '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ModelIoError(std::string(what) + " '" + path + "' is corrupt: " + e.what());
    }
}

}  // namespace

void save_model(const ForestModel& model, const std::string& path, const ScalerParams* scaler) {
    json j;
    j["format_version"] = kModelFormatVersion;
    j["config"] = config_to_json(model.config);
    j["class_names"] = model.class_names;
    j["feature_names"] = model.feature_names;
    j["importances"] = model.importances;
    json trees = json::array();
    for (const Tree& tree : model.trees) trees.push_back(tree_to_json(tree));
    j["trees"] = std::move(trees);
    if (scaler != nullptr) j["scaler"] = scaler_to_json(*scaler);

    std::ofstream out(path);
    if (!out) throw ModelIoError("cannot write model file '" + path + "'");
    out << j.dump();
    out << "\n";
    if (!out) throw ModelIoError("write to model file '" + path + "' failed");
}

LoadedModel load_model(const std::string& path) {
    const json j = load_json_file(path, "model file");
    try {
        const int version = j.at("format_version").get<int>();
        if (version != kModelFormatVersion) {
            throw ModelIoError("model file '" + path + "' has format version " +
                               std::to_string(version) + "; this build reads version " +
                               std::to_string(kModelFormatVersion));
        }
        LoadedModel loaded;
        loaded.model.config = config_from_json(j.at("config"));
        loaded.model.class_names = j.at("class_names").get<std::vector<std::string>>();
        loaded.model.feature_names = j.at("feature_names").get<std::vector<std::string>>();
        loaded.model.importances = j.at("importances").get<std::vector<double>>();
        for (const auto& tree : j.at("trees")) {
            loaded.model.trees.push_back(tree_from_json(tree, loaded.model.class_names.size()));
        }
        if (loaded.model.trees.empty()) throw ModelIoError("model file has no trees");
        if (j.contains("scaler")) {
            loaded.scaler = scaler_from_json(j.at("scaler"));
            if (loaded.scaler->k() != loaded.model.feature_names.size()) {
                throw ModelIoError("scaler width does not match the model's feature count");
            }
        }
        return loaded;
    } catch (const json::exception& e) {
        throw ModelIoError("model file '" + path + "' is corrupt: " + e.what());
    }
}

namespace {

json framework_to_json(const FrameworkConfig& fc) {
    json j;
    j["name"] = fc.name;
    j["selector"] = to_string(fc.selector);
    j["balancer"] = to_string(fc.balancer);
    j["level"] = to_string(fc.level);
    j["num_bins"] = fc.num_bins;
    j["irm_top_n"] = fc.irm_top_n;
    j["usc_threshold"] = fc.usc_threshold;
    j["split"] = json{{"train_fraction", fc.split.train_fraction},
                      {"seed", fc.split.seed},
                      {"stratified", fc.split.stratified}};
    j["forest"] = config_to_json(fc.forest);
    return j;
}

FrameworkConfig framework_from_json(const json& j) {
    FrameworkConfig fc;
    fc.name = j.at("name").get<std::string>();
    fc.selector = selection_method_from_string(j.at("selector").get<std::string>());
    fc.balancer = balance_method_from_string(j.at("balancer").get<std::string>());
    fc.level = class_level_from_string(j.at("level").get<std::string>());
    fc.num_bins = j.at("num_bins").get<int>();
    fc.irm_top_n = j.at("irm_top_n").get<std::size_t>();
    fc.usc_threshold = j.at("usc_threshold").get<double>();
    const auto& split = j.at("split");
    fc.split.train_fraction = split.at("train_fraction").get<double>();
    fc.split.seed = split.at("seed").get<std::uint64_t>();
    fc.split.stratified = split.at("stratified").get<bool>();
    fc.forest = config_from_json(j.at("forest"));
    return fc;
}

json metrics_to_json(const MetricsReport& metrics) {
    json per_class = json::array();
    for (const auto& pc : metrics.per_class) {
        per_class.push_back(json{{"precision", pc.precision},
                                 {"recall", pc.recall},
                                 {"f1", pc.f1},
                                 {"support", pc.support}});
    }
    return json{{"class_names", metrics.class_names},
                {"per_class", std::move(per_class)},
                {"macro_precision", metrics.macro_precision},
                {"macro_recall", metrics.macro_recall},
                {"macro_f1", metrics.macro_f1},
                {"accuracy", metrics.accuracy},
                {"kappa", metrics.kappa}};
}

MetricsReport metrics_from_json(const json& j) {
    MetricsReport metrics;
    metrics.class_names = j.at("class_names").get<std::vector<std::string>>();
    for (const auto& pc : j.at("per_class")) {
        metrics.per_class.push_back(ClassMetrics{pc.at("precision").get<double>(),
                                                 pc.at("recall").get<double>(),
                                                 pc.at("f1").get<double>(),
                                                 pc.at("support").get<std::size_t>()});
    }
    metrics.macro_precision = j.at("macro_precision").get<double>();
    metrics.macro_recall = j.at("macro_recall").get<double>();
    metrics.macro_f1 = j.at("macro_f1").get<double>();
    metrics.accuracy = j.at("accuracy").get<double>();
    metrics.kappa = j.at("kappa").get<double>();
    return metrics;
}

}  // namespace

void save_results(const std::vector<ExperimentResult>& results, const std::string& path) {
    json entries = json::array();
    for (const auto& r : results) {
        json entry;
        entry["framework"] = framework_to_json(r.framework);
        json selected;
        selected["method"] = to_string(r.selected_features.method);
        selected["indices"] = r.selected_features.indices;
        selected["scores"] = r.selected_features.scores;
        std::vector<std::string> names;
        for (std::size_t i : r.selected_features.indices) {
            names.push_back(i < r.model.feature_names.size() ? r.model.feature_names[i] : "");
        }
        selected["names"] = std::move(names);
        entry["selected"] = std::move(selected);
        entry["metrics"] = metrics_to_json(r.metrics);
        entry["gain"] = nullptr;
        if (r.gain.has_value()) {
            entry["gain"] = json{{"usc_classes", r.gain->usc_classes},
                                 {"per_class_gain", r.gain->per_class_gain},
                                 {"average_gain", r.gain->average_gain}};
        }
        entries.push_back(std::move(entry));
    }
    json j;
    j["format_version"] = kResultsFormatVersion;
    j["results"] = std::move(entries);

    std::ofstream out(path);
    if (!out) throw ModelIoError("cannot write results file '" + path + "'");
    out << j.dump(2) << "\n";
    if (!out) throw ModelIoError("write to results file '" + path + "' failed");
}

std::vector<ExperimentResult> load_results(const std::string& path) {
    const json j = load_json_file(path, "results file");
    try {
        const int version = j.at("format_version").get<int>();
        if (version != kResultsFormatVersion) {
            throw ModelIoError("results file '" + path + "' has format version " +
                               std::to_string(version) + "; this build reads version " +
                               std::to_string(kResultsFormatVersion));
        }
        std::vector<ExperimentResult> results;
        for (const auto& entry : j.at("results")) {
            ExperimentResult r;
            r.framework = framework_from_json(entry.at("framework"));
            const auto& selected = entry.at("selected");
            r.selected_features.method =
                selection_method_from_string(selected.at("method").get<std::string>());
            r.selected_features.indices =
                selected.at("indices").get<std::vector<std::size_t>>();
            r.selected_features.scores = selected.at("scores").get<std::vector<double>>();
            r.metrics = metrics_from_json(entry.at("metrics"));
            if (!entry.at("gain").is_null()) {
                const auto& gain = entry.at("gain");
                GainReport g;
                g.usc_classes = gain.at("usc_classes").get<std::vector<std::size_t>>();
                g.per_class_gain = gain.at("per_class_gain").get<std::vector<double>>();
                g.average_gain = gain.at("average_gain").get<double>();
                r.gain = std::move(g);
            }
            results.push_back(std::move(r));
        }
        return results;
    } catch (const json::exception& e) {
        throw ModelIoError("results file '" + path + "' is corrupt: " + e.what());
    }
}

}  // namespace iids
