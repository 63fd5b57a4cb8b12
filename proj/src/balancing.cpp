#include "iids/balancing.hpp"

#include "iids/error.hpp"
#include "iids/rng.hpp"

namespace iids {

const char* to_string(BalanceMethod method) {
    switch (method) {
        case BalanceMethod::kNone: return "NONE";
        case BalanceMethod::kRos: return "ROS";
        case BalanceMethod::kBrfc: return "BRFC";
    }
    return "?";
}

BalanceMethod balance_method_from_string(const std::string& s) {
    if (s == "NONE" || s == "none") return BalanceMethod::kNone;
    if (s == "ROS" || s == "ros") return BalanceMethod::kRos;
    if (s == "BRFC" || s == "brfc") return BalanceMethod::kBrfc;
    throw ConfigError("unknown balancing method '" + s + "' (expected NONE|ROS|BRFC)");
}

namespace {

std::vector<std::vector<std::size_t>> rows_by_class(const Dataset& train, const char* op) {
    std::vector<std::vector<std::size_t>> by_class(train.num_classes());
    for (std::size_t i = 0; i < train.n(); ++i) {
        by_class[static_cast<std::size_t>(train.labels[i])].push_back(i);
    }
    for (std::size_t c = 0; c < by_class.size(); ++c) {
        if (by_class[c].empty()) {
            throw DataError(std::string(op) + ": class '" + train.class_names[c] +
                            "' has zero samples");
        }
    }
    return by_class;
}

}  // namespace

Dataset random_oversample(const Dataset& train, std::uint64_t seed) {
    auto by_class = rows_by_class(train, "random_oversample");
    std::size_t majority = 0;
    for (const auto& rows : by_class) majority = std::max(majority, rows.size());

    Dataset out = train;
    for (std::size_t c = 0; c < by_class.size(); ++c) {
        const auto& rows = by_class[c];
        Rng rng(derive_seed(seed, c));
        for (std::size_t added = rows.size(); added < majority; ++added) {
            const std::size_t src = rows[rng.below(rows.size())];
            auto r = train.row(src);
            out.features.insert(out.features.end(), r.begin(), r.end());
            out.labels.push_back(static_cast<int>(c));
        }
    }
    return out;
}

std::vector<std::size_t> balanced_bootstrap(const Dataset& train, std::size_t per_class_count,
                                            std::uint64_t seed) {
    if (per_class_count == 0) {
        throw ConfigError("balanced_bootstrap: per_class_count must be at least 1");
    }
    auto by_class = rows_by_class(train, "balanced_bootstrap");
    std::vector<std::size_t> indices;
    indices.reserve(per_class_count * by_class.size());
    for (std::size_t c = 0; c < by_class.size(); ++c) {
        const auto& rows = by_class[c];
        Rng rng(derive_seed(seed, c));
        for (std::size_t d = 0; d < per_class_count; ++d) {
            indices.push_back(rows[rng.below(rows.size())]);
        }
    }
    return indices;
}

}  // namespace iids
