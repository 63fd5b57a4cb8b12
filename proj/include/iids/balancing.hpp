#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "iids/dataset.hpp"

namespace iids {

enum class BalanceMethod { kNone, kRos, kBrfc };

const char* to_string(BalanceMethod method);
BalanceMethod balance_method_from_string(const std::string& s);

// How a training set is rebalanced before (or while) fitting a forest.
// per_class_count is the per-class bootstrap size N_L for kBrfc; zero
// means "use the minority-class training count".
struct BalanceSpec {
    BalanceMethod method = BalanceMethod::kNone;
    std::uint64_t seed = 0;
    std::size_t per_class_count = 0;
};

// Duplicates minority-class rows uniformly at random (with replacement)
// until every class count equals the majority-class count. Original rows
// are retained in their input order; duplicates are appended grouped by
// class in class-index order. Throws DataError if a class has no rows.
Dataset random_oversample(const Dataset& train, std::uint64_t seed);

// Draws per_class_count row indices uniformly with replacement from each
// class and returns them as one list, grouped by class in class-index
// order. Throws DataError if a class has no rows, ConfigError if
// per_class_count is zero.
std::vector<std::size_t> balanced_bootstrap(const Dataset& train,
                                            std::size_t per_class_count,
                                            std::uint64_t seed);

}  // namespace iids
