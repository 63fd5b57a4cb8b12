#pragma once

#include <cstdint>
#include <vector>

#include "iids/dataset.hpp"

namespace iids {

// Recipe for a Gaussian-cluster classification dataset. Class centers sit
// at the vertices of a regular simplex inside the informative subspace,
// rotated by a seeded orthogonal matrix, with pairwise center distance
// class_separation * sqrt(k_informative); every feature then gets
// unit-variance Gaussian noise, and k_noise extra features carry pure
// standard-normal noise. Rows come out grouped by class in class order.
struct SyntheticSpec {
    std::vector<std::size_t> class_counts;
    std::size_t k_informative = 4;
    std::size_t k_noise = 0;
    double class_separation = 3.0;
    std::uint64_t seed = 0;
};

// Deterministic per spec (independent RNG streams per class). Throws
// ConfigError when a class count is zero, no classes are given, or
// k_informative < num_classes - 1 (the simplex would not fit).
Dataset generate_synthetic(const SyntheticSpec& spec);

}  // namespace iids
