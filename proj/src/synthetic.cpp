#include "iids/synthetic.hpp"

#include <cmath>
#include <string>

#include "iids/error.hpp"
#include "iids/rng.hpp"

namespace iids {

namespace {

// Vertices of a regular simplex with pairwise distance sqrt(2), given as
// m points in m-1 dimensions. Column c of the Helmert-style basis yields
// the coordinates of vertex c: row j (1-based) is 1/sqrt(j(j+1)) for the
// first j vertices, -j/sqrt(j(j+1)) for vertex j+1, and 0 after.
std::vector<double> simplex_vertices(std::size_t m) {
    std::vector<double> vertices(m * (m - 1), 0.0);
    for (std::size_t j = 1; j < m; ++j) {
        const auto jd = static_cast<double>(j);
        const double scale = 1.0 / std::sqrt(jd * (jd + 1.0));
        for (std::size_t c = 0; c < j; ++c) vertices[c * (m - 1) + (j - 1)] = scale;
        vertices[j * (m - 1) + (j - 1)] = -jd * scale;
    }
    return vertices;
}

// Random orthogonal matrix from Gram-Schmidt over a seeded Gaussian
// matrix, row-major d x d.
std::vector<double> random_rotation(std::size_t d, Rng& rng) {
    std::vector<double> q(d * d);
    for (double& v : q) v = rng.normal();
    for (std::size_t r = 0; r < d; ++r) {
        double* row = q.data() + r * d;
        for (std::size_t prev = 0; prev < r; ++prev) {
            const double* other = q.data() + prev * d;
            double dot = 0.0;
            for (std::size_t i = 0; i < d; ++i) dot += row[i] * other[i];
            for (std::size_t i = 0; i < d; ++i) row[i] -= dot * other[i];
        }
        double norm = 0.0;
        for (std::size_t i = 0; i < d; ++i) norm += row[i] * row[i];
        norm = std::sqrt(norm);
        if (norm < 1e-12) {
            // Degenerate draw; fall back to a unit vector, re-orthogonalized
            // on the next pass. Practically unreachable for small d.
            for (std::size_t i = 0; i < d; ++i) row[i] = i == r ? 1.0 : 0.0;
            continue;
        }
        for (std::size_t i = 0; i < d; ++i) row[i] /= norm;
    }
    return q;
}

}  // namespace

Dataset generate_synthetic(const SyntheticSpec& spec) {
    const std::size_t m = spec.class_counts.size();
    if (m == 0) throw ConfigError("generate_synthetic: no classes given");
    for (std::size_t c = 0; c < m; ++c) {
        if (spec.class_counts[c] == 0) {
            throw ConfigError("generate_synthetic: class " + std::to_string(c) +
                              " has a zero count");
        }
    }
    if (spec.k_informative + spec.k_noise == 0) {
        throw ConfigError("generate_synthetic: no features requested");
    }
    if (spec.k_informative < m - 1) {
        throw ConfigError("generate_synthetic: k_informative must be at least num_classes - 1");
    }
    if (spec.class_separation < 0.0) {
        throw ConfigError("generate_synthetic: negative class_separation");
    }

    const std::size_t k_inf = spec.k_informative;
    const std::size_t k = k_inf + spec.k_noise;

    // Place centers on a regular simplex embedded in the informative
    // subspace, scaled so pairwise center distance is
    // class_separation * sqrt(k_informative), then rotate so the
    // separation spreads across the informative coordinates.
    std::vector<double> centers(m * k_inf, 0.0);
    if (m > 1) {
        const auto vertices = simplex_vertices(m);
        const double scale = spec.class_separation *
                             std::sqrt(static_cast<double>(k_inf)) / std::sqrt(2.0);
        Rng rotation_rng(derive_seed(spec.seed, m));
        const auto rotation = random_rotation(k_inf, rotation_rng);
        for (std::size_t c = 0; c < m; ++c) {
            for (std::size_t d = 0; d < k_inf; ++d) {
                double coord = 0.0;
                for (std::size_t s = 0; s < m - 1; ++s) {
                    coord += rotation[d * k_inf + s] * vertices[c * (m - 1) + s];
                }
                centers[c * k_inf + d] = scale * coord;
            }
        }
    }

    Dataset out;
    std::size_t total = 0;
    for (std::size_t count : spec.class_counts) total += count;
    out.features.reserve(total * k);
    out.labels.reserve(total);
    for (std::size_t j = 0; j < k_inf; ++j) out.feature_names.push_back("f" + std::to_string(j));
    for (std::size_t j = 0; j < spec.k_noise; ++j) {
        out.feature_names.push_back("noise" + std::to_string(j));
    }
    for (std::size_t c = 0; c < m; ++c) out.class_names.push_back("class" + std::to_string(c));

    for (std::size_t c = 0; c < m; ++c) {
        Rng rng(derive_seed(spec.seed, c));
        for (std::size_t i = 0; i < spec.class_counts[c]; ++i) {
            for (std::size_t d = 0; d < k_inf; ++d) {
                out.features.push_back(centers[c * k_inf + d] + rng.normal());
            }
            for (std::size_t d = 0; d < spec.k_noise; ++d) {
                out.features.push_back(rng.normal());
            }
            out.labels.push_back(static_cast<int>(c));
        }
    }
    return out;
}

}  // namespace iids
