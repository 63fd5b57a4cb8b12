#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace iids {

// Row-major m x m count matrix; rows are true classes, columns predicted.
struct ConfusionMatrix {
    std::size_t m = 0;
    std::vector<std::size_t> counts;

    explicit ConfusionMatrix(std::size_t num_classes = 0)
        : m(num_classes), counts(num_classes * num_classes, 0) {}

    std::size_t& at(std::size_t t, std::size_t p) { return counts[t * m + p]; }
    std::size_t at(std::size_t t, std::size_t p) const { return counts[t * m + p]; }
    std::size_t total() const;
};

ConfusionMatrix confusion_matrix(std::span<const int> y_true, std::span<const int> y_pred,
                                 std::size_t num_classes);

struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t support = 0;
};

struct MetricsReport {
    std::vector<ClassMetrics> per_class;
    std::vector<std::string> class_names;
    double macro_precision = 0.0;
    double macro_recall = 0.0;
    double macro_f1 = 0.0;
    double accuracy = 0.0;
    double kappa = 0.0;
};

// Per-class precision/recall/F1 with the zero-denominator convention
// (0 when undefined), unweighted macro averages, accuracy, and Cohen
// kappa. When expected agreement is exactly 1, kappa is 1 for a perfect
// matrix and 0 otherwise. Throws DataError on an empty matrix.
MetricsReport compute_metrics(const ConfusionMatrix& cm,
                              std::vector<std::string> class_names = {});

// Classes whose baseline F1 is strictly below the threshold.
std::vector<std::size_t> identify_usc(const MetricsReport& baseline, double threshold = 0.99);

struct GainReport {
    std::vector<std::size_t> usc_classes;
    // Aligned with usc_classes, in F1 percentage points.
    std::vector<double> per_class_gain;
    double average_gain = 0.0;
};

// Gains of candidate over baseline in F1 percentage points, restricted to
// the given unsaturated classes; average_gain is their unweighted mean
// (0 when usc is empty). Throws DataError when the reports' class counts
// differ.
GainReport f1_gain(const MetricsReport& baseline, const MetricsReport& candidate,
                   std::span<const std::size_t> usc);

}  // namespace iids
