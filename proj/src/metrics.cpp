#include "iids/metrics.hpp"

#include <numeric>

#include "iids/error.hpp"

namespace iids {

std::size_t ConfusionMatrix::total() const {
    return std::accumulate(counts.begin(), counts.end(), std::size_t{0});
}

ConfusionMatrix confusion_matrix(std::span<const int> y_true, std::span<const int> y_pred,
                                 std::size_t num_classes) {
    if (y_true.size() != y_pred.size()) {
        throw DataError("confusion_matrix: label vectors have different lengths");
    }
    ConfusionMatrix cm(num_classes);
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        const int t = y_true[i];
        const int p = y_pred[i];
        if (t < 0 || p < 0 || static_cast<std::size_t>(t) >= num_classes ||
            static_cast<std::size_t>(p) >= num_classes) {
            throw DataError("confusion_matrix: label out of range at row " + std::to_string(i));
        }
        cm.at(static_cast<std::size_t>(t), static_cast<std::size_t>(p))++;
    }
    return cm;
}

MetricsReport compute_metrics(const ConfusionMatrix& cm, std::vector<std::string> class_names) {
    const std::size_t m = cm.m;
    const std::size_t total = cm.total();
    if (m == 0 || total == 0) throw DataError("compute_metrics: empty confusion matrix");

    MetricsReport report;
    report.class_names = std::move(class_names);
    report.per_class.resize(m);

    std::size_t diagonal = 0;
    // Sum of row_c * col_c as an integer so the expected-agreement == 1
    // test below is exact.
    unsigned long long chance_num = 0;
    for (std::size_t c = 0; c < m; ++c) {
        std::size_t row_sum = 0;
        std::size_t col_sum = 0;
        for (std::size_t j = 0; j < m; ++j) {
            row_sum += cm.at(c, j);
            col_sum += cm.at(j, c);
        }
        const std::size_t tp = cm.at(c, c);
        diagonal += tp;
        chance_num += static_cast<unsigned long long>(row_sum) * col_sum;

        ClassMetrics& pc = report.per_class[c];
        pc.support = row_sum;
        pc.precision = col_sum == 0 ? 0.0
                                    : static_cast<double>(tp) / static_cast<double>(col_sum);
        pc.recall = row_sum == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(row_sum);
        pc.f1 = pc.precision + pc.recall == 0.0
                    ? 0.0
                    : 2.0 * pc.precision * pc.recall / (pc.precision + pc.recall);
        report.macro_precision += pc.precision;
        report.macro_recall += pc.recall;
        report.macro_f1 += pc.f1;
    }
    report.macro_precision /= static_cast<double>(m);
    report.macro_recall /= static_cast<double>(m);
    report.macro_f1 /= static_cast<double>(m);
    report.accuracy = static_cast<double>(diagonal) / static_cast<double>(total);

    const auto total_sq = static_cast<unsigned long long>(total) * total;
    if (chance_num == total_sq) {
        report.kappa = diagonal == total ? 1.0 : 0.0;
    } else {
        const double p_e = static_cast<double>(chance_num) / static_cast<double>(total_sq);
        report.kappa = (report.accuracy - p_e) / (1.0 - p_e);
    }
    return report;
}

std::vector<std::size_t> identify_usc(const MetricsReport& baseline, double threshold) {
    std::vector<std::size_t> usc;
    for (std::size_t c = 0; c < baseline.per_class.size(); ++c) {
        if (baseline.per_class[c].f1 < threshold) usc.push_back(c);
    }
    return usc;
}

GainReport f1_gain(const MetricsReport& baseline, const MetricsReport& candidate,
                   std::span<const std::size_t> usc) {
    if (baseline.per_class.size() != candidate.per_class.size()) {
        throw DataError("f1_gain: reports cover different class sets");
    }
    GainReport gain;
    gain.usc_classes.assign(usc.begin(), usc.end());
    for (std::size_t c : usc) {
        if (c >= baseline.per_class.size()) {
            throw DataError("f1_gain: unsaturated class index out of range");
        }
        gain.per_class_gain.push_back(
            (candidate.per_class[c].f1 - baseline.per_class[c].f1) * 100.0);
    }
    if (!gain.per_class_gain.empty()) {
        gain.average_gain =
            std::accumulate(gain.per_class_gain.begin(), gain.per_class_gain.end(), 0.0) /
            static_cast<double>(gain.per_class_gain.size());
    }
    return gain;
}

}  // namespace iids
