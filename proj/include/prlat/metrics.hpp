#pragma once

#include <span>
#include <vector>

#include "prlat/features.hpp"

namespace prlat {

// Rank (Mann-Whitney) AUC-ROC with tie mid-ranks. y is 0/1; raises
// Degenerate when only one class is present.
double auc_roc(std::span<const int> y_true, std::span<const double> scores);

// Average precision: interpolation-free sum of precision times recall
// increments over descending distinct thresholds.
double auc_pr(std::span<const int> y_true, std::span<const double> scores);

struct MetricResult {
    double auc_roc = 0.0;
    double auc_pr = 0.0;
    double baseline_roc = 0.5;
    double baseline_pr = 0.0;  // macro class prevalence
    double improvement_roc = 0.0;  // (value - baseline) / baseline
    double improvement_pr = 0.0;
    std::vector<LatencyClass> skipped_classes;  // absent from y_true
};

// One-vs-Rest macro averaging over the classes present in y_true.
// score_matrix is row-major n x kNumClasses.
MetricResult ovr_macro(std::span<const LatencyClass> y_true,
                       std::span<const double> score_matrix);

}  // namespace prlat
