#include "prlat/metrics.hpp"

#include <algorithm>
#include <numeric>

#include "prlat/error.hpp"

namespace prlat {

double auc_roc(std::span<const int> y_true, std::span<const double> scores) {
    if (y_true.size() != scores.size()) raise(ErrorCode::Domain, "length mismatch");
    const std::size_t n = y_true.size();
    std::size_t n_pos = 0;
    for (int y : y_true) n_pos += (y != 0);
    const std::size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0) {
        raise(ErrorCode::Degenerate, "auc_roc needs both classes");
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    double rank_sum_pos = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
        const double mid_rank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
        for (std::size_t k = i; k <= j; ++k) {
            if (y_true[order[k]] != 0) rank_sum_pos += mid_rank;
        }
        i = j + 1;
    }
    const double u = rank_sum_pos -
                     static_cast<double>(n_pos) * (static_cast<double>(n_pos) + 1.0) / 2.0;
    return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

double auc_pr(std::span<const int> y_true, std::span<const double> scores) {
    if (y_true.size() != scores.size()) raise(ErrorCode::Domain, "length mismatch");
    const std::size_t n = y_true.size();
    std::size_t n_pos = 0;
    for (int y : y_true) n_pos += (y != 0);
    if (n_pos == 0 || n_pos == n) {
        raise(ErrorCode::Degenerate, "auc_pr needs both classes");
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    double ap = 0.0;
    double prev_recall = 0.0;
    std::size_t tp = 0, fp = 0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
        for (std::size_t k = i; k <= j; ++k) {
            if (y_true[order[k]] != 0) {
                ++tp;
            } else {
                ++fp;
            }
        }
        const double recall = static_cast<double>(tp) / static_cast<double>(n_pos);
        const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
        ap += (recall - prev_recall) * precision;
        prev_recall = recall;
        i = j + 1;
    }
    return ap;
}

MetricResult ovr_macro(std::span<const LatencyClass> y_true,
                       std::span<const double> score_matrix) {
    const std::size_t n = y_true.size();
    if (n == 0 || score_matrix.size() != n * kNumClasses) {
        raise(ErrorCode::Domain, "score matrix shape mismatch");
    }
    std::array<std::size_t, kNumClasses> counts{};
    for (auto y : y_true) ++counts[static_cast<int>(y)];
    std::size_t present = 0;
    for (auto c : counts) present += (c > 0);
    if (present < 2) raise(ErrorCode::Degenerate, "ovr_macro needs >= 2 classes");

    MetricResult result;
    double sum_roc = 0.0, sum_pr = 0.0, sum_prevalence = 0.0;
    std::size_t used = 0;
    std::vector<int> binary(n);
    std::vector<double> col(n);
    for (int cls = 0; cls < kNumClasses; ++cls) {
        if (counts[cls] == 0) {
            result.skipped_classes.push_back(static_cast<LatencyClass>(cls));
            continue;
        }
        for (std::size_t r = 0; r < n; ++r) {
            binary[r] = static_cast<int>(y_true[r]) == cls ? 1 : 0;
            col[r] = score_matrix[r * kNumClasses + cls];
        }
        sum_roc += auc_roc(binary, col);
        sum_pr += auc_pr(binary, col);
        sum_prevalence += static_cast<double>(counts[cls]) / static_cast<double>(n);
        ++used;
    }
    result.auc_roc = sum_roc / static_cast<double>(used);
    result.auc_pr = sum_pr / static_cast<double>(used);
    result.baseline_roc = 0.5;
    result.baseline_pr = sum_prevalence / static_cast<double>(used);
    result.improvement_roc = (result.auc_roc - result.baseline_roc) / result.baseline_roc;
    result.improvement_pr = (result.auc_pr - result.baseline_pr) / result.baseline_pr;
    return result;
}

}  // namespace prlat
