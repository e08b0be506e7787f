#include "prlat/cv.hpp"

#include "prlat/error.hpp"

namespace prlat {

CVPlan time_series_split(std::size_t n_rows, std::size_t k) {
    if (k < 2) raise(ErrorCode::TooFewRows, "fold count k must be >= 2");
    if (n_rows < k + 1) {
        raise(ErrorCode::TooFewRows, "need at least k+1 rows, got " +
                                         std::to_string(n_rows) + " for k=" +
                                         std::to_string(k));
    }
    const std::size_t blocks = k + 1;
    const std::size_t base = n_rows / blocks;
    const std::size_t first = base + n_rows % blocks;

    CVPlan plan;
    plan.n_rows = n_rows;
    plan.k = k;
    std::size_t boundary = first;
    for (std::size_t i = 0; i < k; ++i) {
        CVSplit split;
        split.train_begin = 0;
        split.train_end = boundary;
        split.test_begin = boundary;
        split.test_end = boundary + base;
        plan.splits.push_back(split);
        boundary += base;
    }
    return plan;
}

void validate_split_instants(const FeatureMatrix& matrix, const CVSplit& split) {
    if (split.train_size() == 0 || split.test_size() == 0 ||
        split.test_end > matrix.n_rows()) {
        raise(ErrorCode::Leakage, "malformed split ranges");
    }
    for (std::size_t r = 1; r < matrix.n_rows(); ++r) {
        if (matrix.rows[r - 1].instant > matrix.rows[r].instant) {
            raise(ErrorCode::Leakage, "rows are not time-sorted at index " +
                                          std::to_string(r));
        }
    }
    UtcInstant max_train = matrix.rows[split.train_begin].instant;
    for (std::size_t r = split.train_begin; r < split.train_end; ++r) {
        max_train = std::max(max_train, matrix.rows[r].instant);
    }
    UtcInstant min_test = matrix.rows[split.test_begin].instant;
    for (std::size_t r = split.test_begin; r < split.test_end; ++r) {
        min_test = std::min(min_test, matrix.rows[r].instant);
    }
    if (!(max_train < min_test)) {
        raise(ErrorCode::Leakage,
              "train instant " + format_iso8601(max_train) + " is not before test instant " +
                  format_iso8601(min_test));
    }
}

CVSplit adjust_split_for_ties(const FeatureMatrix& matrix, CVSplit split) {
    while (split.test_begin < split.test_end && split.test_begin > 0 &&
           matrix.rows[split.test_begin].instant ==
               matrix.rows[split.test_begin - 1].instant) {
        ++split.test_begin;
        split.train_end = split.test_begin;
    }
    if (split.test_begin >= split.test_end) {
        raise(ErrorCode::TooFewRows, "tie adjustment emptied the test block");
    }
    return split;
}

}  // namespace prlat
