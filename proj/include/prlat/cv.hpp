#pragma once

#include <cstddef>
#include <vector>

#include "prlat/features.hpp"

namespace prlat {

// One expanding-window split over time-sorted rows; half-open index ranges.
struct CVSplit {
    std::size_t train_begin = 0;
    std::size_t train_end = 0;
    std::size_t test_begin = 0;
    std::size_t test_end = 0;

    std::size_t train_size() const { return train_end - train_begin; }
    std::size_t test_size() const { return test_end - test_begin; }
};

struct CVPlan {
    std::size_t n_rows = 0;
    std::size_t k = 0;
    std::vector<CVSplit> splits;
};

// Partitions rows into k+1 contiguous time-ordered blocks of near-equal size
// (the first block absorbs the remainder); split i trains on blocks 1..i and
// tests on block i+1. Raises TooFewRows unless n_rows >= k+1 and k >= 2.
CVPlan time_series_split(std::size_t n_rows, std::size_t k);

// Runtime leakage guard for an executed split: requires rows time-sorted and
// max(train instants) < min(test instants). Raises Leakage otherwise.
void validate_split_instants(const FeatureMatrix& matrix, const CVSplit& split);

// Rows whose instant ties the train/test boundary are moved into the train
// side so the strict inequality holds; raises TooFewRows when the test side
// empties out. No-op for distinct boundary instants.
CVSplit adjust_split_for_ties(const FeatureMatrix& matrix, CVSplit split);

}  // namespace prlat
