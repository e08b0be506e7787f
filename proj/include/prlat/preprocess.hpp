#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "prlat/features.hpp"

namespace prlat {

// Spearman rank correlation: Pearson correlation of mid-ranks (ties receive
// average ranks). Pairs with a MISSING member are dropped pairwise. Raises
// Degenerate when a vector is constant after pair-dropping.
double spearman(std::span<const double> x, std::span<const double> y);

struct CorrelationReport {
    struct Dropped {
        std::string feature;
        std::string kept_counterpart;
        double rho = 0.0;
    };
    std::vector<std::string> feature_names;
    std::vector<double> rho;  // p x p, symmetric, unit diagonal, NaN if degenerate
    std::vector<Dropped> dropped;
    std::vector<std::pair<std::string, std::string>> degenerate_pairs;

    double rho_at(std::size_t i, std::size_t j) const {
        return rho[i * feature_names.size() + j];
    }
};

// Greedy pruning: pairs with |rho| >= threshold are visited in descending
// |rho|; within a pair the feature ranked earlier in keep_priority survives.
// Features absent from keep_priority rank below all listed ones, in matrix
// column order. Degenerate pairs are skipped and reported.
std::pair<FeatureMatrix, CorrelationReport> correlation_prune(
    const FeatureMatrix& matrix, double threshold = 0.6,
    const std::vector<std::string>& keep_priority = default_keep_priority());

void write_correlation_csv(const CorrelationReport& report,
                           const std::filesystem::path& path);

// v -> ln(v+1) on numeric-scale features; weekday/hour ordinals pass through
// untouched; MISSING preserved. Raises Domain on negative values.
FeatureMatrix log1p_transform(const FeatureMatrix& matrix);

struct ScalerState {
    std::vector<std::string> feature_names;
    std::vector<double> mean;
    std::vector<double> stddev;   // population (divide by n)
    std::vector<bool> scaled;     // false = zero-variance pass-through, flagged
};

// Fit on training rows only; the interface takes just the train view so a
// caller cannot leak test rows into the scaler. MISSING entries are ignored
// while fitting and preserved by apply.
ScalerState zscore_fit(const FeatureMatrix& train);
void zscore_apply(const ScalerState& state, FeatureMatrix& matrix);

}  // namespace prlat
