#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <json.hpp>

#include "prlat/features.hpp"

namespace prlat {

// Histogram binning shared by the tree learners: at most 255 value bins per
// feature plus one reserved MISSING bin. Edges are actual training values,
// so any strictly increasing transform applied consistently to train and
// test leaves routing unchanged.
struct FeatureBinner {
    static constexpr std::uint8_t kMissingBin = 255;
    static constexpr std::size_t kMaxBins = 255;

    std::vector<std::vector<double>> edges;  // per feature, ascending cut values

    static FeatureBinner fit(const FeatureMatrix& train);

    std::uint8_t bin(std::size_t feature, double v) const;
    std::size_t bin_count(std::size_t feature) const { return edges[feature].size() + 1; }

    // row-major n x p bin ids
    std::vector<std::uint8_t> bin_rows(const FeatureMatrix& rows) const;
};

struct TreeNode {
    bool is_leaf = true;
    int feature = -1;
    double threshold = 0.0;   // go left when value <= threshold
    bool missing_left = true;
    int left = -1;
    int right = -1;
    double leaf_value = 0.0;                      // regression trees
    std::array<double, kNumClasses> leaf_dist{};  // classification trees
};

struct Tree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root

    const TreeNode& route(std::span<const double> raw_row) const;
    double predict_value(std::span<const double> raw_row) const {
        return route(raw_row).leaf_value;
    }
    const std::array<double, kNumClasses>& predict_dist(std::span<const double> raw_row) const {
        return route(raw_row).leaf_dist;
    }

    nlohmann::ordered_json to_json() const;
    static Tree from_json(const nlohmann::json& j);
};

struct RegressionTreeParams {
    int max_depth = 6;
    int min_samples_leaf = 20;
    double l2 = 1.0;
    double leaf_shrinkage = 0.1;  // learning rate folded into leaf values
};

// Second-order regression tree on (gradient, hessian) targets; used per
// class per boosting round. MISSING routes to the gain-maximizing side.
Tree build_regression_tree(const std::vector<std::uint8_t>& bins, std::size_t p,
                           const FeatureBinner& binner, std::span<const std::size_t> rows,
                           std::span<const double> grad, std::span<const double> hess,
                           const RegressionTreeParams& params);

struct ClassificationTreeParams {
    int max_depth = 32;
    int min_samples_leaf = 5;
    std::size_t max_features = 0;  // per-node feature subsample; 0 = all
};

// Gini-impurity classification tree with per-node feature subsampling;
// leaves hold class distributions.
Tree build_classification_tree(const std::vector<std::uint8_t>& bins, std::size_t p,
                               const FeatureBinner& binner,
                               std::span<const std::size_t> rows,
                               std::span<const LatencyClass> labels,
                               const ClassificationTreeParams& params,
                               std::mt19937_64& rng);

// True when `feature` appears on no split of the tree (permutation
// importance of such a feature is exactly zero).
bool tree_uses_feature(const Tree& tree, int feature);

}  // namespace prlat
