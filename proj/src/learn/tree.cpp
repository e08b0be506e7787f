#include "prlat/learn/tree.hpp"

#include <algorithm>
#include <cmath>

#include "prlat/error.hpp"
#include "prlat/rng.hpp"

namespace prlat {

// ---------------------------------------------------------------------------
// Binning
// ---------------------------------------------------------------------------

FeatureBinner FeatureBinner::fit(const FeatureMatrix& train) {
    FeatureBinner binner;
    const std::size_t p = train.n_cols();
    binner.edges.resize(p);
    for (std::size_t c = 0; c < p; ++c) {
        std::vector<double> vals;
        vals.reserve(train.n_rows());
        for (std::size_t r = 0; r < train.n_rows(); ++r) {
            const double v = train.at(r, c);
            if (!is_missing(v)) vals.push_back(v);
        }
        std::sort(vals.begin(), vals.end());
        vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
        auto& edges = binner.edges[c];
        if (vals.size() <= 1) continue;  // single bin, unsplittable
        if (vals.size() <= kMaxBins) {
            edges.assign(vals.begin(), vals.end() - 1);  // max value owns the last bin
        } else {
            const std::size_t m = vals.size();
            for (std::size_t i = 1; i < kMaxBins; ++i) {
                const double cut = vals[i * m / kMaxBins];
                if (edges.empty() || cut > edges.back()) {
                    if (cut < vals.back()) edges.push_back(cut);
                }
            }
        }
    }
    return binner;
}

std::uint8_t FeatureBinner::bin(std::size_t feature, double v) const {
    if (is_missing(v)) return kMissingBin;
    const auto& e = edges[feature];
    const auto it = std::lower_bound(e.begin(), e.end(), v);
    return static_cast<std::uint8_t>(it - e.begin());
}

std::vector<std::uint8_t> FeatureBinner::bin_rows(const FeatureMatrix& rows) const {
    const std::size_t p = rows.n_cols();
    std::vector<std::uint8_t> out(rows.n_rows() * p);
    for (std::size_t r = 0; r < rows.n_rows(); ++r) {
        for (std::size_t c = 0; c < p; ++c) {
            out[r * p + c] = bin(c, rows.at(r, c));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Traversal and serialization
// ---------------------------------------------------------------------------

const TreeNode& Tree::route(std::span<const double> raw_row) const {
    const TreeNode* node = &nodes[0];
    while (!node->is_leaf) {
        const double v = raw_row[static_cast<std::size_t>(node->feature)];
        bool go_left;
        if (is_missing(v)) {
            go_left = node->missing_left;
        } else {
            go_left = v <= node->threshold;
        }
        node = &nodes[static_cast<std::size_t>(go_left ? node->left : node->right)];
    }
    return *node;
}

nlohmann::ordered_json Tree::to_json() const {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& n : nodes) {
        arr.push_back({n.is_leaf ? 1 : 0, n.feature, n.threshold, n.missing_left ? 1 : 0,
                       n.left, n.right, n.leaf_value, n.leaf_dist[0], n.leaf_dist[1],
                       n.leaf_dist[2]});
    }
    return arr;
}

Tree Tree::from_json(const nlohmann::json& j) {
    Tree tree;
    for (const auto& row : j) {
        TreeNode n;
        n.is_leaf = row.at(0).get<int>() != 0;
        n.feature = row.at(1).get<int>();
        n.threshold = row.at(2).get<double>();
        n.missing_left = row.at(3).get<int>() != 0;
        n.left = row.at(4).get<int>();
        n.right = row.at(5).get<int>();
        n.leaf_value = row.at(6).get<double>();
        n.leaf_dist = {row.at(7).get<double>(), row.at(8).get<double>(),
                       row.at(9).get<double>()};
        tree.nodes.push_back(n);
    }
    if (tree.nodes.empty()) raise(ErrorCode::SchemaMismatch, "empty tree");
    return tree;
}

bool tree_uses_feature(const Tree& tree, int feature) {
    for (const auto& n : tree.nodes) {
        if (!n.is_leaf && n.feature == feature) return true;
    }
    return false;
}

// ---------------------------------------------------------------------------
// Regression tree (second-order boosting targets)
// ---------------------------------------------------------------------------

namespace {

struct GradHist {
    std::vector<double> g, h;
    std::vector<std::size_t> cnt;
    double g_miss = 0, h_miss = 0;
    std::size_t cnt_miss = 0;

    void reset(std::size_t bins) {
        g.assign(bins, 0.0);
        h.assign(bins, 0.0);
        cnt.assign(bins, 0);
        g_miss = h_miss = 0.0;
        cnt_miss = 0;
    }
};

struct RegSplit {
    bool found = false;
    int feature = -1;
    std::uint8_t bin = 0;
    bool missing_left = true;
    double gain = 0.0;
};

double leaf_score(double g, double h, double l2) { return g * g / (h + l2); }

}  // namespace

Tree build_regression_tree(const std::vector<std::uint8_t>& bins, std::size_t p,
                           const FeatureBinner& binner, std::span<const std::size_t> rows,
                           std::span<const double> grad, std::span<const double> hess,
                           const RegressionTreeParams& params) {
    Tree tree;
    struct Task {
        int node;
        std::vector<std::size_t> rows;
        int depth;
    };
    std::vector<Task> stack;
    tree.nodes.emplace_back();
    stack.push_back({0, std::vector<std::size_t>(rows.begin(), rows.end()), 0});

    GradHist hist;
    while (!stack.empty()) {
        Task task = std::move(stack.back());
        stack.pop_back();
        auto& node_rows = task.rows;

        double g_total = 0, h_total = 0;
        for (std::size_t r : node_rows) {
            g_total += grad[r];
            h_total += hess[r];
        }
        const double leaf_value =
            -g_total / (h_total + params.l2) * params.leaf_shrinkage;
        tree.nodes[task.node].leaf_value = leaf_value;

        if (task.depth >= params.max_depth ||
            node_rows.size() < 2 * static_cast<std::size_t>(params.min_samples_leaf)) {
            continue;
        }

        const double parent_score = leaf_score(g_total, h_total, params.l2);
        RegSplit best;
        for (std::size_t f = 0; f < p; ++f) {
            if (binner.edges[f].empty()) continue;  // single bin, unsplittable
            const std::size_t nbins = binner.bin_count(f);
            hist.reset(nbins);
            for (std::size_t r : node_rows) {
                const std::uint8_t b = bins[r * p + f];
                if (b == FeatureBinner::kMissingBin) {
                    hist.g_miss += grad[r];
                    hist.h_miss += hess[r];
                    ++hist.cnt_miss;
                } else {
                    hist.g[b] += grad[r];
                    hist.h[b] += hess[r];
                    ++hist.cnt[b];
                }
            }
            double g_left = 0, h_left = 0;
            std::size_t cnt_left = 0;
            // split at bin b: values <= edges[b] go left
            for (std::size_t b = 0; b + 1 < nbins; ++b) {
                g_left += hist.g[b];
                h_left += hist.h[b];
                cnt_left += hist.cnt[b];
                for (int miss_left = 1; miss_left >= 0; --miss_left) {
                    const double gl = g_left + (miss_left ? hist.g_miss : 0.0);
                    const double hl = h_left + (miss_left ? hist.h_miss : 0.0);
                    const std::size_t cl = cnt_left + (miss_left ? hist.cnt_miss : 0);
                    const double gr = g_total - gl;
                    const double hr = h_total - hl;
                    const std::size_t cr = node_rows.size() - cl;
                    if (cl < static_cast<std::size_t>(params.min_samples_leaf) ||
                        cr < static_cast<std::size_t>(params.min_samples_leaf)) {
                        continue;
                    }
                    const double gain = leaf_score(gl, hl, params.l2) +
                                        leaf_score(gr, hr, params.l2) - parent_score;
                    if (gain > best.gain + 1e-12) {
                        best = {true, static_cast<int>(f), static_cast<std::uint8_t>(b),
                                miss_left != 0, gain};
                    }
                }
            }
        }

        if (!best.found) continue;

        auto& node = tree.nodes[task.node];
        node.is_leaf = false;
        node.feature = best.feature;
        node.threshold = binner.edges[static_cast<std::size_t>(best.feature)][best.bin];
        node.missing_left = best.missing_left;
        node.left = static_cast<int>(tree.nodes.size());
        node.right = node.left + 1;
        tree.nodes.emplace_back();
        tree.nodes.emplace_back();

        std::vector<std::size_t> left_rows, right_rows;
        for (std::size_t r : node_rows) {
            const std::uint8_t b = bins[r * p + static_cast<std::size_t>(best.feature)];
            const bool go_left = b == FeatureBinner::kMissingBin
                                     ? best.missing_left
                                     : b <= best.bin;
            (go_left ? left_rows : right_rows).push_back(r);
        }
        const int left_id = tree.nodes[task.node].left;
        const int right_id = tree.nodes[task.node].right;
        stack.push_back({right_id, std::move(right_rows), task.depth + 1});
        stack.push_back({left_id, std::move(left_rows), task.depth + 1});
    }
    return tree;
}

// ---------------------------------------------------------------------------
// Classification tree (gini, feature subsampling)
// ---------------------------------------------------------------------------

namespace {

double gini_impurity(const std::array<double, kNumClasses>& counts, double total) {
    if (total <= 0) return 0.0;
    double sum_sq = 0;
    for (double c : counts) sum_sq += c * c;
    return 1.0 - sum_sq / (total * total);
}

}  // namespace

Tree build_classification_tree(const std::vector<std::uint8_t>& bins, std::size_t p,
                               const FeatureBinner& binner,
                               std::span<const std::size_t> rows,
                               std::span<const LatencyClass> labels,
                               const ClassificationTreeParams& params,
                               std::mt19937_64& rng) {
    Tree tree;
    struct Task {
        int node;
        std::vector<std::size_t> rows;
        int depth;
    };
    std::vector<Task> stack;
    tree.nodes.emplace_back();
    stack.push_back({0, std::vector<std::size_t>(rows.begin(), rows.end()), 0});

    std::vector<std::size_t> feature_pool(p);
    for (std::size_t i = 0; i < p; ++i) feature_pool[i] = i;

    while (!stack.empty()) {
        Task task = std::move(stack.back());
        stack.pop_back();
        auto& node_rows = task.rows;
        const double n_node = static_cast<double>(node_rows.size());

        std::array<double, kNumClasses> counts{};
        for (std::size_t r : node_rows) counts[static_cast<int>(labels[r])] += 1.0;
        auto& leaf = tree.nodes[task.node];
        for (int c = 0; c < kNumClasses; ++c) leaf.leaf_dist[c] = counts[c] / n_node;

        const double parent_gini = gini_impurity(counts, n_node);
        if (task.depth >= params.max_depth || parent_gini <= 0.0 ||
            node_rows.size() < 2 * static_cast<std::size_t>(params.min_samples_leaf)) {
            continue;
        }

        // per-node feature subsample, deterministic given the rng stream
        std::size_t mtry = params.max_features == 0 ? p : std::min(params.max_features, p);
        for (std::size_t i = 0; i < mtry; ++i) {
            const std::size_t j = i + draw_below(rng, p - i);
            std::swap(feature_pool[i], feature_pool[j]);
        }

        struct ClsSplit {
            bool found = false;
            int feature = -1;
            std::uint8_t bin = 0;
            bool missing_left = true;
            double gain = 0.0;
        } best;

        for (std::size_t fi = 0; fi < mtry; ++fi) {
            const std::size_t f = feature_pool[fi];
            if (binner.edges[f].empty()) continue;
            const std::size_t nbins = binner.bin_count(f);
            std::vector<std::array<double, kNumClasses>> hist(nbins);
            std::vector<std::size_t> cnt(nbins, 0);
            std::array<double, kNumClasses> miss{};
            std::size_t cnt_miss = 0;
            for (std::size_t r : node_rows) {
                const std::uint8_t b = bins[r * p + f];
                if (b == FeatureBinner::kMissingBin) {
                    miss[static_cast<int>(labels[r])] += 1.0;
                    ++cnt_miss;
                } else {
                    hist[b][static_cast<int>(labels[r])] += 1.0;
                    ++cnt[b];
                }
            }
            std::array<double, kNumClasses> left{};
            std::size_t cnt_left = 0;
            for (std::size_t b = 0; b + 1 < nbins; ++b) {
                for (int c = 0; c < kNumClasses; ++c) left[c] += hist[b][c];
                cnt_left += cnt[b];
                for (int miss_left = 1; miss_left >= 0; --miss_left) {
                    std::array<double, kNumClasses> l = left;
                    std::size_t cl = cnt_left;
                    if (miss_left) {
                        for (int c = 0; c < kNumClasses; ++c) l[c] += miss[c];
                        cl += cnt_miss;
                    }
                    const std::size_t cr = node_rows.size() - cl;
                    if (cl < static_cast<std::size_t>(params.min_samples_leaf) ||
                        cr < static_cast<std::size_t>(params.min_samples_leaf)) {
                        continue;
                    }
                    std::array<double, kNumClasses> r{};
                    for (int c = 0; c < kNumClasses; ++c) r[c] = counts[c] - l[c];
                    const double nl = static_cast<double>(cl);
                    const double nr = static_cast<double>(cr);
                    const double gain = parent_gini - (nl * gini_impurity(l, nl) +
                                                       nr * gini_impurity(r, nr)) /
                                                          n_node;
                    if (gain > best.gain + 1e-12) {
                        best = {true, static_cast<int>(f), static_cast<std::uint8_t>(b),
                                miss_left != 0, gain};
                    }
                }
            }
        }

        if (!best.found) continue;

        auto& node = tree.nodes[task.node];
        node.is_leaf = false;
        node.feature = best.feature;
        node.threshold = binner.edges[static_cast<std::size_t>(best.feature)][best.bin];
        node.missing_left = best.missing_left;
        node.left = static_cast<int>(tree.nodes.size());
        node.right = node.left + 1;
        tree.nodes.emplace_back();
        tree.nodes.emplace_back();

        std::vector<std::size_t> left_rows, right_rows;
        for (std::size_t r : node_rows) {
            const std::uint8_t b = bins[r * p + static_cast<std::size_t>(best.feature)];
            const bool go_left = b == FeatureBinner::kMissingBin
                                     ? best.missing_left
                                     : b <= best.bin;
            (go_left ? left_rows : right_rows).push_back(r);
        }
        const int left_id = tree.nodes[task.node].left;
        const int right_id = tree.nodes[task.node].right;
        stack.push_back({right_id, std::move(right_rows), task.depth + 1});
        stack.push_back({left_id, std::move(left_rows), task.depth + 1});
    }
    return tree;
}

}  // namespace prlat
