#pragma once

#include <span>
#include <vector>

#include "prlat/features.hpp"
#include "prlat/learn/encode.hpp"

namespace prlat {

// Internals of the gradient-trained models, exposed so tests can check the
// analytic gradients against finite differences.

// Softmax regression weights: kNumClasses x (p + 1), last column is the bias.
struct LinearWeights {
    std::size_t p = 0;
    std::vector<double> w;

    static LinearWeights zeros(std::size_t p_) {
        return {p_, std::vector<double>(kNumClasses * (p_ + 1), 0.0)};
    }
    double at(int cls, std::size_t j) const { return w[cls * (p + 1) + j]; }
    double& at(int cls, std::size_t j) { return w[cls * (p + 1) + j]; }
};

// Mean cross-entropy over `rows` plus (l2/2)*||weights||^2 (biases excluded);
// writes the full gradient into `grad` (same layout as weights).
double softmax_xent_loss_grad(const LinearWeights& weights, const EncodedMatrix& X,
                              std::span<const LatencyClass> y,
                              std::span<const std::size_t> rows, double l2,
                              std::vector<double>& grad);

// One hidden ReLU layer then softmax.
// w1: hidden x (p+1); w2: kNumClasses x (hidden+1); last columns are biases.
struct MlpWeights {
    std::size_t p = 0;
    std::size_t hidden = 0;
    std::vector<double> w1;
    std::vector<double> w2;
};

double mlp_loss_grad(const MlpWeights& weights, const EncodedMatrix& X,
                     std::span<const LatencyClass> y, std::span<const std::size_t> rows,
                     double l2, MlpWeights& grad);

void mlp_forward(const MlpWeights& weights, std::span<const double> x,
                 std::span<double> hidden_out, std::span<double> scores_out);

// Mean OvR hinge loss plus (l2/2)*||weights||^2; subgradient into `grad`.
double hinge_ovr_loss_grad(const LinearWeights& weights, const EncodedMatrix& X,
                           std::span<const LatencyClass> y,
                           std::span<const std::size_t> rows, double l2,
                           std::vector<double>& grad);

void softmax_inplace(std::span<double> scores);

}  // namespace prlat
