#include "prlat/learn/linear.hpp"

#include <algorithm>
#include <cmath>

namespace prlat {

void softmax_inplace(std::span<double> scores) {
    double mx = scores[0];
    for (double s : scores) mx = std::max(mx, s);
    double sum = 0.0;
    for (double& s : scores) {
        s = std::exp(s - mx);
        sum += s;
    }
    for (double& s : scores) s /= sum;
}

double softmax_xent_loss_grad(const LinearWeights& weights, const EncodedMatrix& X,
                              std::span<const LatencyClass> y,
                              std::span<const std::size_t> rows, double l2,
                              std::vector<double>& grad) {
    const std::size_t p = weights.p;
    grad.assign(weights.w.size(), 0.0);
    const double inv_n = 1.0 / static_cast<double>(rows.size());
    double loss = 0.0;
    std::array<double, kNumClasses> z{};
    for (std::size_t r : rows) {
        const auto x = X.row(r);
        for (int c = 0; c < kNumClasses; ++c) {
            double s = weights.at(c, p);  // bias
            for (std::size_t j = 0; j < p; ++j) s += weights.at(c, j) * x[j];
            z[c] = s;
        }
        softmax_inplace(z);
        const int label = static_cast<int>(y[r]);
        loss += -std::log(std::max(z[label], 1e-300)) * inv_n;
        for (int c = 0; c < kNumClasses; ++c) {
            const double delta = (z[c] - (c == label ? 1.0 : 0.0)) * inv_n;
            double* g = grad.data() + c * (p + 1);
            for (std::size_t j = 0; j < p; ++j) g[j] += delta * x[j];
            g[p] += delta;
        }
    }
    for (int c = 0; c < kNumClasses; ++c) {
        for (std::size_t j = 0; j < p; ++j) {  // biases carry no penalty
            loss += 0.5 * l2 * weights.at(c, j) * weights.at(c, j);
            grad[c * (p + 1) + j] += l2 * weights.at(c, j);
        }
    }
    return loss;
}

void mlp_forward(const MlpWeights& weights, std::span<const double> x,
                 std::span<double> hidden_out, std::span<double> scores_out) {
    const std::size_t p = weights.p;
    const std::size_t h = weights.hidden;
    for (std::size_t i = 0; i < h; ++i) {
        const double* w = weights.w1.data() + i * (p + 1);
        double a = w[p];
        for (std::size_t j = 0; j < p; ++j) a += w[j] * x[j];
        hidden_out[i] = a > 0.0 ? a : 0.0;  // ReLU
    }
    for (int c = 0; c < kNumClasses; ++c) {
        const double* w = weights.w2.data() + c * (h + 1);
        double s = w[h];
        for (std::size_t i = 0; i < h; ++i) s += w[i] * hidden_out[i];
        scores_out[c] = s;
    }
}

double mlp_loss_grad(const MlpWeights& weights, const EncodedMatrix& X,
                     std::span<const LatencyClass> y, std::span<const std::size_t> rows,
                     double l2, MlpWeights& grad) {
    const std::size_t p = weights.p;
    const std::size_t h = weights.hidden;
    grad.p = p;
    grad.hidden = h;
    grad.w1.assign(weights.w1.size(), 0.0);
    grad.w2.assign(weights.w2.size(), 0.0);
    const double inv_n = 1.0 / static_cast<double>(rows.size());
    double loss = 0.0;
    std::vector<double> hidden(h);
    std::array<double, kNumClasses> z{};
    std::vector<double> dhidden(h);
    for (std::size_t r : rows) {
        const auto x = X.row(r);
        mlp_forward(weights, x, hidden, z);
        softmax_inplace(z);
        const int label = static_cast<int>(y[r]);
        loss += -std::log(std::max(z[label], 1e-300)) * inv_n;

        std::fill(dhidden.begin(), dhidden.end(), 0.0);
        for (int c = 0; c < kNumClasses; ++c) {
            const double delta = (z[c] - (c == label ? 1.0 : 0.0)) * inv_n;
            double* g2 = grad.w2.data() + c * (h + 1);
            const double* w2 = weights.w2.data() + c * (h + 1);
            for (std::size_t i = 0; i < h; ++i) {
                g2[i] += delta * hidden[i];
                dhidden[i] += delta * w2[i];
            }
            g2[h] += delta;
        }
        for (std::size_t i = 0; i < h; ++i) {
            if (hidden[i] <= 0.0) continue;  // ReLU gate
            double* g1 = grad.w1.data() + i * (p + 1);
            for (std::size_t j = 0; j < p; ++j) g1[j] += dhidden[i] * x[j];
            g1[p] += dhidden[i];
        }
    }
    for (std::size_t i = 0; i < h; ++i) {
        const double* w = weights.w1.data() + i * (p + 1);
        double* g = grad.w1.data() + i * (p + 1);
        for (std::size_t j = 0; j < p; ++j) {
            loss += 0.5 * l2 * w[j] * w[j];
            g[j] += l2 * w[j];
        }
    }
    for (int c = 0; c < kNumClasses; ++c) {
        const double* w = weights.w2.data() + c * (h + 1);
        double* g = grad.w2.data() + c * (h + 1);
        for (std::size_t i = 0; i < h; ++i) {
            loss += 0.5 * l2 * w[i] * w[i];
            g[i] += l2 * w[i];
        }
    }
    return loss;
}

double hinge_ovr_loss_grad(const LinearWeights& weights, const EncodedMatrix& X,
                           std::span<const LatencyClass> y,
                           std::span<const std::size_t> rows, double l2,
                           std::vector<double>& grad) {
    const std::size_t p = weights.p;
    grad.assign(weights.w.size(), 0.0);
    const double inv_n = 1.0 / static_cast<double>(rows.size());
    double loss = 0.0;
    for (std::size_t r : rows) {
        const auto x = X.row(r);
        const int label = static_cast<int>(y[r]);
        for (int c = 0; c < kNumClasses; ++c) {
            const double target = c == label ? 1.0 : -1.0;
            double margin = weights.at(c, p);
            for (std::size_t j = 0; j < p; ++j) margin += weights.at(c, j) * x[j];
            const double violation = 1.0 - target * margin;
            if (violation > 0.0) {
                loss += violation * inv_n;
                double* g = grad.data() + c * (p + 1);
                for (std::size_t j = 0; j < p; ++j) g[j] -= target * x[j] * inv_n;
                g[p] -= target * inv_n;
            }
        }
    }
    for (int c = 0; c < kNumClasses; ++c) {
        for (std::size_t j = 0; j < p; ++j) {
            loss += 0.5 * l2 * weights.at(c, j) * weights.at(c, j);
            grad[c * (p + 1) + j] += l2 * weights.at(c, j);
        }
    }
    return loss;
}

}  // namespace prlat
