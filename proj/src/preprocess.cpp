#include "prlat/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include "prlat/error.hpp"

namespace prlat {

namespace {

std::vector<double> mid_ranks(std::span<const double> v) {
    const std::size_t n = v.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
        const double mid = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = mid;
        i = j + 1;
    }
    return ranks;
}

double pearson(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) {
        raise(ErrorCode::Degenerate, "constant vector in correlation");
    }
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) raise(ErrorCode::Domain, "spearman length mismatch");
    std::vector<double> xs, ys;
    xs.reserve(x.size());
    ys.reserve(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (is_missing(x[i]) || is_missing(y[i])) continue;
        xs.push_back(x[i]);
        ys.push_back(y[i]);
    }
    if (xs.size() < 2) raise(ErrorCode::Degenerate, "fewer than 2 complete pairs");
    const auto rx = mid_ranks(xs);
    const auto ry = mid_ranks(ys);
    return pearson(rx, ry);
}

std::pair<FeatureMatrix, CorrelationReport> correlation_prune(
    const FeatureMatrix& matrix, double threshold,
    const std::vector<std::string>& keep_priority) {
    if (matrix.n_rows() < 2) raise(ErrorCode::TooFewRows, "correlation needs >= 2 rows");
    const std::size_t p = matrix.n_cols();

    CorrelationReport report;
    report.feature_names = matrix.feature_names;
    report.rho.assign(p * p, std::numeric_limits<double>::quiet_NaN());

    std::vector<std::vector<double>> cols(p);
    for (std::size_t c = 0; c < p; ++c) cols[c] = matrix.column(c);

    struct Pair {
        std::size_t i, j;
        double rho;
    };
    std::vector<Pair> strong;
    for (std::size_t i = 0; i < p; ++i) {
        report.rho[i * p + i] = 1.0;
        for (std::size_t j = i + 1; j < p; ++j) {
            double r;
            try {
                r = spearman(cols[i], cols[j]);
            } catch (const Error& e) {
                if (e.code() != ErrorCode::Degenerate) throw;
                report.degenerate_pairs.emplace_back(matrix.feature_names[i],
                                                     matrix.feature_names[j]);
                continue;
            }
            report.rho[i * p + j] = r;
            report.rho[j * p + i] = r;
            if (std::abs(r) >= threshold) strong.push_back({i, j, r});
        }
    }

    std::sort(strong.begin(), strong.end(), [&](const Pair& a, const Pair& b) {
        if (std::abs(a.rho) != std::abs(b.rho)) return std::abs(a.rho) > std::abs(b.rho);
        if (a.i != b.i) return a.i < b.i;
        return a.j < b.j;
    });

    auto priority_rank = [&](std::size_t col) {
        const auto& name = matrix.feature_names[col];
        for (std::size_t k = 0; k < keep_priority.size(); ++k) {
            if (keep_priority[k] == name) return k;
        }
        return keep_priority.size() + col;  // unlisted: below all, matrix order
    };

    std::vector<bool> alive(p, true);
    for (const auto& pair : strong) {
        if (!alive[pair.i] || !alive[pair.j]) continue;
        const bool keep_i = priority_rank(pair.i) <= priority_rank(pair.j);
        const std::size_t kept = keep_i ? pair.i : pair.j;
        const std::size_t drop = keep_i ? pair.j : pair.i;
        alive[drop] = false;
        report.dropped.push_back(
            {matrix.feature_names[drop], matrix.feature_names[kept], pair.rho});
    }

    std::vector<std::size_t> to_drop;
    for (std::size_t c = 0; c < p; ++c) {
        if (!alive[c]) to_drop.push_back(c);
    }
    return {matrix.drop_columns(to_drop), std::move(report)};
}

void write_correlation_csv(const CorrelationReport& report,
                           const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) raise(ErrorCode::Io, "cannot write " + path.string());
    out << "feature";
    for (const auto& name : report.feature_names) out << ',' << name;
    out << '\n';
    const std::size_t p = report.feature_names.size();
    for (std::size_t i = 0; i < p; ++i) {
        out << report.feature_names[i];
        for (std::size_t j = 0; j < p; ++j) {
            const double r = report.rho_at(i, j);
            out << ',' << (std::isnan(r) ? std::string("NA") : format_double(r));
        }
        out << '\n';
    }
    out << "\ndropped,kept,rho\n";
    for (const auto& d : report.dropped) {
        out << d.feature << ',' << d.kept_counterpart << ',' << format_double(d.rho) << '\n';
    }
}

FeatureMatrix log1p_transform(const FeatureMatrix& matrix) {
    FeatureMatrix out = matrix;
    for (std::size_t c = 0; c < out.n_cols(); ++c) {
        if (out.feature_scales[c] != FeatureScale::Numeric) continue;
        for (std::size_t r = 0; r < out.n_rows(); ++r) {
            double& v = out.at(r, c);
            if (is_missing(v)) continue;
            if (v < 0.0) {
                raise(ErrorCode::Domain, "negative value in log1p for feature " +
                                             out.feature_names[c]);
            }
            v = std::log1p(v);
        }
    }
    return out;
}

ScalerState zscore_fit(const FeatureMatrix& train) {
    ScalerState state;
    state.feature_names = train.feature_names;
    const std::size_t p = train.n_cols();
    state.mean.assign(p, 0.0);
    state.stddev.assign(p, 0.0);
    state.scaled.assign(p, false);
    for (std::size_t c = 0; c < p; ++c) {
        double sum = 0.0;
        std::size_t n = 0;
        for (std::size_t r = 0; r < train.n_rows(); ++r) {
            const double v = train.at(r, c);
            if (is_missing(v)) continue;
            sum += v;
            ++n;
        }
        if (n == 0) continue;
        const double mean = sum / static_cast<double>(n);
        double ss = 0.0;
        for (std::size_t r = 0; r < train.n_rows(); ++r) {
            const double v = train.at(r, c);
            if (is_missing(v)) continue;
            ss += (v - mean) * (v - mean);
        }
        const double sd = std::sqrt(ss / static_cast<double>(n));
        state.mean[c] = mean;
        state.stddev[c] = sd;
        state.scaled[c] = sd > 0.0;
    }
    return state;
}

void zscore_apply(const ScalerState& state, FeatureMatrix& matrix) {
    if (state.feature_names != matrix.feature_names) {
        raise(ErrorCode::FeatureMismatch, "scaler fitted on different features");
    }
    for (std::size_t c = 0; c < matrix.n_cols(); ++c) {
        if (!state.scaled[c]) continue;
        for (std::size_t r = 0; r < matrix.n_rows(); ++r) {
            double& v = matrix.at(r, c);
            if (is_missing(v)) continue;
            v = (v - state.mean[c]) / state.stddev[c];
        }
    }
}

}  // namespace prlat
