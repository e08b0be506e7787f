#pragma once

// Seeded synthetic matrices for preprocessing and model tests.

#include <string>
#include <vector>

#include "prlat/features.hpp"
#include "prlat/rng.hpp"

namespace prlat::testsupport {

inline FeatureMatrix matrix_from(std::vector<std::string> names,
                                 std::vector<FeatureScale> scales,
                                 const std::vector<std::vector<double>>& rows,
                                 std::vector<LatencyClass> labels = {}) {
    FeatureMatrix m;
    m.feature_names = std::move(names);
    if (scales.empty()) scales.assign(m.feature_names.size(), FeatureScale::Numeric);
    m.feature_scales = std::move(scales);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        LatencyClass label =
            labels.empty() ? LatencyClass::WITHIN_1_DAY : labels[r];
        m.append_row({"synthetic", static_cast<std::int64_t>(r + 1),
                      UtcInstant{static_cast<std::int64_t>(r) * 3600}},
                     rows[r], label);
    }
    return m;
}

// Maintainer-role matrix engineered so that exactly four feature pairs pass
// the |rho| >= 0.6 gate: changed_lines~commits, changed_files~commits,
// contributor_experience~contributor_performance, and
// submission_volume~community_size.
inline FeatureMatrix engineered_correlation_matrix(std::uint64_t seed, std::size_t n) {
    auto defs = features_for(Role::MAINTAINER);
    std::vector<std::string> names;
    std::vector<FeatureScale> scales;
    for (const auto& d : defs) {
        names.push_back(d.name);
        scales.push_back(d.scale);
    }
    auto rng = make_rng(seed);
    std::vector<std::vector<double>> rows(n, std::vector<double>(names.size(), 0.0));
    auto col = [&](const char* name) {
        for (std::size_t c = 0; c < names.size(); ++c) {
            if (names[c] == name) return c;
        }
        throw std::logic_error("missing column");
    };
    const std::size_t c_commits = col("commits");
    const std::size_t c_lines = col("changed_lines");
    const std::size_t c_files = col("changed_files");
    const std::size_t c_perf = col("contributor_performance");
    const std::size_t c_exp = col("contributor_experience");
    const std::size_t c_comm = col("community_size");
    const std::size_t c_vol = col("submission_volume");
    const std::size_t c_day = col("submission_day");
    const std::size_t c_hour = col("submission_hour");

    for (std::size_t r = 0; r < n; ++r) {
        auto& row = rows[r];
        for (std::size_t c = 0; c < names.size(); ++c) row[c] = draw_normal(rng);
        row[c_lines] = row[c_commits] + draw_normal(rng);
        row[c_files] = row[c_commits] + draw_normal(rng);
        row[c_exp] = row[c_perf] + draw_normal(rng);
        row[c_vol] = row[c_comm] + draw_normal(rng);
        row[c_day] = static_cast<double>(draw_below(rng, 7));
        row[c_hour] = static_cast<double>(draw_below(rng, 24));
    }
    return matrix_from(std::move(names), std::move(scales), rows);
}

// Three well-separated Gaussian blobs plus pure-noise columns; labels are
// the blob ids.
inline FeatureMatrix three_blobs(std::uint64_t seed, std::size_t n, double sigma = 0.6,
                                 std::size_t extra_noise = 2) {
    auto rng = make_rng(seed);
    std::vector<std::string> names{"f0", "f1"};
    for (std::size_t i = 0; i < extra_noise; ++i) names.push_back("noise" + std::to_string(i));
    const double centers[3][2] = {{0.0, 0.0}, {6.0, 0.0}, {0.0, 6.0}};
    std::vector<std::vector<double>> rows;
    std::vector<LatencyClass> labels;
    for (std::size_t i = 0; i < n; ++i) {
        const int cls = static_cast<int>(draw_below(rng, 3));
        std::vector<double> row{centers[cls][0] + sigma * draw_normal(rng),
                                centers[cls][1] + sigma * draw_normal(rng)};
        for (std::size_t j = 0; j < extra_noise; ++j) row.push_back(draw_normal(rng));
        rows.push_back(std::move(row));
        labels.push_back(static_cast<LatencyClass>(cls));
    }
    return matrix_from(std::move(names), {}, rows, labels);
}

// Synthetic "project": 11 post-prune maintainer features, all non-negative,
// where the label is a noisy monotone function of exactly three of them
// (commits, contributor_performance, maintainers_responsiveness).
inline FeatureMatrix monotone_signal_project(std::uint64_t seed, std::size_t n,
                                             const std::string& project_id,
                                             double noise_sigma = 0.8) {
    std::vector<std::string> names{
        "project_backlog",    "maintainers_availability", "maintainers_responsiveness",
        "community_size",     "contributor_performance",  "contributor_backlog",
        "contributor_responsiveness", "description_length", "commits",
        "submission_day",     "submission_hour"};
    std::vector<FeatureScale> scales(names.size(), FeatureScale::Numeric);
    scales[9] = FeatureScale::Weekday;
    scales[10] = FeatureScale::HourOfDay;

    auto rng = make_rng(seed);
    FeatureMatrix m;
    m.feature_names = names;
    m.feature_scales = scales;
    for (std::size_t i = 0; i < n; ++i) {
        const double g_commits = draw_normal(rng);
        const double g_perf = draw_normal(rng);
        const double g_resp = draw_normal(rng);
        std::vector<double> row(names.size());
        row[0] = std::exp(0.7 * draw_normal(rng) + 2.0);
        row[1] = std::exp(0.5 * draw_normal(rng) + 1.5);
        row[2] = std::exp(0.8 * g_resp + 3.0);
        row[3] = std::exp(0.6 * draw_normal(rng) + 2.5);
        row[4] = std::min(1.0, std::max(0.0, 0.5 + 0.2 * g_perf));
        row[5] = std::exp(0.5 * draw_normal(rng));
        row[6] = std::exp(0.9 * draw_normal(rng) + 2.0);
        row[7] = std::exp(0.8 * draw_normal(rng) + 3.0);
        row[8] = std::exp(0.5 * g_commits + 2.0);
        row[9] = static_cast<double>(draw_below(rng, 7));
        row[10] = static_cast<double>(draw_below(rng, 24));

        const double latent = g_commits + g_resp - g_perf + noise_sigma * draw_normal(rng);
        LatencyClass label = latent <= -0.82 ? LatencyClass::WITHIN_1_DAY
                             : latent <= 0.82 ? LatencyClass::DAY_TO_WEEK
                                              : LatencyClass::OVER_WEEK;
        m.append_row({project_id, static_cast<std::int64_t>(i + 1),
                      UtcInstant{static_cast<std::int64_t>(i) * 7200}},
                     row, label);
    }
    return m;
}

}  // namespace prlat::testsupport
