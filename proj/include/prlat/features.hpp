#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "prlat/actors.hpp"
#include "prlat/archive.hpp"

namespace prlat {

// ---------------------------------------------------------------------------
// Labels
// ---------------------------------------------------------------------------

enum class LatencyClass { WITHIN_1_DAY = 0, DAY_TO_WEEK = 1, OVER_WEEK = 2 };
inline constexpr int kNumClasses = 3;

// h <= 24 -> WITHIN_1_DAY; 24 < h <= 168 -> DAY_TO_WEEK; h > 168 -> OVER_WEEK.
// Negative input raises Domain.
LatencyClass label_latency(double hours);

const char* latency_class_name(LatencyClass c);
std::optional<LatencyClass> parse_latency_class(const std::string& name);

enum class Role { MAINTAINER, CONTRIBUTOR };
const char* role_name(Role role);

// ---------------------------------------------------------------------------
// Feature table
// ---------------------------------------------------------------------------

// MISSING sentinel for undefined history-based features. NaN is distinct
// from every numeric value; CSV files spell it as the literal MISSING.
inline double missing_value() { return std::numeric_limits<double>::quiet_NaN(); }
inline bool is_missing(double v) { return std::isnan(v); }

enum class FeatureScale { Numeric, Weekday, HourOfDay };

struct FeatureDef {
    std::string name;
    FeatureScale scale = FeatureScale::Numeric;
    bool for_maintainer = false;
    bool for_contributor = false;
};

// All 21 features in canonical order.
const std::vector<FeatureDef>& feature_table();
std::vector<FeatureDef> features_for(Role role);

// Default keep-priority for correlation pruning: most interpretable first.
// Features absent from the list rank below all listed ones.
const std::vector<std::string>& default_keep_priority();

// History window for "over the last 3 months" features: a rolling
// 90 x 24 h window ending at the measurement instant, exclusive on the left.
inline constexpr std::int64_t kHistoryWindowSecs = 90 * 24 * 3600;

// ---------------------------------------------------------------------------
// Vectors and matrices
// ---------------------------------------------------------------------------

struct FeatureVector {
    std::string project_id;
    std::int64_t pr_number = 0;
    Role role = Role::MAINTAINER;
    UtcInstant measurement_instant;
    std::vector<double> values;  // ordered per features_for(role)
    LatencyClass label = LatencyClass::WITHIN_1_DAY;
};

struct RowKey {
    std::string project_id;
    std::int64_t pr_number = 0;
    UtcInstant instant;

    bool operator==(const RowKey&) const = default;
};

// Rectangular, row-major, rows sorted by measurement instant (ties broken by
// project then PR number) as required by time-series CV.
struct FeatureMatrix {
    Role role = Role::MAINTAINER;
    std::vector<std::string> feature_names;
    std::vector<FeatureScale> feature_scales;
    std::vector<RowKey> rows;
    std::vector<double> values;
    std::vector<LatencyClass> labels;

    std::size_t n_rows() const { return rows.size(); }
    std::size_t n_cols() const { return feature_names.size(); }
    double at(std::size_t r, std::size_t c) const { return values[r * n_cols() + c]; }
    double& at(std::size_t r, std::size_t c) { return values[r * n_cols() + c]; }
    std::span<const double> row(std::size_t r) const {
        return {values.data() + r * n_cols(), n_cols()};
    }

    std::vector<double> column(std::size_t c) const;
    std::optional<std::size_t> column_index(const std::string& name) const;

    void append_row(RowKey key, std::span<const double> vals, LatencyClass label);
    void sort_rows_by_instant();
    FeatureMatrix select_rows(std::span<const std::size_t> idx) const;
    FeatureMatrix drop_columns(const std::vector<std::size_t>& cols) const;
};

struct ExclusionCounts {
    std::int64_t bot_authored = 0;
    std::int64_t no_first_response = 0;
    std::int64_t included = 0;
};
using ExclusionReport = std::map<std::string, ExclusionCounts>;  // per project

// ---------------------------------------------------------------------------
// Extraction context
// ---------------------------------------------------------------------------

// Immutable per-dataset index answering "as of instant t" queries. Every
// answer is computed exclusively from events at or before t, which makes
// feature extraction leak-free by construction.
class FeatureContext {
  public:
    FeatureContext(const Dataset& dataset, const MaintainerLedger& ledger,
                   const BotRegistry& bots);
    ~FeatureContext();
    FeatureContext(FeatureContext&&) noexcept;

    const MaintainerLedger& ledger() const;
    const BotRegistry& bots() const;

    // Project-scoped queries; t is always the right-inclusive edge.
    std::int64_t prs_created_in(const std::string& project, UtcInstant from_excl,
                                UtcInstant to_incl) const;
    std::int64_t backlog_at(const std::string& project, UtcInstant t) const;
    std::int64_t active_maintainers_in(const std::string& project, UtcInstant from_excl,
                                       UtcInstant to_incl) const;
    std::int64_t active_community_in(const std::string& project, UtcInstant from_excl,
                                     UtcInstant to_incl) const;
    std::optional<double> median_maintainer_latency_in(const std::string& project,
                                                       UtcInstant from_excl,
                                                       UtcInstant to_incl) const;

    // Author history within a project, self excluded, as of t.
    std::int64_t author_prior_prs(const std::string& project, const std::string& author,
                                  std::int64_t self_number, UtcInstant t) const;
    std::optional<double> author_merge_ratio(const std::string& project,
                                             const std::string& author,
                                             std::int64_t self_number, UtcInstant t) const;
    std::optional<double> author_median_response(const std::string& project,
                                                 const std::string& author,
                                                 std::int64_t self_number, UtcInstant t) const;
    std::int64_t author_backlog_at(const std::string& project, const std::string& author,
                                   UtcInstant t) const;

    // Precomputed responses for one PR.
    std::optional<ResponseEvent> maintainer_response(const std::string& project,
                                                     std::int64_t pr_number) const;
    std::optional<ResponseEvent> contributor_response(const std::string& project,
                                                      std::int64_t pr_number) const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// ---------------------------------------------------------------------------
// Extraction
// ---------------------------------------------------------------------------

// Returns nullopt when the role's first response does not exist (no label).
// Raises MissingContext if ctx was built without the PR's project.
std::optional<FeatureVector> extract_features(const PullRequestRecord& pr, Role role,
                                              const FeatureContext& ctx);

// Rows for every non-bot-authored PR with a defined label, time-sorted.
FeatureMatrix build_dataset(const Dataset& dataset, Role role, const FeatureContext& ctx,
                            ExclusionReport* exclusions = nullptr);

// ---------------------------------------------------------------------------
// CSV + sidecar metadata
// ---------------------------------------------------------------------------

void write_matrix_csv(const FeatureMatrix& m, const std::filesystem::path& csv_path,
                      const std::filesystem::path& meta_path,
                      const ExclusionReport* exclusions = nullptr);
FeatureMatrix read_matrix_csv(const std::filesystem::path& csv_path,
                              const std::filesystem::path& meta_path);

std::string format_double(double v);  // shortest round-trip decimal form

}  // namespace prlat
