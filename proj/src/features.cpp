#include "prlat/features.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "prlat/error.hpp"

namespace prlat {

using ordered_json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Labels
// ---------------------------------------------------------------------------

LatencyClass label_latency(double hours) {
    if (!(hours >= 0.0)) raise(ErrorCode::Domain, "latency hours must be non-negative");
    if (hours <= 24.0) return LatencyClass::WITHIN_1_DAY;
    if (hours <= 168.0) return LatencyClass::DAY_TO_WEEK;
    return LatencyClass::OVER_WEEK;
}

const char* latency_class_name(LatencyClass c) {
    switch (c) {
        case LatencyClass::WITHIN_1_DAY: return "within_1_day";
        case LatencyClass::DAY_TO_WEEK: return "day_to_week";
        case LatencyClass::OVER_WEEK: return "over_week";
    }
    return "?";
}

std::optional<LatencyClass> parse_latency_class(const std::string& name) {
    if (name == "within_1_day") return LatencyClass::WITHIN_1_DAY;
    if (name == "day_to_week") return LatencyClass::DAY_TO_WEEK;
    if (name == "over_week") return LatencyClass::OVER_WEEK;
    return std::nullopt;
}

const char* role_name(Role role) {
    return role == Role::MAINTAINER ? "maintainer" : "contributor";
}

// ---------------------------------------------------------------------------
// Feature table
// ---------------------------------------------------------------------------

const std::vector<FeatureDef>& feature_table() {
    static const std::vector<FeatureDef> table = {
        {"submission_volume", FeatureScale::Numeric, true, true},
        {"project_backlog", FeatureScale::Numeric, true, true},
        {"maintainers_availability", FeatureScale::Numeric, true, true},
        {"maintainers_responsiveness", FeatureScale::Numeric, true, true},
        {"community_size", FeatureScale::Numeric, true, true},
        {"contributor_experience", FeatureScale::Numeric, true, true},
        {"contributor_performance", FeatureScale::Numeric, true, true},
        {"contributor_backlog", FeatureScale::Numeric, true, true},
        {"contributor_responsiveness", FeatureScale::Numeric, true, true},
        {"description_length", FeatureScale::Numeric, true, true},
        {"commits", FeatureScale::Numeric, true, true},
        {"changed_lines", FeatureScale::Numeric, true, true},
        {"changed_files", FeatureScale::Numeric, true, true},
        {"submission_day", FeatureScale::Weekday, true, false},
        {"submission_hour", FeatureScale::HourOfDay, true, false},
        {"review_day", FeatureScale::Weekday, false, true},
        {"review_hour", FeatureScale::HourOfDay, false, true},
        {"review_latency", FeatureScale::Numeric, false, true},
        {"contributor_activity", FeatureScale::Numeric, false, true},
        {"participants_activity", FeatureScale::Numeric, false, true},
        {"bots_activity", FeatureScale::Numeric, false, true},
    };
    return table;
}

std::vector<FeatureDef> features_for(Role role) {
    std::vector<FeatureDef> out;
    for (const auto& def : feature_table()) {
        if ((role == Role::MAINTAINER && def.for_maintainer) ||
            (role == Role::CONTRIBUTOR && def.for_contributor)) {
            out.push_back(def);
        }
    }
    return out;
}

const std::vector<std::string>& default_keep_priority() {
    // Order of interpretability. The four features the pruning step is
    // expected to drop sit at the tail, below their usual counterparts
    // (commits, contributor_performance, community_size).
    static const std::vector<std::string> priority = {
        "review_latency",
        "commits",
        "description_length",
        "contributor_performance",
        "contributor_responsiveness",
        "contributor_backlog",
        "maintainers_responsiveness",
        "maintainers_availability",
        "community_size",
        "project_backlog",
        "submission_day",
        "submission_hour",
        "review_day",
        "review_hour",
        "contributor_activity",
        "participants_activity",
        "bots_activity",
        "submission_volume",
        "contributor_experience",
        "changed_files",
        "changed_lines",
    };
    return priority;
}

// ---------------------------------------------------------------------------
// Matrix plumbing
// ---------------------------------------------------------------------------

std::vector<double> FeatureMatrix::column(std::size_t c) const {
    std::vector<double> out(n_rows());
    for (std::size_t r = 0; r < n_rows(); ++r) out[r] = at(r, c);
    return out;
}

std::optional<std::size_t> FeatureMatrix::column_index(const std::string& name) const {
    for (std::size_t c = 0; c < feature_names.size(); ++c) {
        if (feature_names[c] == name) return c;
    }
    return std::nullopt;
}

void FeatureMatrix::append_row(RowKey key, std::span<const double> vals, LatencyClass label) {
    if (vals.size() != n_cols()) {
        raise(ErrorCode::FeatureMismatch, "row width " + std::to_string(vals.size()) +
                                              " != " + std::to_string(n_cols()));
    }
    rows.push_back(std::move(key));
    values.insert(values.end(), vals.begin(), vals.end());
    labels.push_back(label);
}

void FeatureMatrix::sort_rows_by_instant() {
    std::vector<std::size_t> idx(n_rows());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        const auto& ra = rows[a];
        const auto& rb = rows[b];
        if (ra.instant != rb.instant) return ra.instant < rb.instant;
        if (ra.project_id != rb.project_id) return ra.project_id < rb.project_id;
        return ra.pr_number < rb.pr_number;
    });
    *this = select_rows(idx);
}

FeatureMatrix FeatureMatrix::select_rows(std::span<const std::size_t> idx) const {
    FeatureMatrix out;
    out.role = role;
    out.feature_names = feature_names;
    out.feature_scales = feature_scales;
    out.rows.reserve(idx.size());
    out.values.reserve(idx.size() * n_cols());
    out.labels.reserve(idx.size());
    for (std::size_t i : idx) {
        out.rows.push_back(rows[i]);
        auto r = row(i);
        out.values.insert(out.values.end(), r.begin(), r.end());
        out.labels.push_back(labels[i]);
    }
    return out;
}

FeatureMatrix FeatureMatrix::drop_columns(const std::vector<std::size_t>& cols) const {
    std::vector<bool> drop(n_cols(), false);
    for (std::size_t c : cols) drop.at(c) = true;
    FeatureMatrix out;
    out.role = role;
    out.rows = rows;
    out.labels = labels;
    for (std::size_t c = 0; c < n_cols(); ++c) {
        if (!drop[c]) {
            out.feature_names.push_back(feature_names[c]);
            out.feature_scales.push_back(feature_scales[c]);
        }
    }
    out.values.reserve(n_rows() * out.feature_names.size());
    for (std::size_t r = 0; r < n_rows(); ++r) {
        for (std::size_t c = 0; c < n_cols(); ++c) {
            if (!drop[c]) out.values.push_back(at(r, c));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Context index
// ---------------------------------------------------------------------------

namespace {

double median_of(std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    if (n % 2 == 1) return v[n / 2];
    return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

struct FeatureContext::Impl {
    struct PrEntry {
        const PullRequestRecord* pr = nullptr;
        std::optional<ResponseEvent> maint_resp;
        std::optional<ResponseEvent> contrib_resp;
        // (instant, closed?) transitions from merged/closed/reopened events
        std::vector<std::pair<std::int64_t, bool>> state_changes;
        std::optional<std::int64_t> first_merge;

        bool resolved_at(std::int64_t t) const {
            auto it = std::upper_bound(
                state_changes.begin(), state_changes.end(), std::make_pair(t, true),
                [](const auto& a, const auto& b) { return a.first < b.first; });
            if (it == state_changes.begin()) return false;
            return std::prev(it)->second;
        }
        bool merged_at(std::int64_t t) const { return first_merge && *first_merge <= t; }
    };

    struct ProjectEntry {
        std::vector<PrEntry> prs;
        std::map<std::int64_t, std::size_t> by_number;
        std::vector<std::int64_t> created_sorted;
        // maintainer responses sorted by response instant
        std::vector<std::pair<std::int64_t, double>> responses;
        std::map<std::string, std::vector<std::size_t>> by_author;
        std::map<std::string, std::vector<std::int64_t>> activity;
    };

    const MaintainerLedger* ledger = nullptr;
    const BotRegistry* bots = nullptr;
    std::map<std::string, ProjectEntry> projects;

    const ProjectEntry& project(const std::string& slug) const {
        auto it = projects.find(slug);
        if (it == projects.end()) {
            raise(ErrorCode::MissingContext, "project not indexed: " + slug);
        }
        return it->second;
    }
};

FeatureContext::FeatureContext(const Dataset& dataset, const MaintainerLedger& ledger,
                               const BotRegistry& bots)
    : impl_(std::make_unique<Impl>()) {
    impl_->ledger = &ledger;
    impl_->bots = &bots;
    for (const auto& [slug, prs] : dataset.projects) {
        auto& entry = impl_->projects[slug];
        entry.prs.reserve(prs.size());
        for (const auto& pr : prs) {
            Impl::PrEntry pe;
            pe.pr = &pr;
            pe.maint_resp = first_maintainer_response(pr, ledger, bots);
            if (pe.maint_resp) {
                pe.contrib_resp = first_contributor_response(pr, pe.maint_resp->timestamp);
            }
            for (const auto& ev : pr.events) {
                if (ev.kind == EventKind::Merged || ev.kind == EventKind::Closed) {
                    pe.state_changes.emplace_back(ev.timestamp.secs, true);
                    if (ev.kind == EventKind::Merged && !pe.first_merge) {
                        pe.first_merge = ev.timestamp.secs;
                    }
                } else if (ev.kind == EventKind::Reopened) {
                    pe.state_changes.emplace_back(ev.timestamp.secs, false);
                }
            }
            const std::size_t idx = entry.prs.size();
            entry.by_number[pr.pr_number] = idx;
            entry.created_sorted.push_back(pr.created_at.secs);
            if (pe.maint_resp) {
                entry.responses.emplace_back(pe.maint_resp->timestamp.secs,
                                             pe.maint_resp->latency_hours);
            }
            entry.by_author[pr.author_id].push_back(idx);
            if (!pr.author_id.empty() && pr.author_id != kMissingActorId) {
                entry.activity[pr.author_id].push_back(pr.created_at.secs);
            }
            for (const auto& ev : pr.events) {
                if (ev.actor_id.empty() || ev.actor_id == kMissingActorId) continue;
                entry.activity[ev.actor_id].push_back(ev.timestamp.secs);
            }
            entry.prs.push_back(std::move(pe));
        }
        std::sort(entry.created_sorted.begin(), entry.created_sorted.end());
        std::sort(entry.responses.begin(), entry.responses.end());
        for (auto& [_, instants] : entry.activity) {
            std::sort(instants.begin(), instants.end());
        }
        for (auto& [_, idxs] : entry.by_author) {
            std::sort(idxs.begin(), idxs.end(), [&](std::size_t a, std::size_t b) {
                return entry.prs[a].pr->created_at < entry.prs[b].pr->created_at;
            });
        }
    }
}

FeatureContext::~FeatureContext() = default;
FeatureContext::FeatureContext(FeatureContext&&) noexcept = default;

const MaintainerLedger& FeatureContext::ledger() const { return *impl_->ledger; }
const BotRegistry& FeatureContext::bots() const { return *impl_->bots; }

std::int64_t FeatureContext::prs_created_in(const std::string& project, UtcInstant from_excl,
                                            UtcInstant to_incl) const {
    const auto& p = impl_->project(project);
    auto lo = std::upper_bound(p.created_sorted.begin(), p.created_sorted.end(),
                               from_excl.secs);
    auto hi = std::upper_bound(p.created_sorted.begin(), p.created_sorted.end(),
                               to_incl.secs);
    return hi - lo;
}

std::int64_t FeatureContext::backlog_at(const std::string& project, UtcInstant t) const {
    const auto& p = impl_->project(project);
    std::int64_t count = 0;
    for (const auto& pe : p.prs) {
        if (pe.pr->created_at.secs < t.secs && !pe.resolved_at(t.secs)) ++count;
    }
    return count;
}

namespace {

bool any_in_window(const std::vector<std::int64_t>& sorted, std::int64_t from_excl,
                   std::int64_t to_incl) {
    auto it = std::upper_bound(sorted.begin(), sorted.end(), from_excl);
    return it != sorted.end() && *it <= to_incl;
}

}  // namespace

std::int64_t FeatureContext::active_maintainers_in(const std::string& project,
                                                   UtcInstant from_excl,
                                                   UtcInstant to_incl) const {
    const auto& p = impl_->project(project);
    std::int64_t count = 0;
    for (const auto& [actor, instants] : p.activity) {
        if (impl_->bots->is_bot(actor)) continue;
        if (!impl_->ledger->is_maintainer_at(project, actor, to_incl)) continue;
        if (any_in_window(instants, from_excl.secs, to_incl.secs)) ++count;
    }
    return count;
}

std::int64_t FeatureContext::active_community_in(const std::string& project,
                                                 UtcInstant from_excl,
                                                 UtcInstant to_incl) const {
    const auto& p = impl_->project(project);
    std::int64_t count = 0;
    for (const auto& [actor, instants] : p.activity) {
        if (impl_->bots->is_bot(actor)) continue;
        if (impl_->ledger->is_maintainer_at(project, actor, to_incl)) continue;
        if (any_in_window(instants, from_excl.secs, to_incl.secs)) ++count;
    }
    return count;
}

std::optional<double> FeatureContext::median_maintainer_latency_in(const std::string& project,
                                                                   UtcInstant from_excl,
                                                                   UtcInstant to_incl) const {
    const auto& p = impl_->project(project);
    auto lo = std::upper_bound(p.responses.begin(), p.responses.end(),
                               std::make_pair(from_excl.secs, std::numeric_limits<double>::max()));
    std::vector<double> latencies;
    for (auto it = lo; it != p.responses.end() && it->first <= to_incl.secs; ++it) {
        latencies.push_back(it->second);
    }
    if (latencies.empty()) return std::nullopt;
    return median_of(latencies);
}

std::int64_t FeatureContext::author_prior_prs(const std::string& project,
                                              const std::string& author,
                                              std::int64_t self_number, UtcInstant t) const {
    const auto& p = impl_->project(project);
    auto it = p.by_author.find(author);
    if (it == p.by_author.end()) return 0;
    std::int64_t count = 0;
    for (std::size_t idx : it->second) {
        const auto& pe = p.prs[idx];
        if (pe.pr->pr_number == self_number) continue;
        if (pe.pr->created_at.secs < t.secs) ++count;
    }
    return count;
}

std::optional<double> FeatureContext::author_merge_ratio(const std::string& project,
                                                         const std::string& author,
                                                         std::int64_t self_number,
                                                         UtcInstant t) const {
    const auto& p = impl_->project(project);
    auto it = p.by_author.find(author);
    if (it == p.by_author.end()) return std::nullopt;
    std::int64_t resolved = 0, merged = 0;
    for (std::size_t idx : it->second) {
        const auto& pe = p.prs[idx];
        if (pe.pr->pr_number == self_number || pe.pr->created_at.secs >= t.secs) continue;
        if (!pe.resolved_at(t.secs)) continue;
        ++resolved;
        if (pe.merged_at(t.secs)) ++merged;
    }
    if (resolved == 0) return std::nullopt;
    return static_cast<double>(merged) / static_cast<double>(resolved);
}

std::optional<double> FeatureContext::author_median_response(const std::string& project,
                                                             const std::string& author,
                                                             std::int64_t self_number,
                                                             UtcInstant t) const {
    const auto& p = impl_->project(project);
    auto it = p.by_author.find(author);
    if (it == p.by_author.end()) return std::nullopt;
    std::vector<double> latencies;
    for (std::size_t idx : it->second) {
        const auto& pe = p.prs[idx];
        if (pe.pr->pr_number == self_number || pe.pr->created_at.secs >= t.secs) continue;
        if (pe.contrib_resp && pe.contrib_resp->timestamp.secs <= t.secs) {
            latencies.push_back(pe.contrib_resp->latency_hours);
        }
    }
    if (latencies.empty()) return std::nullopt;
    return median_of(latencies);
}

std::int64_t FeatureContext::author_backlog_at(const std::string& project,
                                               const std::string& author, UtcInstant t) const {
    const auto& p = impl_->project(project);
    auto it = p.by_author.find(author);
    if (it == p.by_author.end()) return 0;
    std::int64_t count = 0;
    for (std::size_t idx : it->second) {
        const auto& pe = p.prs[idx];
        if (pe.pr->created_at.secs < t.secs && !pe.resolved_at(t.secs)) ++count;
    }
    return count;
}

std::optional<ResponseEvent> FeatureContext::maintainer_response(const std::string& project,
                                                                 std::int64_t pr_number) const {
    const auto& p = impl_->project(project);
    auto it = p.by_number.find(pr_number);
    if (it == p.by_number.end()) return std::nullopt;
    return p.prs[it->second].maint_resp;
}

std::optional<ResponseEvent> FeatureContext::contributor_response(const std::string& project,
                                                                  std::int64_t pr_number) const {
    const auto& p = impl_->project(project);
    auto it = p.by_number.find(pr_number);
    if (it == p.by_number.end()) return std::nullopt;
    return p.prs[it->second].contrib_resp;
}

// ---------------------------------------------------------------------------
// Extraction
// ---------------------------------------------------------------------------

std::optional<FeatureVector> extract_features(const PullRequestRecord& pr, Role role,
                                              const FeatureContext& ctx) {
    const auto maint = ctx.maintainer_response(pr.project_id, pr.pr_number);
    if (!maint) return std::nullopt;

    UtcInstant t;
    double label_hours = 0.0;
    if (role == Role::MAINTAINER) {
        t = pr.created_at;
        label_hours = maint->latency_hours;
    } else {
        const auto contrib = ctx.contributor_response(pr.project_id, pr.pr_number);
        if (!contrib) return std::nullopt;
        t = maint->timestamp;
        label_hours = contrib->latency_hours;
    }
    const UtcInstant window_start{t.secs - kHistoryWindowSecs};

    std::int64_t commits = 0, lines = 0, files = 0;
    for (const auto& cs : pr.commit_stats) {
        if (cs.timestamp.secs > t.secs) break;  // sorted
        ++commits;
        lines += cs.lines_changed;
        files += cs.files_changed;
    }

    FeatureVector fv;
    fv.project_id = pr.project_id;
    fv.pr_number = pr.pr_number;
    fv.role = role;
    fv.measurement_instant = t;
    fv.label = label_latency(label_hours);

    auto opt_value = [](std::optional<double> v) { return v ? *v : missing_value(); };

    for (const auto& def : features_for(role)) {
        double v = 0.0;
        if (def.name == "submission_volume") {
            v = static_cast<double>(ctx.prs_created_in(pr.project_id, window_start, t));
        } else if (def.name == "project_backlog") {
            v = static_cast<double>(ctx.backlog_at(pr.project_id, t));
        } else if (def.name == "maintainers_availability") {
            v = static_cast<double>(ctx.active_maintainers_in(pr.project_id, window_start, t));
        } else if (def.name == "maintainers_responsiveness") {
            v = opt_value(ctx.median_maintainer_latency_in(pr.project_id, window_start, t));
        } else if (def.name == "community_size") {
            v = static_cast<double>(ctx.active_community_in(pr.project_id, window_start, t));
        } else if (def.name == "contributor_experience") {
            v = static_cast<double>(
                ctx.author_prior_prs(pr.project_id, pr.author_id, pr.pr_number, t));
        } else if (def.name == "contributor_performance") {
            v = opt_value(ctx.author_merge_ratio(pr.project_id, pr.author_id, pr.pr_number, t));
        } else if (def.name == "contributor_backlog") {
            v = static_cast<double>(ctx.author_backlog_at(pr.project_id, pr.author_id, t));
        } else if (def.name == "contributor_responsiveness") {
            v = opt_value(
                ctx.author_median_response(pr.project_id, pr.author_id, pr.pr_number, t));
        } else if (def.name == "description_length") {
            v = static_cast<double>(description_words(pr));
        } else if (def.name == "commits") {
            v = static_cast<double>(commits);
        } else if (def.name == "changed_lines") {
            v = static_cast<double>(lines);
        } else if (def.name == "changed_files") {
            v = static_cast<double>(files);
        } else if (def.name == "submission_day") {
            v = static_cast<double>(weekday_utc(pr.created_at));
        } else if (def.name == "submission_hour") {
            v = static_cast<double>(hour_utc(pr.created_at));
        } else if (def.name == "review_day") {
            v = static_cast<double>(weekday_utc(t));
        } else if (def.name == "review_hour") {
            v = static_cast<double>(hour_utc(t));
        } else if (def.name == "review_latency") {
            v = maint->latency_hours;
        } else if (def.name == "contributor_activity" ||
                   def.name == "participants_activity" || def.name == "bots_activity") {
            std::int64_t n = 0;
            for (const auto& ev : pr.events) {
                if (ev.timestamp.secs <= pr.created_at.secs || ev.timestamp.secs > t.secs) {
                    continue;
                }
                const bool is_author = ev.actor_id == pr.author_id;
                const bool is_bot = ctx.bots().is_bot(ev.actor_id);
                if (def.name == "contributor_activity") {
                    if (is_author) ++n;
                } else if (def.name == "bots_activity") {
                    if (is_bot) ++n;
                } else {
                    if (is_author || is_bot) continue;
                    if (ev.actor_id.empty() || ev.actor_id == kMissingActorId) continue;
                    if (ctx.ledger().is_maintainer_at(pr.project_id, ev.actor_id,
                                                      ev.timestamp)) {
                        continue;
                    }
                    ++n;
                }
            }
            v = static_cast<double>(n);
        } else {
            raise(ErrorCode::FeatureMismatch, "unknown feature " + def.name);
        }
        fv.values.push_back(v);
    }
    return fv;
}

FeatureMatrix build_dataset(const Dataset& dataset, Role role, const FeatureContext& ctx,
                            ExclusionReport* exclusions) {
    FeatureMatrix m;
    m.role = role;
    for (const auto& def : features_for(role)) {
        m.feature_names.push_back(def.name);
        m.feature_scales.push_back(def.scale);
    }
    for (const auto& [slug, prs] : dataset.projects) {
        ExclusionCounts counts;
        for (const auto& pr : prs) {
            if (ctx.bots().is_bot(pr.author_id)) {
                ++counts.bot_authored;
                continue;
            }
            auto fv = extract_features(pr, role, ctx);
            if (!fv) {
                ++counts.no_first_response;
                continue;
            }
            m.append_row({fv->project_id, fv->pr_number, fv->measurement_instant},
                         fv->values, fv->label);
            ++counts.included;
        }
        if (exclusions) (*exclusions)[slug] = counts;
    }
    m.sort_rows_by_instant();
    return m;
}

// ---------------------------------------------------------------------------
// CSV + metadata
// ---------------------------------------------------------------------------

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) raise(ErrorCode::Domain, "unformattable double");
    return std::string(buf, ptr);
}

void write_matrix_csv(const FeatureMatrix& m, const std::filesystem::path& csv_path,
                      const std::filesystem::path& meta_path,
                      const ExclusionReport* exclusions) {
    std::ofstream out(csv_path, std::ios::binary | std::ios::trunc);
    if (!out) raise(ErrorCode::Io, "cannot write " + csv_path.string());
    out << "project,pr_number,measurement_instant";
    for (const auto& name : m.feature_names) out << ',' << name;
    out << ",label\n";
    for (std::size_t r = 0; r < m.n_rows(); ++r) {
        const auto& key = m.rows[r];
        out << key.project_id << ',' << key.pr_number << ','
            << format_iso8601(key.instant);
        for (std::size_t c = 0; c < m.n_cols(); ++c) {
            double v = m.at(r, c);
            out << ',' << (is_missing(v) ? std::string("MISSING") : format_double(v));
        }
        out << ',' << latency_class_name(m.labels[r]) << '\n';
    }
    if (!out.flush()) raise(ErrorCode::Io, "write failed for " + csv_path.string());

    ordered_json meta;
    meta["schema_version"] = kArchiveSchemaVersion;
    meta["role"] = role_name(m.role);
    meta["feature_names"] = m.feature_names;
    auto scales = ordered_json::array();
    for (auto s : m.feature_scales) {
        scales.push_back(s == FeatureScale::Weekday   ? "weekday"
                         : s == FeatureScale::HourOfDay ? "hour_of_day"
                                                        : "numeric");
    }
    meta["feature_scales"] = std::move(scales);
    meta["rows"] = m.n_rows();
    if (exclusions) {
        ordered_json ex;
        for (const auto& [slug, counts] : *exclusions) {
            ex[slug] = {{"bot_authored", counts.bot_authored},
                        {"no_first_response", counts.no_first_response},
                        {"included", counts.included}};
        }
        meta["exclusions"] = std::move(ex);
    }
    std::ofstream meta_out(meta_path, std::ios::binary | std::ios::trunc);
    if (!meta_out) raise(ErrorCode::Io, "cannot write " + meta_path.string());
    meta_out << meta.dump(2) << '\n';
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

double parse_value(const std::string& s) {
    if (s == "MISSING") return missing_value();
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        raise(ErrorCode::Parse, "bad numeric value: " + s);
    }
    return v;
}

}  // namespace

FeatureMatrix read_matrix_csv(const std::filesystem::path& csv_path,
                              const std::filesystem::path& meta_path) {
    std::ifstream meta_in(meta_path, std::ios::binary);
    if (!meta_in) raise(ErrorCode::Io, "cannot read " + meta_path.string());
    ordered_json meta;
    try {
        meta_in >> meta;
    } catch (const std::exception& e) {
        raise(ErrorCode::Parse, "metadata unparseable: " + std::string(e.what()));
    }
    if (meta.value("schema_version", -1) != kArchiveSchemaVersion) {
        raise(ErrorCode::SchemaMismatch, "unrecognized feature metadata version");
    }

    FeatureMatrix m;
    m.role = meta.at("role").get<std::string>() == "contributor" ? Role::CONTRIBUTOR
                                                                 : Role::MAINTAINER;
    m.feature_names = meta.at("feature_names").get<std::vector<std::string>>();
    for (const auto& s : meta.at("feature_scales")) {
        const auto text = s.get<std::string>();
        m.feature_scales.push_back(text == "weekday"       ? FeatureScale::Weekday
                                   : text == "hour_of_day" ? FeatureScale::HourOfDay
                                                           : FeatureScale::Numeric);
    }

    std::ifstream in(csv_path, std::ios::binary);
    if (!in) raise(ErrorCode::Io, "cannot read " + csv_path.string());
    std::string line;
    if (!std::getline(in, line)) raise(ErrorCode::Parse, "empty CSV " + csv_path.string());
    const auto header = split_csv_line(line);
    if (header.size() != m.feature_names.size() + 4) {
        raise(ErrorCode::SchemaMismatch, "CSV header width mismatch");
    }
    for (std::size_t c = 0; c < m.feature_names.size(); ++c) {
        if (header[c + 3] != m.feature_names[c]) {
            raise(ErrorCode::SchemaMismatch, "CSV column order mismatch at " + header[c + 3]);
        }
    }
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != header.size()) raise(ErrorCode::Parse, "ragged CSV row");
        RowKey key;
        key.project_id = fields[0];
        key.pr_number = std::stoll(fields[1]);
        auto t = parse_iso8601(fields[2]);
        if (!t) raise(ErrorCode::Parse, "bad instant " + fields[2]);
        key.instant = *t;
        std::vector<double> vals;
        vals.reserve(m.feature_names.size());
        for (std::size_t c = 0; c < m.feature_names.size(); ++c) {
            vals.push_back(parse_value(fields[c + 3]));
        }
        auto label = parse_latency_class(fields.back());
        if (!label) raise(ErrorCode::Parse, "bad label " + fields.back());
        m.append_row(std::move(key), vals, *label);
    }
    m.sort_rows_by_instant();
    return m;
}

}  // namespace prlat
