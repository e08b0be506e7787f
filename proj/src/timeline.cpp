#include "prlat/timeline.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <utility>

namespace prlat {

namespace {

constexpr std::array<std::pair<EventKind, const char*>, 18> kKindNames{{
    {EventKind::Commented, "commented"},
    {EventKind::Reviewed, "reviewed"},
    {EventKind::LineCommented, "line-commented"},
    {EventKind::CommitCommented, "commit-commented"},
    {EventKind::Committed, "committed"},
    {EventKind::HeadRefForcePushed, "head_ref_force_pushed"},
    {EventKind::Merged, "merged"},
    {EventKind::Closed, "closed"},
    {EventKind::Reopened, "reopened"},
    {EventKind::Locked, "locked"},
    {EventKind::Unlocked, "unlocked"},
    {EventKind::AddedToProject, "added_to_project"},
    {EventKind::RemovedFromProject, "removed_from_project"},
    {EventKind::MovedColumnsInProject, "moved_columns_in_project"},
    {EventKind::Deployed, "deployed"},
    {EventKind::DeploymentEnvironmentChanged, "deployment_environment_changed"},
    {EventKind::ReviewDismissed, "review_dismissed"},
    {EventKind::UserBlocked, "user_blocked"},
}};

}  // namespace

EventKind parse_event_kind(const std::string& raw) {
    for (const auto& [kind, name] : kKindNames) {
        if (raw == name) return kind;
    }
    return EventKind::Other;
}

const char* event_kind_name(EventKind kind) {
    for (const auto& [k, name] : kKindNames) {
        if (k == kind) return name;
    }
    return "other";
}

const std::string& TimelineEvent::kind_name() const {
    if (kind == EventKind::Other) return raw_kind;
    static thread_local std::string scratch;
    scratch = event_kind_name(kind);
    return scratch;
}

void normalize_record(PullRequestRecord& pr) {
    const UtcInstant floor{pr.created_at.secs - kClockSkewAllowanceSecs};
    for (auto& ev : pr.events) {
        if (ev.timestamp < floor) {
            ev.timestamp = pr.created_at;
            pr.skew_clamped = true;
        }
    }
    for (auto& cs : pr.commit_stats) {
        if (cs.timestamp < floor) {
            cs.timestamp = pr.created_at;
            pr.skew_clamped = true;
        }
    }
    std::stable_sort(pr.events.begin(), pr.events.end(),
                     [](const TimelineEvent& a, const TimelineEvent& b) {
                         return a.timestamp < b.timestamp;
                     });
    std::stable_sort(pr.commit_stats.begin(), pr.commit_stats.end(),
                     [](const CommitStat& a, const CommitStat& b) {
                         return a.timestamp < b.timestamp;
                     });
}

std::int64_t description_words(const PullRequestRecord& pr) {
    std::int64_t count = 0;
    bool in_word = false;
    auto scan = [&](const std::string& text) {
        for (char c : text) {
            if (std::isspace(static_cast<unsigned char>(c))) {
                in_word = false;
            } else if (!in_word) {
                in_word = true;
                ++count;
            }
        }
        in_word = false;  // title/body boundary never joins words
    };
    scan(pr.title);
    scan(pr.body);
    return count;
}

}  // namespace prlat
