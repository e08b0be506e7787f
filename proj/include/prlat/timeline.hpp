#pragma once

#include <map>
#include <string>
#include <vector>

#include "prlat/time.hpp"

namespace prlat {

// Timeline event kinds observed on pull requests. Kinds outside this list
// are preserved verbatim through the Other catch-all so that archives never
// lose information.
enum class EventKind {
    Commented,
    Reviewed,
    LineCommented,
    CommitCommented,
    Committed,
    HeadRefForcePushed,
    Merged,
    Closed,
    Reopened,
    Locked,
    Unlocked,
    AddedToProject,
    RemovedFromProject,
    MovedColumnsInProject,
    Deployed,
    DeploymentEnvironmentChanged,
    ReviewDismissed,
    UserBlocked,
    Other,
};

// Raw wire name <-> kind. parse_event_kind returns {Other, raw} for unknown
// names; event_kind_name(Other) needs the stored raw name.
EventKind parse_event_kind(const std::string& raw);
const char* event_kind_name(EventKind kind);

// Actor id used when the API reports no actor (deleted accounts). Such
// events are kept but never classify as maintainer or bot activity.
inline const std::string kMissingActorId = "<deleted>";

struct TimelineEvent {
    EventKind kind = EventKind::Other;
    std::string raw_kind;  // set when kind == Other
    std::string actor_id;
    std::string actor_login;
    UtcInstant timestamp;
    std::map<std::string, std::string> payload;

    const std::string& kind_name() const;

    bool operator==(const TimelineEvent&) const = default;
};

struct CommitStat {
    UtcInstant timestamp;
    std::int64_t lines_changed = 0;
    std::int64_t files_changed = 0;

    bool operator==(const CommitStat&) const = default;
};

struct PullRequestRecord {
    std::string project_id;  // owner/name slug
    std::int64_t pr_number = 0;
    std::string author_id;
    std::string author_login;
    std::string title;
    std::string body;
    UtcInstant created_at;
    std::vector<TimelineEvent> events;       // sorted by (timestamp, insertion)
    std::vector<CommitStat> commit_stats;    // sorted by timestamp
    bool skew_clamped = false;  // some event predated created_at by >60s

    bool operator==(const PullRequestRecord&) const = default;
};

// Sorts events/commits and clamps timestamps more than 60 s before
// created_at to created_at, flagging the record. Clock skew inside the
// allowance is left untouched.
inline constexpr std::int64_t kClockSkewAllowanceSecs = 60;
void normalize_record(PullRequestRecord& pr);

// Word count of title + body, split on whitespace.
std::int64_t description_words(const PullRequestRecord& pr);

}  // namespace prlat
