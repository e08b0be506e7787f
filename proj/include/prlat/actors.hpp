#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "prlat/archive.hpp"
#include "prlat/timeline.hpp"

namespace prlat {

// Maintainer status is time-dependent: an actor is a maintainer at instant t
// iff their first privileged event happened at or before t. Ledgers are
// scoped per project; privileged status never transfers across projects.
struct MaintainerLedger {
    std::map<std::string, std::map<std::string, UtcInstant>> first_privileged;

    bool is_maintainer_at(const std::string& project, const std::string& actor_id,
                          UtcInstant t) const {
        auto p = first_privileged.find(project);
        if (p == first_privileged.end()) return false;
        auto a = p->second.find(actor_id);
        return a != p->second.end() && a->second <= t;
    }
};

enum class BotProvenance { GroundTruthList, NameSuffix, ManualOverride };

struct BotRegistry {
    std::map<std::string, BotProvenance> bots;       // actor_id -> provenance
    std::set<std::string> allow_listed;              // "-login" overrides

    bool is_bot(const std::string& actor_id) const {
        return bots.count(actor_id) != 0;
    }
};

struct ResponseEvent {
    std::string actor_id;
    EventKind kind = EventKind::Other;
    UtcInstant timestamp;
    double latency_hours = 0.0;

    bool operator==(const ResponseEvent&) const = default;
};

// Event kinds requiring privileged (write) access on their own.
bool is_privileged_kind(EventKind kind);

// True when a commit/close message resolves a PR through keywords such as
// "fixes #123" (close/closes/closed, fix/fixes/fixed, resolve/resolves/
// resolved, case-insensitive, followed by #<number>).
bool message_resolves_pr(const std::string& message);

// Login-based rule: names ending in "bot" or "[bot]", case-insensitive.
bool login_has_bot_suffix(const std::string& login);

MaintainerLedger build_maintainer_ledger(const Dataset& dataset);

// ground_truth_lists: files with one login per line; overrides: +login adds,
// -login removes; '#' starts a comment in either format. List entries are
// kept only for actors that appear in the dataset; suffix-rule and override
// entries always apply.
BotRegistry build_bot_registry(const Dataset& dataset,
                               const std::vector<std::filesystem::path>& ground_truth_lists,
                               const std::optional<std::filesystem::path>& overrides);

// Earliest feedback (commented/reviewed/line-commented/commit-commented) or
// resolution (merged/closed/reopened) by a non-bot maintainer other than the
// author. Latency is measured in hours from pr.created_at.
std::optional<ResponseEvent> first_maintainer_response(const PullRequestRecord& pr,
                                                       const MaintainerLedger& ledger,
                                                       const BotRegistry& bots);

// Earliest update (committed/head_ref_force_pushed), feedback, or
// closed/reopened resolution by the PR author strictly after t_ref.
// Latency is measured in hours from t_ref.
std::optional<ResponseEvent> first_contributor_response(const PullRequestRecord& pr,
                                                        UtcInstant t_ref);

bool is_maintainer_feedback_or_resolution(EventKind kind);
bool is_contributor_response_kind(EventKind kind);

}  // namespace prlat
