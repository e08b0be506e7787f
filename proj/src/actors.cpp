#include "prlat/actors.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "prlat/error.hpp"

namespace prlat {

namespace {

std::string to_lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

bool update_earliest(std::map<std::string, UtcInstant>& m, const std::string& actor,
                     UtcInstant t) {
    auto [it, inserted] = m.emplace(actor, t);
    if (!inserted && t < it->second) it->second = t;
    return inserted;
}

std::vector<std::string> read_login_lines(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) raise(ErrorCode::Io, "cannot read " + file.string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        // trim
        auto b = line.find_first_not_of(" \t\r");
        auto e = line.find_last_not_of(" \t\r");
        if (b == std::string::npos) continue;
        lines.push_back(line.substr(b, e - b + 1));
    }
    return lines;
}

}  // namespace

bool is_privileged_kind(EventKind kind) {
    switch (kind) {
        case EventKind::AddedToProject:
        case EventKind::Deployed:
        case EventKind::DeploymentEnvironmentChanged:
        case EventKind::Locked:
        case EventKind::Merged:
        case EventKind::MovedColumnsInProject:
        case EventKind::RemovedFromProject:
        case EventKind::ReviewDismissed:
        case EventKind::Unlocked:
        case EventKind::UserBlocked:
            return true;
        default:
            return false;
    }
}

bool message_resolves_pr(const std::string& message) {
    static const char* keywords[] = {"close", "closes", "closed", "fix",   "fixes",
                                     "fixed", "resolve", "resolves", "resolved"};
    const std::string lower = to_lower(message);
    for (const char* kw : keywords) {
        const std::size_t klen = std::char_traits<char>::length(kw);
        std::size_t pos = 0;
        while ((pos = lower.find(kw, pos)) != std::string::npos) {
            const bool starts_word = pos == 0 || !std::isalnum(static_cast<unsigned char>(lower[pos - 1]));
            std::size_t after = pos + klen;
            if (!starts_word || (after < lower.size() &&
                                 std::isalnum(static_cast<unsigned char>(lower[after])))) {
                pos += 1;
                continue;
            }
            // keyword, then whitespace/colon, then #<digits>
            while (after < lower.size() &&
                   (lower[after] == ' ' || lower[after] == ':' || lower[after] == '\t')) {
                ++after;
            }
            if (after + 1 < lower.size() && lower[after] == '#' &&
                std::isdigit(static_cast<unsigned char>(lower[after + 1]))) {
                return true;
            }
            pos += 1;
        }
    }
    return false;
}

bool login_has_bot_suffix(const std::string& login) {
    const std::string lower = to_lower(login);
    auto ends_with = [&](const std::string& suffix) {
        return lower.size() >= suffix.size() &&
               lower.compare(lower.size() - suffix.size(), suffix.size(), suffix) == 0;
    };
    return ends_with("bot") || ends_with("[bot]");
}

bool is_maintainer_feedback_or_resolution(EventKind kind) {
    switch (kind) {
        case EventKind::Commented:
        case EventKind::Reviewed:
        case EventKind::LineCommented:
        case EventKind::CommitCommented:
        case EventKind::Merged:
        case EventKind::Closed:
        case EventKind::Reopened:
            return true;
        default:
            return false;
    }
}

bool is_contributor_response_kind(EventKind kind) {
    switch (kind) {
        case EventKind::Committed:
        case EventKind::HeadRefForcePushed:
        case EventKind::Commented:
        case EventKind::Reviewed:
        case EventKind::LineCommented:
        case EventKind::CommitCommented:
        case EventKind::Closed:
        case EventKind::Reopened:
            return true;
        default:
            return false;
    }
}

MaintainerLedger build_maintainer_ledger(const Dataset& dataset) {
    MaintainerLedger ledger;
    for (const auto& [slug, prs] : dataset.projects) {
        auto& per_project = ledger.first_privileged[slug];
        for (const auto& pr : prs) {
            for (const auto& ev : pr.events) {
                if (ev.actor_id.empty() || ev.actor_id == kMissingActorId) continue;
                bool privileged = is_privileged_kind(ev.kind);
                if (!privileged && ev.kind == EventKind::Closed &&
                    ev.actor_id != pr.author_id) {
                    privileged = true;  // users can close their own PRs
                }
                if (!privileged &&
                    (ev.kind == EventKind::Committed || ev.kind == EventKind::Closed)) {
                    auto msg = ev.payload.find("message");
                    if (msg != ev.payload.end() && message_resolves_pr(msg->second)) {
                        privileged = true;
                    }
                }
                if (privileged) update_earliest(per_project, ev.actor_id, ev.timestamp);
            }
        }
        if (per_project.empty()) ledger.first_privileged.erase(slug);
    }
    return ledger;
}

BotRegistry build_bot_registry(const Dataset& dataset,
                               const std::vector<std::filesystem::path>& ground_truth_lists,
                               const std::optional<std::filesystem::path>& overrides) {
    BotRegistry reg;

    std::set<std::string> listed;
    for (const auto& file : ground_truth_lists) {
        for (const auto& login : read_login_lines(file)) listed.insert(login);
    }

    std::set<std::string> added, removed;
    if (overrides) {
        for (const auto& line : read_login_lines(*overrides)) {
            if (line.size() < 2 || (line[0] != '+' && line[0] != '-')) {
                raise(ErrorCode::Parse, "override line must start with + or -: " + line);
            }
            (line[0] == '+' ? added : removed).insert(line.substr(1));
        }
    }

    // Actor table from the dataset; override/list entries name either the
    // login or the id.
    std::map<std::string, std::string> login_of;  // actor_id -> login
    auto record_actor = [&](const std::string& actor_id, const std::string& login) {
        if (actor_id.empty() || actor_id == kMissingActorId) return;
        login_of.emplace(actor_id, login);
    };
    for (const auto& [slug, prs] : dataset.projects) {
        for (const auto& pr : prs) {
            record_actor(pr.author_id, pr.author_login);
            for (const auto& ev : pr.events) record_actor(ev.actor_id, ev.actor_login);
        }
    }

    auto named_by = [](const std::set<std::string>& names, const std::string& id,
                       const std::string& login) {
        return names.count(id) != 0 || names.count(login) != 0;
    };

    for (const auto& [actor_id, login] : login_of) {
        if (named_by(removed, actor_id, login)) continue;
        if (named_by(added, actor_id, login)) {
            reg.bots.emplace(actor_id, BotProvenance::ManualOverride);
        } else if (named_by(listed, actor_id, login)) {
            reg.bots.emplace(actor_id, BotProvenance::GroundTruthList);
        } else if (login_has_bot_suffix(login)) {
            reg.bots.emplace(actor_id, BotProvenance::NameSuffix);
        }
    }

    // Overrides for actors not (yet) seen in the dataset still apply by id.
    for (const auto& name : added) {
        bool seen = login_of.count(name) != 0;
        for (const auto& [id, login] : login_of) seen = seen || login == name;
        if (!seen && !removed.count(name)) {
            reg.bots.emplace(name, BotProvenance::ManualOverride);
        }
    }
    reg.allow_listed = removed;
    return reg;
}

std::optional<ResponseEvent> first_maintainer_response(const PullRequestRecord& pr,
                                                       const MaintainerLedger& ledger,
                                                       const BotRegistry& bots) {
    for (const auto& ev : pr.events) {
        if (!is_maintainer_feedback_or_resolution(ev.kind)) continue;
        if (ev.actor_id.empty() || ev.actor_id == kMissingActorId) continue;
        if (ev.actor_id == pr.author_id) continue;
        if (bots.is_bot(ev.actor_id)) continue;
        if (!ledger.is_maintainer_at(pr.project_id, ev.actor_id, ev.timestamp)) continue;
        return ResponseEvent{ev.actor_id, ev.kind, ev.timestamp,
                             hours_between(pr.created_at, ev.timestamp)};
    }
    return std::nullopt;
}

std::optional<ResponseEvent> first_contributor_response(const PullRequestRecord& pr,
                                                        UtcInstant t_ref) {
    for (const auto& ev : pr.events) {
        if (ev.timestamp <= t_ref) continue;
        if (ev.actor_id != pr.author_id) continue;
        if (!is_contributor_response_kind(ev.kind)) continue;
        return ResponseEvent{ev.actor_id, ev.kind, ev.timestamp,
                             hours_between(t_ref, ev.timestamp)};
    }
    return std::nullopt;
}

}  // namespace prlat
