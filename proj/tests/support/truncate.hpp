#pragma once

// Dataset truncation used by anti-leakage tests: drop every event and commit
// stat after instant t across the whole dataset. The PR under re-extraction
// keeps the pieces that merely define its label (never feature values): its
// first-response events and, for the maintainer role, the responder's
// earliest privilege witness (which may postdate t when the responder earned
// maintainer status between t and the response).

#include <optional>

#include "prlat/actors.hpp"
#include "prlat/archive.hpp"
#include "prlat/features.hpp"

namespace prlat::testsupport {

struct WitnessEvent {
    std::int64_t pr_number = 0;
    TimelineEvent event;
};

// Earliest event that makes `actor` privileged in the project, by brute force.
inline std::optional<WitnessEvent> find_privilege_witness(const Dataset& ds,
                                                          const std::string& project,
                                                          const std::string& actor) {
    std::optional<WitnessEvent> best;
    auto it = ds.projects.find(project);
    if (it == ds.projects.end()) return best;
    for (const auto& pr : it->second) {
        for (const auto& ev : pr.events) {
            if (ev.actor_id != actor) continue;
            bool privileged = is_privileged_kind(ev.kind);
            if (!privileged && ev.kind == EventKind::Closed && ev.actor_id != pr.author_id) {
                privileged = true;
            }
            if (!privileged &&
                (ev.kind == EventKind::Committed || ev.kind == EventKind::Closed)) {
                auto msg = ev.payload.find("message");
                privileged = msg != ev.payload.end() && message_resolves_pr(msg->second);
            }
            if (privileged && (!best || ev.timestamp < best->event.timestamp)) {
                best = WitnessEvent{pr.pr_number, ev};
            }
        }
    }
    return best;
}

inline Dataset truncate_dataset_at(const Dataset& ds, const FeatureContext& ctx,
                                   UtcInstant t, const std::string& keep_project,
                                   std::int64_t keep_number) {
    const auto maint = ctx.maintainer_response(keep_project, keep_number);
    const auto contrib = ctx.contributor_response(keep_project, keep_number);
    std::optional<WitnessEvent> witness;
    if (maint && maint->timestamp > t) {
        witness = find_privilege_witness(ds, keep_project, maint->actor_id);
    }

    Dataset out;
    for (const auto& [slug, prs] : ds.projects) {
        for (const auto& pr : prs) {
            PullRequestRecord copy = pr;
            copy.events.clear();
            copy.commit_stats.clear();
            for (const auto& ev : pr.events) {
                if (ev.timestamp <= t) copy.events.push_back(ev);
            }
            for (const auto& cs : pr.commit_stats) {
                if (cs.timestamp <= t) copy.commit_stats.push_back(cs);
            }
            if (slug == keep_project && pr.pr_number == keep_number) {
                auto keep_marker = [&](const std::optional<ResponseEvent>& resp) {
                    if (!resp || resp->timestamp <= t) return;
                    for (const auto& ev : pr.events) {
                        if (ev.timestamp == resp->timestamp && ev.actor_id == resp->actor_id &&
                            ev.kind == resp->kind) {
                            copy.events.push_back(ev);
                            break;
                        }
                    }
                };
                keep_marker(maint);
                keep_marker(contrib);
            }
            if (witness && slug == keep_project && pr.pr_number == witness->pr_number &&
                witness->event.timestamp > t) {
                copy.events.push_back(witness->event);
            }
            normalize_record(copy);
            out.projects[slug].push_back(std::move(copy));
        }
    }
    return out;
}

}  // namespace prlat::testsupport
