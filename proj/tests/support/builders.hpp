#pragma once

// Small helpers for constructing records in tests.

#include <string>
#include <vector>

#include "prlat/archive.hpp"
#include "prlat/timeline.hpp"

namespace prlat::testsupport {

inline UtcInstant at_hours(double h) {
    return UtcInstant{static_cast<std::int64_t>(h * 3600.0)};
}

inline TimelineEvent event(EventKind kind, std::string actor, UtcInstant ts,
                           std::map<std::string, std::string> payload = {}) {
    TimelineEvent ev;
    ev.kind = kind;
    ev.actor_id = actor;
    ev.actor_login = std::move(actor);
    ev.timestamp = ts;
    ev.payload = std::move(payload);
    return ev;
}

inline PullRequestRecord make_pr(std::string project, std::int64_t number,
                                 std::string author, UtcInstant created,
                                 std::vector<TimelineEvent> events = {}) {
    PullRequestRecord pr;
    pr.project_id = std::move(project);
    pr.pr_number = number;
    pr.author_id = author;
    pr.author_login = std::move(author);
    pr.title = "PR " + std::to_string(number);
    pr.body = "";
    pr.created_at = created;
    pr.events = std::move(events);
    normalize_record(pr);
    return pr;
}

inline Dataset make_dataset(std::vector<PullRequestRecord> prs) {
    Dataset ds;
    for (auto& pr : prs) ds.projects[pr.project_id].push_back(std::move(pr));
    return ds;
}

}  // namespace prlat::testsupport
