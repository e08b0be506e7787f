#include <doctest.h>

#include <fstream>

#include "prlat/actors.hpp"
#include "support/builders.hpp"
#include "support/fuzz.hpp"
#include "support/oracles.hpp"
#include "support/tempdir.hpp"

using namespace prlat;
using namespace prlat::testsupport;
namespace fs = std::filesystem;

TEST_CASE("ledger: commenters never appear, earliest privileged event wins") {
    auto ds = make_dataset({
        make_pr("o/r", 1, "alice",
                at_hours(0),
                {event(EventKind::Commented, "carol", at_hours(1)),
                 event(EventKind::Merged, "bob", at_hours(2)),
                 event(EventKind::Locked, "bob", at_hours(5))}),
    });
    auto ledger = build_maintainer_ledger(ds);
    const auto& m = ledger.first_privileged.at("o/r");
    CHECK(m.count("carol") == 0);
    REQUIRE(m.count("bob") == 1);
    CHECK(m.at("bob") == at_hours(2));
}

TEST_CASE("ledger: closing your own PR is not privileged, closing another's is") {
    auto ds = make_dataset({
        make_pr("o/r", 1, "alice", at_hours(0),
                {event(EventKind::Closed, "alice", at_hours(1))}),
        make_pr("o/r", 2, "alice", at_hours(10),
                {event(EventKind::Closed, "dave", at_hours(12))}),
    });
    auto ledger = build_maintainer_ledger(ds);
    const auto& m = ledger.first_privileged.at("o/r");
    CHECK(m.count("alice") == 0);
    REQUIRE(m.count("dave") == 1);
    CHECK(m.at("dave") == at_hours(12));
}

TEST_CASE("ledger: merge-via-commit-message keywords are privileged") {
    CHECK(message_resolves_pr("resolves #123"));
    CHECK(message_resolves_pr("Fixes #4 and more"));
    CHECK(message_resolves_pr("FIX: closes   #77"));
    CHECK_FALSE(message_resolves_pr("fixed a typo"));
    CHECK_FALSE(message_resolves_pr("prefixes #12"));
    CHECK_FALSE(message_resolves_pr("resolves issue 12"));

    auto ds = make_dataset({
        make_pr("o/r", 1, "alice", at_hours(0),
                {event(EventKind::Committed, "erin", at_hours(3),
                       {{"message", "resolves #123"}})}),
    });
    auto ledger = build_maintainer_ledger(ds);
    CHECK(ledger.first_privileged.at("o/r").count("erin") == 1);
}

TEST_CASE("ledger monotonicity under added events") {
    auto rng = make_rng(41);
    for (int trial = 0; trial < 30; ++trial) {
        auto ds = fuzz_project(rng, 6, 20);
        auto base = build_maintainer_ledger(ds);

        // add a later privileged event for a known actor: values must not change
        auto& pr0 = ds.projects.begin()->second.front();
        pr0.events.push_back(event(EventKind::Merged, "user0",
                                   UtcInstant{pr0.created_at.secs + 400 * 86400}));
        normalize_record(pr0);
        auto later = build_maintainer_ledger(ds);
        for (const auto& [proj, actors] : base.first_privileged) {
            for (const auto& [actor, t] : actors) {
                CHECK(later.first_privileged.at(proj).at(actor) == t);
            }
        }

        // add an earlier one: value must not increase
        pr0.events.push_back(event(EventKind::Merged, "user0", pr0.created_at));
        normalize_record(pr0);
        auto earlier = build_maintainer_ledger(ds);
        CHECK(earlier.first_privileged.at(pr0.project_id).at("user0") <=
              later.first_privileged.at(pr0.project_id).at("user0"));
    }
}

TEST_CASE("bot registry: suffix rule, list provenance, overrides") {
    auto ds = make_dataset({
        make_pr("o/r", 1, "dependabot[bot]", at_hours(0),
                {event(EventKind::Commented, "talbot", at_hours(1)),
                 event(EventKind::Commented, "ci-helper", at_hours(2)),
                 event(EventKind::Commented, "alice", at_hours(3))}),
    });
    TempFile list("# ground truth\nci-helper\n");
    TempFile overrides("-talbot\n+alice\n");
    auto reg = build_bot_registry(ds, {list.path}, overrides.path);

    REQUIRE(reg.is_bot("dependabot[bot]"));
    CHECK(reg.bots.at("dependabot[bot]") == BotProvenance::NameSuffix);
    REQUIRE(reg.is_bot("ci-helper"));
    CHECK(reg.bots.at("ci-helper") == BotProvenance::GroundTruthList);
    CHECK_FALSE(reg.is_bot("talbot"));  // -override beats the suffix rule
    REQUIRE(reg.is_bot("alice"));
    CHECK(reg.bots.at("alice") == BotProvenance::ManualOverride);
}

TEST_CASE("bot suffix rule is strict: only bot / [bot] endings") {
    CHECK(login_has_bot_suffix("dependabot[bot]"));
    CHECK(login_has_bot_suffix("RoBot"));
    CHECK(login_has_bot_suffix("talbot"));  // suffix rule is textual; overrides fix it
    CHECK_FALSE(login_has_bot_suffix("bot-helper"));
    CHECK_FALSE(login_has_bot_suffix("robotic"));
}

TEST_CASE("first maintainer response skips bots, author, and future maintainers") {
    MaintainerLedger ledger;
    ledger.first_privileged["o/r"] = {{"maint", at_hours(-100)},
                                      {"alice", at_hours(-100)},
                                      {"late", at_hours(100)}};
    BotRegistry bots;
    bots.bots["helper-bot"] = BotProvenance::NameSuffix;

    SUBCASE("bot comment ignored") {
        auto pr = make_pr("o/r", 1, "alice", at_hours(0),
                          {event(EventKind::Commented, "helper-bot", at_hours(0.1)),
                           event(EventKind::Commented, "maint", at_hours(5.0))});
        auto r = first_maintainer_response(pr, ledger, bots);
        REQUIRE(r);
        CHECK(r->actor_id == "maint");
        CHECK(r->latency_hours == doctest::Approx(5.0));
    }

    SUBCASE("author who is also a maintainer does not count") {
        auto pr = make_pr("o/r", 2, "alice", at_hours(0),
                          {event(EventKind::Commented, "alice", at_hours(1.0)),
                           event(EventKind::Reviewed, "maint", at_hours(30.0))});
        auto r = first_maintainer_response(pr, ledger, bots);
        REQUIRE(r);
        CHECK(r->latency_hours == doctest::Approx(30.0));
    }

    SUBCASE("maintainer status applies henceforth, not retroactively") {
        auto pr = make_pr("o/r", 3, "alice", at_hours(0),
                          {event(EventKind::Commented, "late", at_hours(50.0)),
                           event(EventKind::Commented, "maint", at_hours(120.0))});
        auto r = first_maintainer_response(pr, ledger, bots);
        REQUIRE(r);
        CHECK(r->actor_id == "maint");
        CHECK(r->latency_hours == doctest::Approx(120.0));
    }

    SUBCASE("no qualifying event -> absent") {
        auto pr = make_pr("o/r", 4, "alice", at_hours(0),
                          {event(EventKind::Committed, "maint", at_hours(1.0))});
        CHECK_FALSE(first_maintainer_response(pr, ledger, bots));
    }
}

TEST_CASE("first contributor response") {
    SUBCASE("commit after t_ref counts") {
        auto pr = make_pr("o/r", 1, "alice", at_hours(0),
                          {event(EventKind::Committed, "alice", at_hours(7.0))});
        auto r = first_contributor_response(pr, at_hours(5.0));
        REQUIRE(r);
        CHECK(r->latency_hours == doctest::Approx(2.0));
    }
    SUBCASE("merged by the author is not a contributor response") {
        auto pr = make_pr("o/r", 2, "alice", at_hours(0),
                          {event(EventKind::Merged, "alice", at_hours(9.0))});
        CHECK_FALSE(first_contributor_response(pr, at_hours(5.0)));
    }
    SUBCASE("event exactly at t_ref is excluded (strict inequality)") {
        auto pr = make_pr("o/r", 3, "alice", at_hours(0),
                          {event(EventKind::Committed, "alice", at_hours(5.0)),
                           event(EventKind::Commented, "alice", at_hours(6.0))});
        auto r = first_contributor_response(pr, at_hours(5.0));
        REQUIRE(r);
        CHECK(r->kind == EventKind::Commented);
        CHECK(r->latency_hours == doctest::Approx(1.0));
    }
}

TEST_CASE("responses match the naive filter-then-min oracle on fuzzed PRs") {
    auto rng = make_rng(2024);
    int checked = 0;
    for (int trial = 0; trial < 60; ++trial) {
        auto ds = fuzz_project(rng, 10, 50);
        auto ledger = build_maintainer_ledger(ds);
        auto bots = build_bot_registry(ds, {}, std::nullopt);
        for (const auto& pr : ds.projects.begin()->second) {
            auto got = first_maintainer_response(pr, ledger, bots);
            auto want = oracle_first_maintainer_response(ds, pr, bots);
            CHECK(got == want);
            if (got) {
                auto got_c = first_contributor_response(pr, got->timestamp);
                auto want_c = oracle_first_contributor_response(pr, got->timestamp);
                CHECK(got_c == want_c);
                if (got_c) CHECK(got_c->latency_hours > 0.0);
            }
            ++checked;
        }
    }
    CHECK(checked == 600);
}

TEST_CASE("response invariant under permutation of equal-timestamp noise events") {
    MaintainerLedger ledger;
    ledger.first_privileged["o/r"] = {{"maint", at_hours(-1)}};
    BotRegistry bots;

    auto base = make_pr("o/r", 1, "alice", at_hours(0),
                        {event(EventKind::Committed, "x1", at_hours(2.0)),
                         event(EventKind::Committed, "x2", at_hours(2.0)),
                         event(EventKind::Commented, "maint", at_hours(2.0))});
    auto r1 = first_maintainer_response(base, ledger, bots);

    auto swapped = make_pr("o/r", 1, "alice", at_hours(0),
                           {event(EventKind::Committed, "x2", at_hours(2.0)),
                            event(EventKind::Committed, "x1", at_hours(2.0)),
                            event(EventKind::Commented, "maint", at_hours(2.0))});
    auto r2 = first_maintainer_response(swapped, ledger, bots);
    CHECK(r1 == r2);
}
