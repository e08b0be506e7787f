#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "prlat/archive.hpp"
#include "prlat/error.hpp"
#include "support/builders.hpp"
#include "support/tempdir.hpp"

using namespace prlat;
using namespace prlat::testsupport;
namespace fs = std::filesystem;

namespace {

std::vector<PullRequestRecord> sample_records() {
    std::vector<PullRequestRecord> prs;
    for (int i = 1; i <= 5; ++i) {
        auto pr = make_pr("owner/repo", i, "alice", at_hours(i * 10.0),
                          {event(EventKind::Commented, "bob", at_hours(i * 10.0 + 1)),
                           event(EventKind::Merged, "bob", at_hours(i * 10.0 + 2),
                                 {{"message", "merge it"}})});
        pr.commit_stats = {{at_hours(i * 10.0), 12, 3}};
        prs.push_back(std::move(pr));
    }
    return prs;
}

}  // namespace

TEST_CASE("store then load round-trips records") {
    TempDir tmp;
    EventArchive archive(tmp.path);
    auto records = sample_records();
    auto delta = archive.store_records(records);
    CHECK(delta.added == 5);

    auto ds = archive.load();
    REQUIRE(ds.projects.count("owner/repo") == 1);
    const auto& loaded = ds.projects.at("owner/repo");
    REQUIRE(loaded.size() == records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        CHECK(loaded[i] == records[i]);
        CHECK(record_to_json_line(loaded[i]) == record_to_json_line(records[i]));
    }
}

TEST_CASE("re-storing an identical record is idempotent") {
    TempDir tmp;
    EventArchive archive(tmp.path);
    auto records = sample_records();
    archive.store_records({records.data(), 1});
    auto delta = archive.store_records({records.data(), 1});
    CHECK(delta.added == 0);
    CHECK(delta.unchanged == 1);
    CHECK(archive.manifest_counts().at("owner/repo") == 1);
}

TEST_CASE("records with unsorted events are stored sorted") {
    TempDir tmp;
    EventArchive archive(tmp.path);
    PullRequestRecord pr;
    pr.project_id = "owner/repo";
    pr.pr_number = 9;
    pr.author_id = "alice";
    pr.created_at = at_hours(1.0);
    pr.events = {event(EventKind::Merged, "bob", at_hours(5.0)),
                 event(EventKind::Commented, "bob", at_hours(2.0))};
    archive.store_records({&pr, 1});

    auto ds = archive.load();
    const auto& loaded = ds.projects.at("owner/repo").front();
    CHECK(loaded.events[0].kind == EventKind::Commented);
    CHECK(loaded.events[1].kind == EventKind::Merged);
}

TEST_CASE("empty archive loads as empty dataset") {
    TempDir tmp;
    EventArchive archive(tmp.path);
    auto ds = archive.load();
    CHECK(ds.projects.empty());
}

TEST_CASE("tampered manifest count raises Corrupt") {
    TempDir tmp;
    {
        EventArchive archive(tmp.path);
        auto records = sample_records();
        archive.store_records(records);
    }
    // bump the stored count
    auto manifest_path = tmp.path / "manifest.json";
    std::ifstream in(manifest_path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    in.close();
    auto pos = text.find("\"pr_count\": 5");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, 13, "\"pr_count\": 7");
    std::ofstream(manifest_path) << text;

    EventArchive archive(tmp.path);
    CHECK_THROWS_AS(archive.load(), Error);
    try {
        archive.load();
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Corrupt);
    }
}

TEST_CASE("unrecognized schema version raises SchemaMismatch") {
    TempDir tmp;
    std::ofstream(tmp.path / "manifest.json")
        << R"({"schema_version": 99, "projects": {}})";
    CHECK_THROWS_AS(EventArchive{tmp.path}, Error);
}

TEST_CASE("other-kind events survive the round trip verbatim") {
    TempDir tmp;
    EventArchive archive(tmp.path);
    auto pr = make_pr("owner/repo", 1, "alice", at_hours(0));
    TimelineEvent ev;
    ev.kind = EventKind::Other;
    ev.raw_kind = "cross-referenced";
    ev.actor_id = "carol";
    ev.timestamp = at_hours(1.0);
    pr.events.push_back(ev);
    normalize_record(pr);
    archive.store_records({&pr, 1});

    auto ds = archive.load();
    const auto& loaded = ds.projects.at("owner/repo").front();
    REQUIRE(loaded.events.size() == 1);
    CHECK(loaded.events[0].kind == EventKind::Other);
    CHECK(loaded.events[0].raw_kind == "cross-referenced");
}
