#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "prlat/timeline.hpp"

namespace prlat {

inline constexpr int kArchiveSchemaVersion = 1;

// All loaded pull requests, grouped by project. Projects iterate in
// lexicographic order; PRs within a project are sorted by number.
struct Dataset {
    std::map<std::string, std::vector<PullRequestRecord>> projects;

    std::size_t total_prs() const {
        std::size_t n = 0;
        for (const auto& [_, prs] : projects) n += prs.size();
        return n;
    }
};

struct StoreDelta {
    std::int64_t added = 0;
    std::int64_t replaced = 0;
    std::int64_t unchanged = 0;
};

// On-disk layout: one newline-delimited JSON record file per project
// (owner__name.ndjson) plus manifest.json with per-project PR counts and a
// mandatory schema version. Record files are rewritten atomically
// (tmp + rename); the manifest is updated last.
class EventArchive {
  public:
    explicit EventArchive(std::filesystem::path dir);

    const std::filesystem::path& path() const { return dir_; }

    // Appends or replaces records keyed by (project_id, pr_number).
    // Incoming records are normalized before storage; re-storing an
    // identical record is a no-op. fetched_at, when given, is stamped into
    // the manifest entries of the touched projects.
    StoreDelta store_records(std::span<const PullRequestRecord> records,
                             std::optional<UtcInstant> fetched_at = std::nullopt);

    Dataset load() const;

    std::map<std::string, std::int64_t> manifest_counts() const;

  private:
    std::filesystem::path dir_;
};

// Record <-> single-line JSON. Serialization is canonical: fixed key order,
// no whitespace, so identical records produce identical bytes.
std::string record_to_json_line(const PullRequestRecord& pr);
PullRequestRecord record_from_json_line(const std::string& line);

}  // namespace prlat
