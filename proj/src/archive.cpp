#include "prlat/archive.hpp"

#include <algorithm>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "prlat/error.hpp"

namespace prlat {

using ordered_json = nlohmann::ordered_json;

namespace {

std::string project_file_name(const std::string& slug) {
    std::string out;
    out.reserve(slug.size() + 8);
    for (char c : slug) out += (c == '/') ? '_' : c;
    return out + ".ndjson";
}

UtcInstant parse_instant_field(const ordered_json& j, const char* key) {
    auto t = parse_iso8601(j.at(key).get<std::string>());
    if (!t) raise(ErrorCode::Corrupt, std::string("bad timestamp in field ") + key);
    return *t;
}

void write_file_atomic(const std::filesystem::path& target, const std::string& content) {
    auto tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) raise(ErrorCode::Io, "cannot open " + tmp.string());
        out << content;
        if (!out.flush()) raise(ErrorCode::Io, "write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, target, ec);
    if (ec) raise(ErrorCode::Io, "rename failed for " + target.string());
}

ordered_json load_manifest(const std::filesystem::path& dir) {
    auto path = dir / "manifest.json";
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorCode::Io, "cannot read " + path.string());
    ordered_json m;
    try {
        in >> m;
    } catch (const std::exception& e) {
        raise(ErrorCode::Corrupt, "manifest unparseable: " + std::string(e.what()));
    }
    if (!m.contains("schema_version")) {
        raise(ErrorCode::SchemaMismatch, "manifest has no schema_version");
    }
    if (m["schema_version"].get<int>() != kArchiveSchemaVersion) {
        raise(ErrorCode::SchemaMismatch,
              "unrecognized archive schema version " + m["schema_version"].dump());
    }
    return m;
}

}  // namespace

std::string record_to_json_line(const PullRequestRecord& pr) {
    ordered_json j;
    j["project"] = pr.project_id;
    j["number"] = pr.pr_number;
    j["author_id"] = pr.author_id;
    j["author_login"] = pr.author_login;
    j["title"] = pr.title;
    j["body"] = pr.body;
    j["created_at"] = format_iso8601(pr.created_at);
    j["skew_clamped"] = pr.skew_clamped;
    auto events = ordered_json::array();
    for (const auto& ev : pr.events) {
        ordered_json je;
        je["kind"] = ev.kind == EventKind::Other ? ev.raw_kind : event_kind_name(ev.kind);
        je["actor_id"] = ev.actor_id;
        je["actor_login"] = ev.actor_login;
        je["ts"] = format_iso8601(ev.timestamp);
        if (!ev.payload.empty()) {
            ordered_json jp;
            for (const auto& [k, v] : ev.payload) jp[k] = v;  // std::map: sorted keys
            je["payload"] = std::move(jp);
        }
        events.push_back(std::move(je));
    }
    j["events"] = std::move(events);
    auto commits = ordered_json::array();
    for (const auto& cs : pr.commit_stats) {
        commits.push_back({{"ts", format_iso8601(cs.timestamp)},
                           {"lines", cs.lines_changed},
                           {"files", cs.files_changed}});
    }
    j["commits"] = std::move(commits);
    return j.dump();
}

PullRequestRecord record_from_json_line(const std::string& line) {
    ordered_json j;
    try {
        j = ordered_json::parse(line);
    } catch (const std::exception& e) {
        raise(ErrorCode::Corrupt, "record unparseable: " + std::string(e.what()));
    }
    PullRequestRecord pr;
    try {
        pr.project_id = j.at("project").get<std::string>();
        pr.pr_number = j.at("number").get<std::int64_t>();
        pr.author_id = j.at("author_id").get<std::string>();
        pr.author_login = j.value("author_login", std::string{});
        pr.title = j.value("title", std::string{});
        pr.body = j.value("body", std::string{});
        pr.created_at = parse_instant_field(j, "created_at");
        pr.skew_clamped = j.value("skew_clamped", false);
        for (const auto& je : j.at("events")) {
            TimelineEvent ev;
            const auto raw = je.at("kind").get<std::string>();
            ev.kind = parse_event_kind(raw);
            if (ev.kind == EventKind::Other) ev.raw_kind = raw;
            ev.actor_id = je.at("actor_id").get<std::string>();
            ev.actor_login = je.value("actor_login", std::string{});
            ev.timestamp = parse_instant_field(je, "ts");
            if (je.contains("payload")) {
                for (const auto& [k, v] : je["payload"].items()) {
                    ev.payload[k] = v.get<std::string>();
                }
            }
            pr.events.push_back(std::move(ev));
        }
        if (j.contains("commits")) {
            for (const auto& jc : j["commits"]) {
                CommitStat cs;
                cs.timestamp = parse_instant_field(jc, "ts");
                cs.lines_changed = jc.at("lines").get<std::int64_t>();
                cs.files_changed = jc.at("files").get<std::int64_t>();
                pr.commit_stats.push_back(cs);
            }
        }
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        raise(ErrorCode::Corrupt, "record field error: " + std::string(e.what()));
    }
    return pr;
}

EventArchive::EventArchive(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) raise(ErrorCode::Io, "cannot create archive directory " + dir_.string());
    auto manifest = dir_ / "manifest.json";
    if (!std::filesystem::exists(manifest)) {
        ordered_json m;
        m["schema_version"] = kArchiveSchemaVersion;
        m["projects"] = ordered_json::object();
        write_file_atomic(manifest, m.dump(2) + "\n");
    } else {
        load_manifest(dir_);  // validate the version eagerly
    }
}

StoreDelta EventArchive::store_records(std::span<const PullRequestRecord> records,
                                       std::optional<UtcInstant> fetched_at) {
    auto manifest = load_manifest(dir_);
    StoreDelta delta;

    // Group incoming records per project, normalized.
    std::map<std::string, std::map<std::int64_t, PullRequestRecord>> incoming;
    for (const auto& r : records) {
        PullRequestRecord copy = r;
        normalize_record(copy);
        incoming[copy.project_id][copy.pr_number] = std::move(copy);
    }

    for (auto& [slug, prs] : incoming) {
        auto file = dir_ / project_file_name(slug);
        std::map<std::int64_t, std::string> lines;  // number -> serialized record
        if (std::filesystem::exists(file)) {
            std::ifstream in(file, std::ios::binary);
            if (!in) raise(ErrorCode::Io, "cannot read " + file.string());
            std::string line;
            while (std::getline(in, line)) {
                if (line.empty()) continue;
                auto pr = record_from_json_line(line);
                lines[pr.pr_number] = line;
            }
        }
        for (auto& [number, pr] : prs) {
            auto serialized = record_to_json_line(pr);
            auto it = lines.find(number);
            if (it == lines.end()) {
                lines.emplace(number, std::move(serialized));
                ++delta.added;
            } else if (it->second == serialized) {
                ++delta.unchanged;
            } else {
                it->second = std::move(serialized);
                ++delta.replaced;
            }
        }
        std::string content;
        for (const auto& [_, line] : lines) {
            content += line;
            content += '\n';
        }
        write_file_atomic(file, content);

        auto& entry = manifest["projects"][slug];
        entry["pr_count"] = static_cast<std::int64_t>(lines.size());
        if (fetched_at) entry["fetched_at"] = format_iso8601(*fetched_at);
    }

    write_file_atomic(dir_ / "manifest.json", manifest.dump(2) + "\n");
    return delta;
}

Dataset EventArchive::load() const {
    auto manifest = load_manifest(dir_);
    Dataset ds;
    for (const auto& [slug, entry] : manifest.at("projects").items()) {
        auto file = dir_ / project_file_name(slug);
        std::ifstream in(file, std::ios::binary);
        if (!in) raise(ErrorCode::Io, "missing project file " + file.string());
        std::vector<PullRequestRecord> prs;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            auto pr = record_from_json_line(line);
            if (pr.project_id != slug) {
                raise(ErrorCode::Corrupt, "record project mismatch in " + file.string());
            }
            prs.push_back(std::move(pr));
        }
        std::sort(prs.begin(), prs.end(),
                  [](const auto& a, const auto& b) { return a.pr_number < b.pr_number; });
        for (std::size_t i = 1; i < prs.size(); ++i) {
            if (prs[i].pr_number == prs[i - 1].pr_number) {
                raise(ErrorCode::Corrupt, "duplicate PR number in " + file.string());
            }
        }
        auto expected = entry.at("pr_count").get<std::int64_t>();
        if (expected != static_cast<std::int64_t>(prs.size())) {
            raise(ErrorCode::Corrupt,
                  "manifest count " + std::to_string(expected) + " != stored " +
                      std::to_string(prs.size()) + " for " + slug);
        }
        ds.projects.emplace(slug, std::move(prs));
    }
    return ds;
}

std::map<std::string, std::int64_t> EventArchive::manifest_counts() const {
    auto manifest = load_manifest(dir_);
    std::map<std::string, std::int64_t> counts;
    for (const auto& [slug, entry] : manifest.at("projects").items()) {
        counts[slug] = entry.at("pr_count").get<std::int64_t>();
    }
    return counts;
}

}  // namespace prlat
