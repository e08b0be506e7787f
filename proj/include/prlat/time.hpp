#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace prlat {

// A UTC instant with second resolution. All timestamps in the toolkit are
// UTC; no local-timezone instant ever enters an archive or a report.
struct UtcInstant {
    std::int64_t secs = 0;  // seconds since 1970-01-01T00:00:00Z

    friend auto operator<=>(const UtcInstant&, const UtcInstant&) = default;

    UtcInstant plus_seconds(std::int64_t s) const { return {secs + s}; }
    UtcInstant plus_hours(double h) const {
        return {secs + static_cast<std::int64_t>(h * 3600.0)};
    }
};

inline double hours_between(UtcInstant from, UtcInstant to) {
    return static_cast<double>(to.secs - from.secs) / 3600.0;
}

// Parses ISO-8601 timestamps of the form 2022-12-01T10:20:30Z, with optional
// fractional seconds (truncated) and optional +hh:mm / -hh:mm offsets
// (converted to UTC). Returns nullopt on malformed input.
std::optional<UtcInstant> parse_iso8601(const std::string& text);

// Formats as YYYY-MM-DDTHH:MM:SSZ.
std::string format_iso8601(UtcInstant t);

// Weekday in UTC, 0=Monday .. 6=Sunday.
int weekday_utc(UtcInstant t);

// Hour of day in UTC, 0..23.
int hour_utc(UtcInstant t);

}  // namespace prlat
