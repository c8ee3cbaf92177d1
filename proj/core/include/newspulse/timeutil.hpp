#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace newspulse {

// Seconds since the Unix epoch, always UTC.
using UtcTime = int64_t;

// Days since 1970-01-01 for a proleptic Gregorian civil date.
int64_t days_from_civil(int year, int month, int day);

// RFC 822/1123 dates as used by RSS <pubDate>, e.g.
// "Tue, 07 Apr 2020 16:30:00 GMT" / "+0000" / two-digit years.
std::optional<UtcTime> parse_rfc822(std::string_view s);

// ISO 8601 / RFC 3339 as used by Atom, e.g. "2020-04-07T16:30:00Z",
// "2020-04-07T16:30:00-05:00", fractional seconds tolerated.
std::optional<UtcTime> parse_iso8601(std::string_view s);

// Tries both formats.
std::optional<UtcTime> parse_feed_date(std::string_view s);

// "YYYY-MM-DD" calendar date at midnight UTC.
std::optional<UtcTime> parse_date(std::string_view s);

// Week bins: week 0 starts Wednesday 2020-01-01 00:00 UTC and each week
// is the following 7 days. Times before the anchor clamp to week 0.
int week_index(UtcTime t);

// "2020-04-07T16:30:00Z"
std::string format_iso8601(UtcTime t);

} // namespace newspulse
