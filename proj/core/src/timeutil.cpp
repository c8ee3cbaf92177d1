#include "newspulse/timeutil.hpp"

#include <array>
#include <cctype>
#include <cstdio>
#include <cstdlib>

namespace newspulse {

namespace {

// Howard Hinnant's days-from-civil algorithm.
int64_t civil_days(int y, unsigned m, unsigned d) {
    y -= m <= 2;
    const int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<int64_t>(doe) - 719468;
}

void civil_from_days(int64_t z, int& y, unsigned& m, unsigned& d) {
    z += 719468;
    const int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const int64_t yy = static_cast<int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp + (mp < 10 ? 3 : -9);
    y = static_cast<int>(yy + (m <= 2));
}

const std::array<std::string_view, 12> kMonths = {
    "jan", "feb", "mar", "apr", "may", "jun",
    "jul", "aug", "sep", "oct", "nov", "dec"};

int month_from_name(std::string_view s) {
    if (s.size() < 3) return 0;
    char a = char(std::tolower(s[0])), b = char(std::tolower(s[1])), c = char(std::tolower(s[2]));
    std::string key{a, b, c};
    for (size_t i = 0; i < kMonths.size(); ++i)
        if (kMonths[i] == key) return int(i) + 1;
    return 0;
}

bool parse_uint(std::string_view s, size_t& pos, int digits_min, int digits_max, long& out) {
    long v = 0;
    int n = 0;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos])) && n < digits_max) {
        v = v * 10 + (s[pos] - '0');
        ++pos;
        ++n;
    }
    if (n < digits_min) return false;
    out = v;
    return true;
}

void skip_ws(std::string_view s, size_t& pos) {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
}

// Named zones that actually occur in feeds. Unknown alphabetic zones
// are treated as UTC rather than rejected.
int zone_offset_minutes(std::string_view z) {
    struct Zone { std::string_view name; int minutes; };
    static constexpr Zone kZones[] = {
        {"UT", 0},   {"GMT", 0},  {"UTC", 0}, {"Z", 0},
        {"EST", -300}, {"EDT", -240}, {"CST", -360}, {"CDT", -300},
        {"MST", -420}, {"MDT", -360}, {"PST", -480}, {"PDT", -420},
    };
    for (const auto& zone : kZones)
        if (zone.name == z) return zone.minutes;
    return 0;
}

} // namespace

int64_t days_from_civil(int year, int month, int day) {
    return civil_days(year, static_cast<unsigned>(month), static_cast<unsigned>(day));
}

std::optional<UtcTime> parse_rfc822(std::string_view s) {
    size_t pos = 0;
    skip_ws(s, pos);
    // Optional "Tue, " weekday prefix.
    size_t comma = s.find(',', pos);
    if (comma != std::string_view::npos && comma < pos + 10) pos = comma + 1;
    skip_ws(s, pos);

    long day = 0;
    if (!parse_uint(s, pos, 1, 2, day)) return std::nullopt;
    skip_ws(s, pos);

    size_t mon_start = pos;
    while (pos < s.size() && std::isalpha(static_cast<unsigned char>(s[pos]))) ++pos;
    int month = month_from_name(s.substr(mon_start, pos - mon_start));
    if (month == 0) return std::nullopt;
    skip_ws(s, pos);

    long year = 0;
    if (!parse_uint(s, pos, 2, 4, year)) return std::nullopt;
    if (year < 100) year += (year < 70) ? 2000 : 1900;
    skip_ws(s, pos);

    long hh = 0, mm = 0, ss = 0;
    if (!parse_uint(s, pos, 1, 2, hh)) return std::nullopt;
    if (pos >= s.size() || s[pos] != ':') return std::nullopt;
    ++pos;
    if (!parse_uint(s, pos, 1, 2, mm)) return std::nullopt;
    if (pos < s.size() && s[pos] == ':') {
        ++pos;
        if (!parse_uint(s, pos, 1, 2, ss)) return std::nullopt;
    }
    skip_ws(s, pos);

    int offset_min = 0;
    if (pos < s.size()) {
        char sign = s[pos];
        if (sign == '+' || sign == '-') {
            ++pos;
            long zhh = 0, zmm = 0;
            if (!parse_uint(s, pos, 2, 2, zhh)) return std::nullopt;
            if (pos < s.size() && s[pos] == ':') ++pos;
            parse_uint(s, pos, 0, 2, zmm);
            offset_min = int(zhh * 60 + zmm) * (sign == '-' ? -1 : 1);
        } else {
            size_t zstart = pos;
            while (pos < s.size() && std::isalpha(static_cast<unsigned char>(s[pos]))) ++pos;
            offset_min = zone_offset_minutes(s.substr(zstart, pos - zstart));
        }
    }

    int64_t days = civil_days(int(year), unsigned(month), unsigned(day));
    return days * 86400 + hh * 3600 + mm * 60 + ss - int64_t(offset_min) * 60;
}

std::optional<UtcTime> parse_iso8601(std::string_view s) {
    size_t pos = 0;
    skip_ws(s, pos);
    long year = 0, month = 0, day = 0;
    if (!parse_uint(s, pos, 4, 4, year)) return std::nullopt;
    if (pos >= s.size() || s[pos] != '-') return std::nullopt;
    ++pos;
    if (!parse_uint(s, pos, 2, 2, month)) return std::nullopt;
    if (pos >= s.size() || s[pos] != '-') return std::nullopt;
    ++pos;
    if (!parse_uint(s, pos, 2, 2, day)) return std::nullopt;
    if (month < 1 || month > 12 || day < 1 || day > 31) return std::nullopt;

    long hh = 0, mm = 0, ss = 0;
    int offset_min = 0;
    if (pos < s.size() && (s[pos] == 'T' || s[pos] == 't' || s[pos] == ' ')) {
        ++pos;
        if (!parse_uint(s, pos, 2, 2, hh)) return std::nullopt;
        if (pos >= s.size() || s[pos] != ':') return std::nullopt;
        ++pos;
        if (!parse_uint(s, pos, 2, 2, mm)) return std::nullopt;
        if (pos < s.size() && s[pos] == ':') {
            ++pos;
            if (!parse_uint(s, pos, 2, 2, ss)) return std::nullopt;
            if (pos < s.size() && s[pos] == '.') {
                ++pos;
                while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
            }
        }
        if (pos < s.size()) {
            char c = s[pos];
            if (c == 'Z' || c == 'z') {
                ++pos;
            } else if (c == '+' || c == '-') {
                ++pos;
                long zhh = 0, zmm = 0;
                if (!parse_uint(s, pos, 2, 2, zhh)) return std::nullopt;
                if (pos < s.size() && s[pos] == ':') ++pos;
                parse_uint(s, pos, 0, 2, zmm);
                offset_min = int(zhh * 60 + zmm) * (c == '-' ? -1 : 1);
            }
        }
    }

    int64_t days = civil_days(int(year), unsigned(month), unsigned(day));
    return days * 86400 + hh * 3600 + mm * 60 + ss - int64_t(offset_min) * 60;
}

std::optional<UtcTime> parse_feed_date(std::string_view s) {
    if (auto t = parse_iso8601(s)) return t;
    return parse_rfc822(s);
}

std::optional<UtcTime> parse_date(std::string_view s) {
    size_t pos = 0;
    long y = 0, m = 0, d = 0;
    if (!parse_uint(s, pos, 4, 4, y)) return std::nullopt;
    if (pos >= s.size() || s[pos] != '-') return std::nullopt;
    ++pos;
    if (!parse_uint(s, pos, 1, 2, m)) return std::nullopt;
    if (pos >= s.size() || s[pos] != '-') return std::nullopt;
    ++pos;
    if (!parse_uint(s, pos, 1, 2, d)) return std::nullopt;
    if (m < 1 || m > 12 || d < 1 || d > 31) return std::nullopt;
    return civil_days(int(y), unsigned(m), unsigned(d)) * 86400;
}

int week_index(UtcTime t) {
    static const int64_t kAnchor = civil_days(2020, 1, 1) * 86400;
    if (t < kAnchor) return 0;
    return static_cast<int>((t - kAnchor) / (7 * 86400));
}

std::string format_iso8601(UtcTime t) {
    int64_t days = t / 86400;
    int64_t secs = t % 86400;
    if (secs < 0) {
        secs += 86400;
        days -= 1;
    }
    int y;
    unsigned m, d;
    civil_from_days(days, y, m, d);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02lld:%02lld:%02lldZ", y, m, d,
                  static_cast<long long>(secs / 3600), static_cast<long long>((secs / 60) % 60),
                  static_cast<long long>(secs % 60));
    return buf;
}

} // namespace newspulse
