#include "physmom/dates.hpp"

#include <charconv>
#include <cstdio>
#include <stdexcept>

namespace physmom {

namespace {

// Civil <-> day-count conversions (Howard Hinnant's algorithms).
std::int32_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const int era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);            // [0, 399]
    const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1; // [0, 365]
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;           // [0, 146096]
    return era * 146097 + static_cast<int>(doe) - 719468;
}

struct Civil {
    int y;
    int m;
    int d;
};

Civil civil_from_days(std::int32_t z) {
    z += 719468;
    const int era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const int y = static_cast<int>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp + (mp < 10 ? 3 : -9);
    return {y + (m <= 2), static_cast<int>(m), static_cast<int>(d)};
}

bool is_leap(int y) {
    return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
}

int days_in_month(int y, int m) {
    static constexpr int table[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    return m == 2 && is_leap(y) ? 29 : table[m - 1];
}

// ISO weeks in a given year: 52 or 53.
int iso_weeks_in_year(int y) {
    auto jan1_weekday = [](int year) {
        return (days_from_civil(year, 1, 1) % 7 + 7 + 3) % 7; // 0 = Monday
    };
    const int wd = jan1_weekday(y);
    if (wd == 3) return 53;                  // starts on Thursday
    if (wd == 2 && is_leap(y)) return 53;    // leap year starting on Wednesday
    return 52;
}

int parse_int(std::string_view s) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw std::invalid_argument("bad date field: '" + std::string(s) + "'");
    return v;
}

} // namespace

Date Date::from_ymd(int year, int month, int day) {
    if (month < 1 || month > 12 || day < 1 || day > days_in_month(year, month))
        throw std::invalid_argument("invalid calendar date");
    return Date(days_from_civil(year, month, day));
}

Date Date::parse(std::string_view iso) {
    if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-')
        throw std::invalid_argument("expected YYYY-MM-DD, got '" + std::string(iso) + "'");
    return from_ymd(parse_int(iso.substr(0, 4)), parse_int(iso.substr(5, 2)),
                    parse_int(iso.substr(8, 2)));
}

std::optional<Date> Date::try_parse(std::string_view iso) {
    try {
        return parse(iso);
    } catch (const std::invalid_argument&) {
        return std::nullopt;
    }
}

int Date::year() const { return civil_from_days(days_).y; }
int Date::month() const { return civil_from_days(days_).m; }
int Date::day() const { return civil_from_days(days_).d; }

int Date::weekday() const {
    // 1970-01-01 was a Thursday.
    return (days_ % 7 + 7 + 3) % 7;
}

Date::IsoWeek Date::iso_week() const {
    const Civil c = civil_from_days(days_);
    const int doy = days_ - days_from_civil(c.y, 1, 1) + 1; // 1-based day of year
    const int wd = weekday() + 1;                           // ISO weekday 1..7
    int week = (doy - wd + 10) / 7;
    int year = c.y;
    if (week < 1) {
        year -= 1;
        week = iso_weeks_in_year(year);
    } else if (week > iso_weeks_in_year(year)) {
        week = 1;
        year += 1;
    }
    return {year, week};
}

std::string Date::to_string() const {
    const Civil c = civil_from_days(days_);
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", c.y, c.m, c.d);
    return buf;
}

} // namespace physmom
