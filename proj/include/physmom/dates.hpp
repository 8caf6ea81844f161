#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace physmom {

/// Calendar date, stored as days since 1970-01-01 (proleptic Gregorian).
class Date {
public:
    constexpr Date() = default;
    constexpr explicit Date(std::int32_t days_since_epoch) : days_(days_since_epoch) {}

    static Date from_ymd(int year, int month, int day);

    /// Parses ISO-8601 "YYYY-MM-DD". Throws std::invalid_argument on anything else.
    static Date parse(std::string_view iso);
    static std::optional<Date> try_parse(std::string_view iso);

    constexpr std::int32_t raw() const { return days_; }

    int year() const;
    int month() const;   // 1..12
    int day() const;     // 1..31
    int weekday() const; // 0 = Monday .. 6 = Sunday

    struct IsoWeek {
        int year;
        int week; // 1..53
        auto operator<=>(const IsoWeek&) const = default;
    };
    IsoWeek iso_week() const;

    std::string to_string() const; // "YYYY-MM-DD"

    Date operator+(int days) const { return Date(days_ + days); }
    Date operator-(int days) const { return Date(days_ - days); }
    auto operator<=>(const Date&) const = default;

private:
    std::int32_t days_ = 0;
};

} // namespace physmom
