#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "physmom/dates.hpp"

namespace physmom {

enum class Timescale { day, week, month, year };

const char* to_string(Timescale ts);
std::optional<Timescale> timescale_from_string(std::string_view s);

/// Natural log of a price. Throws std::domain_error for s <= 0.
double log_price(double s);

/// One daily observation for one symbol.
struct Bar {
    Date date;
    double open = 0.0;
    double close = 0.0;
    double volume = 0.0;
    double shares_outstanding = 0.0;

    bool plausible() const {
        return open > 0.0 && close > 0.0 && shares_outstanding > 0.0 && volume >= 0.0;
    }
};

/// Strictly increasing sequence of trading dates with O(1) date->index lookup.
class TradingCalendar {
public:
    TradingCalendar() = default;
    explicit TradingCalendar(std::vector<Date> dates); // throws DataError unless strictly increasing

    int size() const { return static_cast<int>(dates_.size()); }
    bool empty() const { return dates_.empty(); }
    Date date(int i) const { return dates_[static_cast<size_t>(i)]; }
    std::span<const Date> dates() const { return dates_; }
    std::optional<int> index_of(Date d) const;

    /// Calendar indices of the first trading date of every day / ISO week /
    /// calendar month / calendar year. Day returns every index.
    std::vector<int> period_starts(Timescale ts) const;

private:
    std::vector<Date> dates_;
    std::unordered_map<std::int32_t, int> index_;
};

/// Immutable aligned panel: per-symbol daily columns on a shared calendar,
/// plus the benchmark close series. Missing observations hold NaN and are
/// flagged invalid; columns are never forward-filled.
class AssetPanel {
public:
    int num_symbols() const { return static_cast<int>(symbols_.size()); }
    int num_dates() const { return calendar_.size(); }
    const TradingCalendar& calendar() const { return calendar_; }
    const std::vector<std::string>& symbols() const { return symbols_; } // sorted
    std::optional<int> symbol_index(std::string_view name) const;

    std::span<const double> open(int sym) const { return column(open_, sym); }
    std::span<const double> close(int sym) const { return column(close_, sym); }
    std::span<const double> volume(int sym) const { return column(volume_, sym); }
    std::span<const double> shares(int sym) const { return column(shares_, sym); }
    bool valid(int sym, int t) const { return valid_[flat(sym, t)] != 0; }

    /// True when the symbol has a bar on every date in [t0, t1] (inclusive).
    bool all_valid(int sym, int t0, int t1) const;

    /// Index of the most recent valid bar at or before t, or -1.
    int last_valid_at_or_before(int sym, int t) const;

    std::span<const double> benchmark_close() const { return benchmark_; } // NaN where missing
    bool benchmark_valid(int t) const { return !std::isnan(benchmark_[static_cast<size_t>(t)]); }

    /// Builder input: per-symbol bars (any order, duplicate dates rejected).
    struct Input {
        std::vector<std::string> symbols;
        std::vector<std::vector<Bar>> bars; // parallel to symbols
        std::vector<std::pair<Date, double>> benchmark;
    };
    enum class CalendarPolicy { union_dates, intersection };
    static AssetPanel build(Input in, CalendarPolicy policy); // throws DataError

private:
    size_t flat(int sym, int t) const {
        return static_cast<size_t>(sym) * static_cast<size_t>(calendar_.size()) +
               static_cast<size_t>(t);
    }
    std::span<const double> column(const std::vector<double>& v, int sym) const {
        return {v.data() + flat(sym, 0), static_cast<size_t>(calendar_.size())};
    }

    TradingCalendar calendar_;
    std::vector<std::string> symbols_;
    std::vector<double> open_, close_, volume_, shares_;
    std::vector<std::uint8_t> valid_;
    std::vector<int> valid_count_prefix_; // per symbol: length n+1 running count of valid days
    std::vector<double> benchmark_;
};

/// Universe membership events (`date,symbol,action`, action ADD|DROP).
/// A symbol is in the universe at a date iff its latest event on or before
/// that date is ADD. With no events loaded, every symbol is in.
class Membership {
public:
    static Membership load(const std::filesystem::path& file); // throws DataError
    bool empty() const { return events_.empty(); }
    bool is_member(const std::string& symbol, Date at) const;

    void add_event(const std::string& symbol, Date at, bool is_add);

private:
    std::map<std::string, std::vector<std::pair<Date, bool>>> events_; // sorted per symbol
};

struct LoadReport {
    std::vector<std::string> warnings; // rejected rows etc., "file:line: reason"
    int rows_loaded = 0;
    int rows_rejected = 0;
};

/// Loads one CSV per symbol (header `date,open,close,volume,shares_outstanding`)
/// plus a benchmark CSV (`date,close`). Malformed rows throw DataError with
/// file and line; rows with non-positive price/shares are rejected and logged.
AssetPanel load_panel(const std::filesystem::path& data_dir,
                      const std::filesystem::path& benchmark_file,
                      AssetPanel::CalendarPolicy policy, LoadReport* report = nullptr);

/// Writes the panel back out in the load_panel format ("%.17g" numerics, so a
/// reload reproduces every field bit-for-bit): <dir>/symbols/<SYM>.csv plus
/// <dir>/benchmark.csv.
void write_panel(const AssetPanel& panel, const std::filesystem::path& dir);

} // namespace physmom
