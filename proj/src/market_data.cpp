#include "physmom/market_data.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "physmom/errors.hpp"

namespace physmom {

namespace {
constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();
}

const char* to_string(Timescale ts) {
    switch (ts) {
        case Timescale::day: return "day";
        case Timescale::week: return "week";
        case Timescale::month: return "month";
        case Timescale::year: return "year";
    }
    return "?";
}

std::optional<Timescale> timescale_from_string(std::string_view s) {
    if (s == "day") return Timescale::day;
    if (s == "week") return Timescale::week;
    if (s == "month") return Timescale::month;
    if (s == "year") return Timescale::year;
    return std::nullopt;
}

double log_price(double s) {
    if (!(s > 0.0)) throw std::domain_error("log_price requires a positive price");
    return std::log(s);
}

TradingCalendar::TradingCalendar(std::vector<Date> dates) : dates_(std::move(dates)) {
    for (size_t i = 1; i < dates_.size(); ++i)
        if (!(dates_[i - 1] < dates_[i]))
            throw DataError("trading calendar not strictly increasing at " +
                            dates_[i].to_string());
    index_.reserve(dates_.size());
    for (size_t i = 0; i < dates_.size(); ++i)
        index_.emplace(dates_[i].raw(), static_cast<int>(i));
}

std::optional<int> TradingCalendar::index_of(Date d) const {
    auto it = index_.find(d.raw());
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::vector<int> TradingCalendar::period_starts(Timescale ts) const {
    std::vector<int> out;
    if (dates_.empty()) return out;
    if (ts == Timescale::day) {
        out.resize(dates_.size());
        for (int i = 0; i < size(); ++i) out[static_cast<size_t>(i)] = i;
        return out;
    }
    auto key = [ts](Date d) -> std::pair<int, int> {
        switch (ts) {
            case Timescale::week: {
                auto w = d.iso_week();
                return {w.year, w.week};
            }
            case Timescale::month: return {d.year(), d.month()};
            case Timescale::year: return {d.year(), 0};
            default: return {0, 0};
        }
    };
    std::pair<int, int> prev{std::numeric_limits<int>::min(), 0};
    for (int i = 0; i < size(); ++i) {
        auto k = key(dates_[static_cast<size_t>(i)]);
        if (k != prev) {
            out.push_back(i);
            prev = k;
        }
    }
    return out;
}

std::optional<int> AssetPanel::symbol_index(std::string_view name) const {
    auto it = std::lower_bound(symbols_.begin(), symbols_.end(), name);
    if (it == symbols_.end() || *it != name) return std::nullopt;
    return static_cast<int>(it - symbols_.begin());
}

bool AssetPanel::all_valid(int sym, int t0, int t1) const {
    const auto* p = valid_count_prefix_.data() +
                    static_cast<size_t>(sym) * (static_cast<size_t>(num_dates()) + 1);
    return p[t1 + 1] - p[t0] == t1 - t0 + 1;
}

int AssetPanel::last_valid_at_or_before(int sym, int t) const {
    for (int i = t; i >= 0; --i)
        if (valid_[flat(sym, i)]) return i;
    return -1;
}

AssetPanel AssetPanel::build(Input in, CalendarPolicy policy) {
    if (in.symbols.empty()) throw DataError("empty universe: no symbol data");
    if (in.symbols.size() != in.bars.size())
        throw DataError("panel input symbols/bars size mismatch");

    // Sort symbols lexicographically; symbol index order doubles as the
    // deterministic tie-break order downstream.
    std::vector<size_t> perm(in.symbols.size());
    for (size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    std::sort(perm.begin(), perm.end(),
              [&](size_t a, size_t b) { return in.symbols[a] < in.symbols[b]; });
    for (size_t i = 1; i < perm.size(); ++i)
        if (in.symbols[perm[i - 1]] == in.symbols[perm[i]])
            throw DataError("duplicate symbol '" + in.symbols[perm[i]] + "'");

    std::set<std::int32_t> union_days;
    for (const auto& bars : in.bars)
        for (const Bar& b : bars) union_days.insert(b.date.raw());

    std::set<std::int32_t> bench_days;
    for (const auto& [d, c] : in.benchmark) bench_days.insert(d.raw());

    std::vector<Date> cal_dates;
    for (std::int32_t raw : union_days) {
        if (policy == CalendarPolicy::intersection && !bench_days.count(raw)) continue;
        cal_dates.emplace_back(raw);
    }
    if (cal_dates.empty()) throw DataError("calendar is empty after applying policy");

    AssetPanel p;
    p.calendar_ = TradingCalendar(std::move(cal_dates));
    p.symbols_.reserve(in.symbols.size());
    for (size_t i : perm) p.symbols_.push_back(std::move(in.symbols[i]));

    const size_t n = static_cast<size_t>(p.calendar_.size());
    const size_t s = p.symbols_.size();
    p.open_.assign(n * s, kMissing);
    p.close_.assign(n * s, kMissing);
    p.volume_.assign(n * s, kMissing);
    p.shares_.assign(n * s, kMissing);
    p.valid_.assign(n * s, 0);
    p.benchmark_.assign(n, kMissing);

    for (size_t si = 0; si < s; ++si) {
        const auto& bars = in.bars[perm[si]];
        for (const Bar& b : bars) {
            auto idx = p.calendar_.index_of(b.date);
            if (!idx) continue; // dropped by the intersection policy
            const size_t k = p.flat(static_cast<int>(si), *idx);
            if (p.valid_[k])
                throw DataError("duplicate bar for " + p.symbols_[si] + " on " +
                                b.date.to_string());
            p.open_[k] = b.open;
            p.close_[k] = b.close;
            p.volume_[k] = b.volume;
            p.shares_[k] = b.shares_outstanding;
            p.valid_[k] = 1;
        }
    }

    for (const auto& [d, c] : in.benchmark) {
        auto idx = p.calendar_.index_of(d);
        if (idx) p.benchmark_[static_cast<size_t>(*idx)] = c;
    }

    p.valid_count_prefix_.assign(s * (n + 1), 0);
    for (size_t si = 0; si < s; ++si) {
        int* pre = p.valid_count_prefix_.data() + si * (n + 1);
        for (size_t t = 0; t < n; ++t)
            pre[t + 1] = pre[t] + (p.valid_[si * n + t] ? 1 : 0);
    }
    return p;
}

void Membership::add_event(const std::string& symbol, Date at, bool is_add) {
    auto& v = events_[symbol];
    v.emplace_back(at, is_add);
    std::sort(v.begin(), v.end());
}

bool Membership::is_member(const std::string& symbol, Date at) const {
    if (events_.empty()) return true;
    auto it = events_.find(symbol);
    if (it == events_.end()) return false;
    const auto& v = it->second;
    auto ub = std::upper_bound(v.begin(), v.end(), std::make_pair(at, true));
    if (ub == v.begin()) return false;
    return std::prev(ub)->second;
}

} // namespace physmom
