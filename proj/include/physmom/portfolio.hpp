#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "physmom/signals.hpp"

namespace physmom {

enum class Direction { traditional, contrarian };
enum class PriceField { open, close };

const char* to_string(Direction d);
std::optional<Direction> direction_from_string(std::string_view s);

/// One cell of the strategy grid.
struct StrategyConfig {
    MomentumKind momentum = MomentumKind::p1;
    MassKind mass = MassKind::turnover_rate;
    Timescale timescale = Timescale::day;
    int lookback_j = 1;
    int holding_k = 1;
    Direction direction = Direction::traditional;
    int groups = 50;

    /// Enforces the per-timescale J/K ranges (day J 1..7, p3 from 2; week J
    /// 2..8, K 1..8; month J 3..12, K 1..12; year J 2..5, K 1..3 with J+K <= 8),
    /// momentum/mass compatibility and groups >= 2. Throws ConfigError.
    void validate() const;

    std::string slug() const;  // e.g. "day_p2_inv_turnover_J3_K1_contrarian"
    /// Table row label, e.g. "p*2(1/u,R)" (the star marks contrarian).
    std::string portfolio_label() const;
    std::string jk_label() const;     // "3-1"
    std::string basket_label() const; // "W - L" / "L - W"
};

/// Every (momentum, mass, J, K, direction) combination the timescale admits.
/// Day enumerates 238 per direction; the stated day count of 237 does not
/// match the stated ranges (4 x 49 + 42 = 238), so the enumerator follows the
/// ranges.
std::vector<StrategyConfig> enumerate_grid(Timescale ts);

/// Calendar indices of the formation grid: every trading day, or the first
/// trading day of each ISO week / calendar month / calendar year.
std::vector<int> formation_dates(const TradingCalendar& cal, Timescale ts);

/// Ascending-score partition of the eligible universe into `groups` equal
/// groups; group 0 holds the lowest scores (losers), the last group the
/// highest (winners). When the universe does not divide evenly the first
/// `universe % groups` groups take one extra symbol. Ties break by symbol
/// index, i.e. lexicographic symbol order.
struct RankedGroups {
    int formation = 0;                 // grid position
    std::vector<std::uint32_t> order;  // eligible symbols, ascending (score, symbol)
    std::vector<std::uint32_t> bounds; // groups+1 offsets into order

    int num_groups() const { return static_cast<int>(bounds.size()) - 1; }
    std::span<const std::uint32_t> group(int g) const {
        return {order.data() + bounds[static_cast<size_t>(g)],
                order.data() + bounds[static_cast<size_t>(g) + 1]};
    }
    std::span<const std::uint32_t> losers() const { return group(0); }
    std::span<const std::uint32_t> winners() const { return group(num_groups() - 1); }
};

/// nullopt when fewer than `groups` symbols are eligible (the formation is
/// skipped). `member_mask`, when non-null, further restricts the universe
/// (index membership applied at formation time).
std::optional<RankedGroups> rank_universe(const ScoreSet& scores, int formation, int groups,
                                          const std::uint8_t* member_mask = nullptr);

/// Convenience over the full signal path for a single formation date.
std::optional<RankedGroups> rank_universe(const AssetPanel& panel, const StrategyConfig& config,
                                          Date formation_date);

/// A dated dollar-neutral position set. Baskets are equal-weighted by
/// construction: every long symbol carries +1/|long| and every short symbol
/// -1/|short|, so the long side sums to exactly +1 and the short side to
/// exactly -1 as rationals. liquidation_pos = formation_pos + K may point one
/// past the grid when the holding period runs off the data.
struct Cohort {
    int formation_pos = 0;
    int liquidation_pos = 0;
    PriceField entry_field = PriceField::close;
    std::vector<std::uint32_t> long_symbols;  // ascending symbol index
    std::vector<std::uint32_t> short_symbols; // ascending symbol index

    double long_weight_each() const {
        return 1.0 / static_cast<double>(long_symbols.size());
    }
    double short_weight_each() const {
        return -1.0 / static_cast<double>(short_symbols.size());
    }
};

/// Traditional buys the winner group and shorts the losers; contrarian is the
/// mirror image. Daily cohorts enter at the formation day's open, all others
/// at its close; liquidation is always at the close K grid steps later.
Cohort build_cohort(const RankedGroups& groups, const StrategyConfig& config);

} // namespace physmom
