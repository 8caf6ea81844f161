#pragma once

#include <optional>
#include <string>
#include <vector>

#include "physmom/portfolio.hpp"

namespace physmom {

/// Wealth curve and per-period zero-cost returns for one StrategyConfig.
/// dates[0] is the first successful formation (wealth 1 deployed there);
/// period_returns[i] covers (dates[i], dates[i+1]] so wealth and dates are one
/// longer than the return series. winner/loser returns are the per-period
/// averages of the winner and loser basket returns across active cohorts.
struct BacktestResult {
    StrategyConfig config;
    std::vector<Date> dates;
    std::vector<double> wealth;
    std::vector<double> period_returns;
    std::vector<double> winner_returns;
    std::vector<double> loser_returns;
    std::vector<int> period_active;  // cohorts marked in each period
    std::vector<int> cohorts_held;   // per grid date from deployment, after formation
    std::vector<std::string> events; // skipped formations, delists, halts
    int skipped_formations = 0;
    bool halted = false;
};

/// Weighted mean of simple returns for an explicit basket: each symbol's
/// return runs from `entry_field` at from_pos to the close at to_pos
/// (calendar indices). A symbol missing its exit bar is valued at its last
/// available close before to_pos (closed to cash, no lookahead). Throws
/// DataError when any entry price is missing or when no symbol has an exit
/// price at all.
double basket_return(const AssetPanel& panel,
                     std::span<const std::pair<std::uint32_t, double>> basket, int from_pos,
                     int to_pos, PriceField entry_field);

/// Per-formation ranked groups shared by every (K, direction) run of one
/// signal set; nullopt entries are skipped formations.
struct RankCache {
    int first_formation = 0;
    std::vector<std::optional<RankedGroups>> by_formation;
};

RankCache build_rank_cache(const AssetPanel& panel, const ScoreSet& scores, int groups,
                           const Membership* membership = nullptr);

/// Full run: formation grid, signal scores, ranking, overlapping-cohort
/// accounting (capital split 1/K across active cohorts, cohort values marked
/// at every grid date on drifted positions) and wealth compounding.
/// Deterministic: identical inputs give bit-identical results. Throws
/// ConfigError when the panel has fewer than J+1 grid dates.
BacktestResult run_backtest(const AssetPanel& panel, const StrategyConfig& config,
                            const Membership* membership = nullptr);

/// Same, reusing precomputed scores and ranks (grid sweeps).
BacktestResult run_backtest_with_scores(const AssetPanel& panel, const StrategyConfig& config,
                                        const ScoreSet& scores, const RankCache& ranks);

} // namespace physmom
