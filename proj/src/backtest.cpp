#include "physmom/backtest.hpp"

#include <cmath>
#include <deque>

#include "physmom/errors.hpp"

namespace physmom {

double basket_return(const AssetPanel& panel,
                     std::span<const std::pair<std::uint32_t, double>> basket, int from_pos,
                     int to_pos, PriceField entry_field) {
    if (basket.empty()) throw DataError("basket_return on an empty basket");
    double num = 0.0;
    double den = 0.0;
    int priced = 0;
    for (const auto& [sym, weight] : basket) {
        const int s = static_cast<int>(sym);
        if (!panel.valid(s, from_pos))
            throw DataError("no entry price for " + panel.symbols()[sym] + " on " +
                            panel.calendar().date(from_pos).to_string());
        const auto uf = static_cast<size_t>(from_pos);
        const double entry =
            entry_field == PriceField::open ? panel.open(s)[uf] : panel.close(s)[uf];
        const int exit_pos =
            panel.valid(s, to_pos) ? to_pos : panel.last_valid_at_or_before(s, to_pos);
        const double w = std::fabs(weight);
        den += w;
        if (exit_pos < from_pos) continue; // never traded again: cash, zero return
        const double exit = panel.close(s)[static_cast<size_t>(exit_pos)];
        num += w * (exit / entry - 1.0);
        ++priced;
    }
    if (priced == 0)
        throw DataError("basket has no priced symbol between " +
                        panel.calendar().date(from_pos).to_string() + " and " +
                        panel.calendar().date(to_pos).to_string());
    return num / den;
}

RankCache build_rank_cache(const AssetPanel& panel, const ScoreSet& scores, int groups,
                           const Membership* membership) {
    RankCache cache;
    cache.first_formation = scores.first_formation();
    const int grid_size = static_cast<int>(scores.grid().size());
    cache.by_formation.reserve(static_cast<size_t>(scores.num_formations()));
    std::vector<std::uint8_t> mask;
    for (int f = scores.first_formation(); f < grid_size; ++f) {
        const std::uint8_t* mask_ptr = nullptr;
        if (membership && !membership->empty()) {
            const Date at = panel.calendar().date(scores.grid()[static_cast<size_t>(f)]);
            mask.assign(static_cast<size_t>(panel.num_symbols()), 0);
            for (int s = 0; s < panel.num_symbols(); ++s)
                mask[static_cast<size_t>(s)] =
                    membership->is_member(panel.symbols()[static_cast<size_t>(s)], at) ? 1 : 0;
            mask_ptr = mask.data();
        }
        cache.by_formation.push_back(rank_universe(scores, f, groups, mask_ptr));
    }
    return cache;
}

namespace {

// One live cohort: entry prices captured at formation, per-symbol price
// relatives marked at each grid date. A symbol that goes missing mid-hold is
// closed at its last available close and its relative stays frozen for the
// rest of the holding period.
struct LiveCohort {
    Cohort cohort;
    std::vector<double> entry_long, entry_short;
    std::vector<double> rel_long, rel_short;
    std::vector<std::uint8_t> frozen_long, frozen_short;
    double prev_long_value = 1.0;
    double prev_short_value = 1.0;
};

LiveCohort open_cohort(const AssetPanel& panel, Cohort cohort, int cal_pos) {
    LiveCohort lc;
    lc.cohort = std::move(cohort);
    auto capture = [&](const std::vector<std::uint32_t>& symbols, std::vector<double>& entry,
                       std::vector<double>& rel, std::vector<std::uint8_t>& frozen) {
        entry.reserve(symbols.size());
        for (std::uint32_t sym : symbols) {
            const int s = static_cast<int>(sym);
            const auto u = static_cast<size_t>(cal_pos);
            entry.push_back(lc.cohort.entry_field == PriceField::open ? panel.open(s)[u]
                                                                      : panel.close(s)[u]);
        }
        rel.assign(symbols.size(), 1.0);
        frozen.assign(symbols.size(), 0);
    };
    capture(lc.cohort.long_symbols, lc.entry_long, lc.rel_long, lc.frozen_long);
    capture(lc.cohort.short_symbols, lc.entry_short, lc.rel_short, lc.frozen_short);
    return lc;
}

// Marks one side at a grid date and returns its one-period simple return.
double mark_side(const AssetPanel& panel, const std::vector<std::uint32_t>& symbols,
                 const std::vector<double>& entry, std::vector<double>& rel,
                 std::vector<std::uint8_t>& frozen, int cal_pos, double& prev_value,
                 std::vector<std::string>* events) {
    for (size_t i = 0; i < symbols.size(); ++i) {
        if (frozen[i]) continue;
        const int s = static_cast<int>(symbols[i]);
        if (panel.valid(s, cal_pos)) {
            rel[i] = panel.close(s)[static_cast<size_t>(cal_pos)] / entry[i];
        } else {
            const int last = panel.last_valid_at_or_before(s, cal_pos);
            if (last >= 0) rel[i] = panel.close(s)[static_cast<size_t>(last)] / entry[i];
            frozen[i] = 1;
            if (events)
                events->push_back(panel.calendar().date(cal_pos).to_string() + ": " +
                                  panel.symbols()[symbols[i]] +
                                  " missing mid-hold, closed at last available close");
        }
    }
    double sum = 0.0;
    for (double r : rel) sum += r;
    const double value = sum / static_cast<double>(symbols.size());
    const double period = value / prev_value - 1.0;
    prev_value = value;
    return period;
}

} // namespace

BacktestResult run_backtest_with_scores(const AssetPanel& panel, const StrategyConfig& config,
                                        const ScoreSet& scores, const RankCache& ranks) {
    config.validate();
    const auto grid = scores.grid();
    const int grid_size = static_cast<int>(grid.size());
    const int first = scores.first_formation();

    BacktestResult result;
    result.config = config;

    std::deque<LiveCohort> active;
    bool deployed = false;

    for (int f = first; f < grid_size; ++f) {
        const int cal_pos = grid[static_cast<size_t>(f)];
        const Date today = panel.calendar().date(cal_pos);

        if (deployed) {
            // Period (previous grid date, today]: mark every cohort formed
            // before today and average their zero-cost returns over the 1/K
            // capital split (fewer during warm-up).
            double sum_p = 0.0, sum_w = 0.0, sum_l = 0.0;
            for (LiveCohort& lc : active) {
                const double long_r =
                    mark_side(panel, lc.cohort.long_symbols, lc.entry_long, lc.rel_long,
                              lc.frozen_long, cal_pos, lc.prev_long_value, &result.events);
                const double short_r =
                    mark_side(panel, lc.cohort.short_symbols, lc.entry_short, lc.rel_short,
                              lc.frozen_short, cal_pos, lc.prev_short_value, &result.events);
                sum_p += long_r - short_r;
                if (config.direction == Direction::traditional) {
                    sum_w += long_r;
                    sum_l += short_r;
                } else {
                    sum_w += short_r;
                    sum_l += long_r;
                }
            }
            const auto n = static_cast<double>(active.size());
            const double period = active.empty() ? 0.0 : sum_p / n;
            result.period_returns.push_back(period);
            result.winner_returns.push_back(active.empty() ? 0.0 : sum_w / n);
            result.loser_returns.push_back(active.empty() ? 0.0 : sum_l / n);
            result.period_active.push_back(static_cast<int>(active.size()));
            result.wealth.push_back(result.wealth.back() * (1.0 + period));
            result.dates.push_back(today);
            if (period <= -1.0) {
                result.events.push_back(today.to_string() +
                                        ": period return <= -100%, run halted");
                result.halted = true;
                result.cohorts_held.push_back(static_cast<int>(active.size()));
                return result;
            }
            while (!active.empty() && active.front().cohort.liquidation_pos <= f)
                active.pop_front();
        }

        const auto& ranked = ranks.by_formation[static_cast<size_t>(f - first)];
        if (ranked) {
            Cohort cohort = build_cohort(*ranked, config);
            active.push_back(open_cohort(panel, std::move(cohort), cal_pos));
            if (!deployed) {
                deployed = true;
                result.dates.push_back(today);
                result.wealth.push_back(1.0);
            }
        } else {
            ++result.skipped_formations;
            result.events.push_back(today.to_string() +
                                    ": formation skipped (eligible universe below groups)");
        }
        if (deployed) result.cohorts_held.push_back(static_cast<int>(active.size()));
    }

    if (!deployed)
        throw DataError("no formation date had an eligible universe of at least " +
                        std::to_string(config.groups) + " symbols");
    return result;
}

BacktestResult run_backtest(const AssetPanel& panel, const StrategyConfig& config,
                            const Membership* membership) {
    config.validate();
    auto grid = formation_dates(panel.calendar(), config.timescale);
    if (static_cast<int>(grid.size()) < config.lookback_j + 1)
        throw ConfigError("insufficient history: " + std::to_string(grid.size()) + " " +
                          to_string(config.timescale) + " grid dates, need at least " +
                          std::to_string(config.lookback_j + 1));
    StepSeries steps(panel, std::move(grid));
    const ScoreSet scores = compute_scores(steps, config.momentum, config.mass, config.lookback_j);
    const RankCache ranks = build_rank_cache(panel, scores, config.groups, membership);
    return run_backtest_with_scores(panel, config, scores, ranks);
}

} // namespace physmom
