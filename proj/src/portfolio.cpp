#include "physmom/portfolio.hpp"

#include <algorithm>

#include "physmom/errors.hpp"

namespace physmom {

const char* to_string(Direction d) {
    return d == Direction::traditional ? "traditional" : "contrarian";
}

std::optional<Direction> direction_from_string(std::string_view s) {
    if (s == "traditional") return Direction::traditional;
    if (s == "contrarian") return Direction::contrarian;
    return std::nullopt;
}

namespace {

struct JkRange {
    int j_min, j_max, k_min, k_max;
};

JkRange jk_range(Timescale ts, MomentumKind momentum) {
    switch (ts) {
        case Timescale::day: return {momentum == MomentumKind::p3 ? 2 : 1, 7, 1, 7};
        case Timescale::week: return {2, 8, 1, 8};
        case Timescale::month: return {3, 12, 1, 12};
        case Timescale::year: return {2, 5, 1, 3};
    }
    return {0, 0, 0, 0};
}

bool jk_allowed(Timescale ts, MomentumKind momentum, int j, int k) {
    const JkRange r = jk_range(ts, momentum);
    if (j < r.j_min || j > r.j_max || k < r.k_min || k > r.k_max) return false;
    if (ts == Timescale::year && j + k > 8) return false;
    return true;
}

} // namespace

void StrategyConfig::validate() const {
    if (!compatible(momentum, mass))
        throw ConfigError(std::string("mass ") + to_string(mass) + " is not valid for " +
                          to_string(momentum));
    if (!jk_allowed(timescale, momentum, lookback_j, holding_k))
        throw ConfigError("J=" + std::to_string(lookback_j) + " K=" +
                          std::to_string(holding_k) + " is outside the " +
                          std::string(to_string(timescale)) + " grid for " +
                          to_string(momentum));
    if (groups < 2) throw ConfigError("groups must be >= 2");
}

std::string StrategyConfig::slug() const {
    return std::string(to_string(timescale)) + "_" + to_string(momentum) + "_" +
           to_string(mass) + "_J" + std::to_string(lookback_j) + "_K" +
           std::to_string(holding_k) + "_" + to_string(direction);
}

std::string StrategyConfig::portfolio_label() const {
    std::string mass_txt;
    switch (mass) {
        case MassKind::turnover_rate: mass_txt = "u"; break;
        case MassKind::inverse_turnover: mass_txt = "1/u"; break;
        case MassKind::inverse_volatility: mass_txt = "1/s"; break;
    }
    const std::string star = direction == Direction::contrarian ? "*" : "";
    const char digit = to_string(momentum)[1];
    return "p" + star + std::string(1, digit) + "(" + mass_txt + ",R)";
}

std::string StrategyConfig::jk_label() const {
    return std::to_string(lookback_j) + "-" + std::to_string(holding_k);
}

std::string StrategyConfig::basket_label() const {
    return direction == Direction::traditional ? "W - L" : "L - W";
}

std::vector<StrategyConfig> enumerate_grid(Timescale ts) {
    static constexpr std::pair<MomentumKind, MassKind> combos[] = {
        {MomentumKind::p1, MassKind::turnover_rate},
        {MomentumKind::p1, MassKind::inverse_turnover},
        {MomentumKind::p2, MassKind::turnover_rate},
        {MomentumKind::p2, MassKind::inverse_turnover},
        {MomentumKind::p3, MassKind::inverse_volatility},
    };
    std::vector<StrategyConfig> out;
    for (Direction dir : {Direction::traditional, Direction::contrarian}) {
        for (const auto& [momentum, mass] : combos) {
            const JkRange r = jk_range(ts, momentum);
            for (int j = r.j_min; j <= r.j_max; ++j)
                for (int k = r.k_min; k <= r.k_max; ++k) {
                    if (!jk_allowed(ts, momentum, j, k)) continue;
                    StrategyConfig c;
                    c.momentum = momentum;
                    c.mass = mass;
                    c.timescale = ts;
                    c.lookback_j = j;
                    c.holding_k = k;
                    c.direction = dir;
                    out.push_back(c);
                }
        }
    }
    return out;
}

std::vector<int> formation_dates(const TradingCalendar& cal, Timescale ts) {
    return cal.period_starts(ts);
}

std::optional<RankedGroups> rank_universe(const ScoreSet& scores, int formation, int groups,
                                          const std::uint8_t* member_mask) {
    if (groups < 2) throw ConfigError("groups must be >= 2");
    if (formation < scores.first_formation() ||
        formation >= static_cast<int>(scores.grid().size()))
        throw ConfigError("formation position outside the scored grid");

    RankedGroups rg;
    rg.formation = formation;
    rg.order.reserve(static_cast<size_t>(scores.num_symbols()));
    for (int s = 0; s < scores.num_symbols(); ++s) {
        if (!scores.eligible(formation, s)) continue;
        if (member_mask && !member_mask[s]) continue;
        rg.order.push_back(static_cast<std::uint32_t>(s));
    }
    if (static_cast<int>(rg.order.size()) < groups) return std::nullopt;

    std::sort(rg.order.begin(), rg.order.end(), [&](std::uint32_t a, std::uint32_t b) {
        const double sa = scores.score(formation, static_cast<int>(a));
        const double sb = scores.score(formation, static_cast<int>(b));
        if (sa != sb) return sa < sb;
        return a < b; // symbols are stored sorted, so index order is lexicographic
    });

    // First (universe mod groups) groups take one extra symbol.
    const int universe = static_cast<int>(rg.order.size());
    const int base = universe / groups;
    const int extra = universe % groups;
    rg.bounds.resize(static_cast<size_t>(groups) + 1);
    rg.bounds[0] = 0;
    for (int g = 0; g < groups; ++g)
        rg.bounds[static_cast<size_t>(g) + 1] =
            rg.bounds[static_cast<size_t>(g)] + static_cast<std::uint32_t>(base + (g < extra));
    return rg;
}

std::optional<RankedGroups> rank_universe(const AssetPanel& panel, const StrategyConfig& config,
                                          Date formation_date) {
    config.validate();
    StepSeries steps(panel, formation_dates(panel.calendar(), config.timescale));
    auto cal_idx = panel.calendar().index_of(formation_date);
    if (!cal_idx) throw ConfigError(formation_date.to_string() + " is not a trading date");
    auto grid = steps.grid();
    auto it = std::find(grid.begin(), grid.end(), *cal_idx);
    if (it == grid.end())
        throw ConfigError(formation_date.to_string() + " is not a formation date");
    const auto scores = compute_scores(steps, config.momentum, config.mass, config.lookback_j);
    return rank_universe(scores, static_cast<int>(it - grid.begin()), config.groups);
}

Cohort build_cohort(const RankedGroups& groups, const StrategyConfig& config) {
    Cohort c;
    c.formation_pos = groups.formation;
    c.liquidation_pos = groups.formation + config.holding_k;
    c.entry_field = config.timescale == Timescale::day ? PriceField::open : PriceField::close;
    auto winners = groups.winners();
    auto losers = groups.losers();
    if (config.direction == Direction::traditional) {
        c.long_symbols.assign(winners.begin(), winners.end());
        c.short_symbols.assign(losers.begin(), losers.end());
    } else {
        c.long_symbols.assign(losers.begin(), losers.end());
        c.short_symbols.assign(winners.begin(), winners.end());
    }
    // canonical basket order: ascending symbol index
    std::sort(c.long_symbols.begin(), c.long_symbols.end());
    std::sort(c.short_symbols.begin(), c.short_symbols.end());
    return c;
}

} // namespace physmom
