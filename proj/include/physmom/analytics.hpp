#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "physmom/backtest.hpp"

namespace physmom {

// ---- building blocks (also exercised directly by the test oracles) --------

double sample_mean(std::span<const double> xs);
double sample_std(std::span<const double> xs); // divisor n-1, needs n >= 2

/// Maximum drawdown of a wealth curve: min over t of (W_t - peak_t)/peak_t,
/// as a fraction <= 0.
double max_drawdown(std::span<const double> wealth);

/// Negated nearest-rank 5th percentile: -(k-th smallest), k = ceil(0.05 n).
/// Positive whenever the tail return is a loss.
double var95(std::span<const double> returns);

struct CapmFit {
    double alpha = 0.0; // per period, same units as the inputs
    double beta = 0.0;
};
/// OLS of excess portfolio returns on excess benchmark returns. nullopt when
/// fewer than 2 points or the benchmark variance is zero.
std::optional<CapmFit> capm_ols(std::span<const double> portfolio,
                                std::span<const double> benchmark, double rf);

/// Month-end compounding over an observed wealth curve: one return per pair
/// of consecutive observed month-ends, dated at the later month-end. The
/// first observed month only seeds the base (a partial first month is
/// dropped). Throws ConfigError when fewer than two months are observed.
std::vector<std::pair<Date, double>> monthly_returns(std::span<const Date> dates,
                                                     std::span<const double> wealth);

// ---- reporting --------------------------------------------------------------

/// Statistics and risk measures for one strategy: monthly mean/std, final
/// wealth multiple, Sharpe, VaR95, maximum drawdown and CAPM alpha/beta
/// against the benchmark, all over `window`. Percent fields are reported in
/// percent; mdd is negative, var95 positive for a losing tail.
struct RiskReport {
    double monthly_mean_pct = 0.0;
    double monthly_std_pct = 0.0;
    double final_wealth = 1.0;
    std::optional<double> sharpe; // empty when the deviation is zero
    double var95_pct = 0.0;
    double mdd_pct = 0.0;
    std::optional<double> capm_alpha_pct;
    std::optional<double> capm_beta;
    Date window_start, window_end;
    int num_months = 0;
    int num_periods = 0;
};

struct ReportOptions {
    double rf_monthly = 0.0; // monthly risk-free rate, decimal
    std::optional<std::pair<Date, Date>> window;
    /// Sharpe from per-grid-period returns instead of monthly ones (the
    /// monthly convention stays the default; this is an alternative view).
    bool sharpe_on_periods = false;
};

/// Reduces a backtest against a benchmark wealth curve. The benchmark series
/// is any (date, value) curve, e.g. index closes. Throws ConfigError when
/// the clipped windows do not support the statistics.
RiskReport risk_report(const BacktestResult& result, std::span<const Date> bench_dates,
                       std::span<const double> bench_values, const ReportOptions& opts = {});

/// Reporting window for a config: month strategies drop the first calendar
/// year of data (lookbacks up to 12 months), year strategies the first three
/// years; day and week use the full span.
std::pair<Date, Date> benchmark_window(const StrategyConfig& config,
                                       const TradingCalendar& cal);

} // namespace physmom
