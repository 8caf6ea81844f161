#include "physmom/analytics.hpp"

#include <algorithm>
#include <cmath>

#include "physmom/errors.hpp"

namespace physmom {

double sample_mean(std::span<const double> xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

double sample_std(std::span<const double> xs) {
    if (xs.size() < 2) throw ConfigError("sample_std needs at least 2 observations");
    const double mean = sample_mean(xs);
    double s2 = 0.0;
    for (double x : xs) {
        const double d = x - mean;
        s2 += d * d;
    }
    return std::sqrt(s2 / static_cast<double>(xs.size() - 1));
}

double max_drawdown(std::span<const double> wealth) {
    double peak = wealth.empty() ? 1.0 : wealth[0];
    double mdd = 0.0;
    for (double w : wealth) {
        peak = std::max(peak, w);
        mdd = std::min(mdd, (w - peak) / peak);
    }
    return mdd;
}

double var95(std::span<const double> returns) {
    if (returns.empty()) throw ConfigError("var95 of an empty return series");
    std::vector<double> sorted(returns.begin(), returns.end());
    std::sort(sorted.begin(), sorted.end());
    const auto n = sorted.size();
    const size_t rank = static_cast<size_t>(std::ceil(0.05 * static_cast<double>(n))); // 1-based
    return -sorted[std::max<size_t>(rank, 1) - 1];
}

std::optional<CapmFit> capm_ols(std::span<const double> portfolio,
                                std::span<const double> benchmark, double rf) {
    if (portfolio.size() != benchmark.size() || portfolio.size() < 2) return std::nullopt;
    const auto n = portfolio.size();
    std::vector<double> y(n), x(n);
    for (size_t i = 0; i < n; ++i) {
        y[i] = portfolio[i] - rf;
        x[i] = benchmark[i] - rf;
    }
    const bool constant_x = std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; });
    if (constant_x) return std::nullopt;
    const double xbar = sample_mean(x);
    const double ybar = sample_mean(y);
    double sxx = 0.0, sxy = 0.0;
    for (size_t i = 0; i < n; ++i) {
        sxx += (x[i] - xbar) * (x[i] - xbar);
        sxy += (x[i] - xbar) * (y[i] - ybar);
    }
    if (sxx == 0.0) return std::nullopt;
    CapmFit fit;
    fit.beta = sxy / sxx;
    fit.alpha = ybar - fit.beta * xbar;
    return fit;
}

std::vector<std::pair<Date, double>> monthly_returns(std::span<const Date> dates,
                                                     std::span<const double> wealth) {
    if (dates.size() != wealth.size() || dates.empty())
        throw ConfigError("monthly_returns needs matching, non-empty date/wealth series");
    // Last observation in each observed calendar month.
    std::vector<std::pair<Date, double>> month_ends;
    for (size_t i = 0; i < dates.size(); ++i) {
        const bool new_month = month_ends.empty() ||
                               dates[i].year() != month_ends.back().first.year() ||
                               dates[i].month() != month_ends.back().first.month();
        if (new_month)
            month_ends.emplace_back(dates[i], wealth[i]);
        else
            month_ends.back() = {dates[i], wealth[i]};
    }
    if (month_ends.size() < 2)
        throw ConfigError("monthly_returns needs observations in at least 2 months");
    std::vector<std::pair<Date, double>> out;
    out.reserve(month_ends.size() - 1);
    for (size_t i = 1; i < month_ends.size(); ++i)
        out.emplace_back(month_ends[i].first,
                         month_ends[i].second / month_ends[i - 1].second - 1.0);
    return out;
}

namespace {

// Clips a (date, value) curve to [start, end].
void clip(std::span<const Date> dates, std::span<const double> values, Date start, Date end,
          std::vector<Date>& out_dates, std::vector<double>& out_values) {
    out_dates.clear();
    out_values.clear();
    for (size_t i = 0; i < dates.size(); ++i) {
        if (dates[i] < start || dates[i] > end) continue;
        out_dates.push_back(dates[i]);
        out_values.push_back(values[i]);
    }
}

} // namespace

RiskReport risk_report(const BacktestResult& result, std::span<const Date> bench_dates,
                       std::span<const double> bench_values, const ReportOptions& opts) {
    if (result.dates.empty()) throw ConfigError("risk_report on an empty backtest");

    Date start = result.dates.front();
    Date end = result.dates.back();
    if (opts.window) {
        start = std::max(start, opts.window->first);
        end = std::min(end, opts.window->second);
    }

    std::vector<Date> pd;
    std::vector<double> pw;
    clip(result.dates, result.wealth, start, end, pd, pw);
    if (pd.size() < 2) throw ConfigError("reporting window holds fewer than 2 observations");

    RiskReport rep;
    rep.window_start = pd.front();
    rep.window_end = pd.back();
    rep.num_periods = static_cast<int>(pd.size()) - 1;
    rep.final_wealth = pw.back() / pw.front();
    rep.mdd_pct = 100.0 * max_drawdown(pw);

    const auto monthly = monthly_returns(pd, pw);
    std::vector<double> mrets(monthly.size());
    for (size_t i = 0; i < monthly.size(); ++i) mrets[i] = monthly[i].second;
    rep.num_months = static_cast<int>(mrets.size());
    const double mean = sample_mean(mrets);
    const double sd = sample_std(mrets);
    rep.monthly_mean_pct = 100.0 * mean;
    rep.monthly_std_pct = 100.0 * sd;
    rep.var95_pct = 100.0 * var95(mrets);

    if (opts.sharpe_on_periods) {
        std::vector<double> prets(pd.size() - 1);
        for (size_t i = 1; i < pd.size(); ++i) prets[i - 1] = pw[i] / pw[i - 1] - 1.0;
        const double psd = prets.size() >= 2 ? sample_std(prets) : 0.0;
        if (psd > 0.0) rep.sharpe = (sample_mean(prets) - opts.rf_monthly) / psd;
    } else if (sd > 0.0) {
        rep.sharpe = (mean - opts.rf_monthly) / sd;
    }

    // CAPM over the months both series observe.
    std::vector<Date> bd;
    std::vector<double> bw;
    clip(bench_dates, bench_values, start, end, bd, bw);
    if (bd.size() >= 2) {
        const auto bench_monthly = monthly_returns(bd, bw);
        std::vector<double> py, bx;
        size_t bi = 0;
        for (const auto& [md, mr] : monthly) {
            while (bi < bench_monthly.size() &&
                   std::pair(bench_monthly[bi].first.year(), bench_monthly[bi].first.month()) <
                       std::pair(md.year(), md.month()))
                ++bi;
            if (bi < bench_monthly.size() &&
                bench_monthly[bi].first.year() == md.year() &&
                bench_monthly[bi].first.month() == md.month()) {
                py.push_back(mr);
                bx.push_back(bench_monthly[bi].second);
            }
        }
        if (auto fit = capm_ols(py, bx, opts.rf_monthly)) {
            rep.capm_alpha_pct = 100.0 * fit->alpha;
            rep.capm_beta = fit->beta;
        }
    }
    return rep;
}

std::pair<Date, Date> benchmark_window(const StrategyConfig& config,
                                       const TradingCalendar& cal) {
    if (cal.empty()) throw ConfigError("benchmark_window on an empty calendar");
    const Date first = cal.date(0);
    const Date last = cal.date(cal.size() - 1);
    // Month lookbacks run up to 12 months, so reporting starts one year in.
    // Year lookbacks run up to the three-year warm-up and the first yearly
    // return completes a year after that, so reporting starts four years in
    // (2014 data begins reporting in 2018).
    int skip_years = 0;
    if (config.timescale == Timescale::month) skip_years = 1;
    if (config.timescale == Timescale::year) skip_years = 4;
    if (skip_years == 0) return {first, last};
    const Date start = Date::from_ymd(first.year() + skip_years, 1, 1);
    return {std::min(start, last), last};
}

} // namespace physmom
