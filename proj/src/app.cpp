#include "physmom/app.hpp"

#include <atomic>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "physmom/errors.hpp"

namespace physmom::app {

namespace fs = std::filesystem;

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_opt(const std::optional<double>& v) {
    return v ? fmt(*v) : "nan";
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"") == std::string::npos) return s;
    std::string quoted = "\"";
    for (char ch : s) {
        if (ch == '"') quoted += '"';
        quoted += ch;
    }
    quoted += '"';
    return quoted;
}

/// Clips a wealth curve to the report window and restarts it at 1.
void clipped_wealth(const BacktestResult& r, const RiskReport& rep, std::vector<Date>& dates,
                    std::vector<double>& wealth) {
    dates.clear();
    wealth.clear();
    double base = 0.0;
    for (size_t i = 0; i < r.dates.size(); ++i) {
        if (r.dates[i] < rep.window_start || r.dates[i] > rep.window_end) continue;
        if (dates.empty()) base = r.wealth[i];
        dates.push_back(r.dates[i]);
        wealth.push_back(r.wealth[i] / base);
    }
}

struct SignalKey {
    MomentumKind momentum;
    MassKind mass;
    int lookback;
    auto operator<=>(const SignalKey&) const = default;
};

} // namespace

std::pair<std::vector<Date>, std::vector<double>> benchmark_curve(const AssetPanel& panel) {
    std::pair<std::vector<Date>, std::vector<double>> out;
    for (int t = 0; t < panel.num_dates(); ++t) {
        if (!panel.benchmark_valid(t)) continue;
        out.first.push_back(panel.calendar().date(t));
        out.second.push_back(panel.benchmark_close()[static_cast<size_t>(t)]);
    }
    return out;
}

GridSummary run_grid(const AssetPanel& panel, Timescale ts, const RunConfig& cfg,
                     const Membership* membership) {
    auto configs = enumerate_grid(ts);
    for (auto& c : configs) c.groups = cfg.groups;

    auto grid = formation_dates(panel.calendar(), ts);
    const int max_j = [&] {
        int m = 0;
        for (const auto& c : configs) m = std::max(m, c.lookback_j);
        return m;
    }();
    if (static_cast<int>(grid.size()) < max_j + 1)
        throw ConfigError("insufficient history for the " + std::string(to_string(ts)) +
                          " grid: " + std::to_string(grid.size()) + " grid dates");

    const StepSeries steps(panel, grid);

    // Scores and ranks depend only on (momentum, mass, J); share them across
    // every K and direction.
    std::map<SignalKey, std::vector<size_t>> by_signal;
    for (size_t i = 0; i < configs.size(); ++i)
        by_signal[{configs[i].momentum, configs[i].mass, configs[i].lookback_j}].push_back(i);
    std::vector<std::pair<SignalKey, std::vector<size_t>>> tasks(by_signal.begin(),
                                                                 by_signal.end());

    GridSummary summary;
    summary.timescale = ts;
    summary.rows.resize(configs.size());

    const auto [bench_dates, bench_values] = benchmark_curve(panel);
    ReportOptions ropts;
    ropts.rf_monthly = cfg.rf_monthly;
    ropts.sharpe_on_periods = cfg.sharpe_on_periods;
    ropts.window = benchmark_window(configs.front(), panel.calendar());

    unsigned n_threads = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads)
                                         : std::thread::hardware_concurrency();
    n_threads = std::max(1u, std::min<unsigned>(n_threads, tasks.size()));

    std::atomic<size_t> next{0};
    std::atomic<bool> failed{false};
    std::string error_text;
    std::mutex error_mutex;

    auto worker = [&] {
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= tasks.size() || failed.load()) return;
            try {
                const auto& [key, members] = tasks[i];
                const ScoreSet scores =
                    compute_scores(steps, key.momentum, key.mass, key.lookback);
                const RankCache ranks =
                    build_rank_cache(panel, scores, cfg.groups, membership);
                for (size_t idx : members) {
                    GridRow row;
                    row.config = configs[idx];
                    row.result = run_backtest_with_scores(panel, configs[idx], scores, ranks);
                    row.report = risk_report(row.result, bench_dates, bench_values, ropts);
                    summary.rows[idx] = std::move(row);
                }
            } catch (const std::exception& e) {
                std::scoped_lock lock(error_mutex);
                error_text = e.what();
                failed.store(true);
                return;
            }
        }
    };

    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (failed.load()) throw DataError("grid sweep failed: " + error_text);

    // Best row per momentum/mass combination by final wealth.
    std::map<std::pair<MomentumKind, MassKind>, size_t> best;
    for (size_t i = 0; i < summary.rows.size(); ++i) {
        const auto& row = summary.rows[i];
        const auto key = std::make_pair(row.config.momentum, row.config.mass);
        auto it = best.find(key);
        if (it == best.end() ||
            row.report.final_wealth > summary.rows[it->second].report.final_wealth)
            best[key] = i;
    }
    for (const auto& [key, idx] : best) summary.best_rows.push_back(idx);
    return summary;
}

void write_wealth_csv(const fs::path& file, std::span<const Date> dates,
                      std::span<const double> wealth) {
    std::ofstream out(file);
    if (!out) throw DataError("cannot write " + file.string());
    out << "date,wealth\n";
    for (size_t i = 0; i < dates.size(); ++i)
        out << dates[i].to_string() << "," << fmt(wealth[i]) << "\n";
}

void write_report_json(const fs::path& file, const StrategyConfig& config,
                       const RiskReport& report, const BacktestResult& result) {
    nlohmann::ordered_json j;
    j["config"] = {
        {"momentum", to_string(config.momentum)},
        {"mass", to_string(config.mass)},
        {"timescale", to_string(config.timescale)},
        {"lookback_j", config.lookback_j},
        {"holding_k", config.holding_k},
        {"direction", to_string(config.direction)},
        {"groups", config.groups},
    };
    j["window"] = {{"start", report.window_start.to_string()},
                   {"end", report.window_end.to_string()}};
    auto opt = [](const std::optional<double>& v) {
        return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
    };
    j["metrics"] = {
        {"monthly_mean_pct", report.monthly_mean_pct},
        {"monthly_std_pct", report.monthly_std_pct},
        {"final_wealth", report.final_wealth},
        {"sharpe", opt(report.sharpe)},
        {"var95_pct", report.var95_pct},
        {"mdd_pct", report.mdd_pct},
        {"capm_alpha_pct", opt(report.capm_alpha_pct)},
        {"capm_beta", opt(report.capm_beta)},
    };
    j["series"] = {
        {"num_periods", report.num_periods},
        {"num_months", report.num_months},
        {"skipped_formations", result.skipped_formations},
        {"halted", result.halted},
    };
    j["events"] = result.events;
    std::ofstream out(file);
    if (!out) throw DataError("cannot write " + file.string());
    out << j.dump(2) << "\n";
}

void write_grid_csv(const fs::path& file, const GridSummary& summary) {
    std::ofstream out(file);
    if (!out) throw DataError("cannot write " + file.string());
    out << "config,portfolio,jk,momentum,mass,J,K,direction,groups,window_start,"
           "window_end,months,periods,mean_pct,std_pct,final_wealth,sharpe,var95_pct,mdd_pct,"
           "capm_alpha_pct,capm_beta,skipped_formations,halted\n";
    for (const auto& row : summary.rows) {
        const auto& c = row.config;
        const auto& r = row.report;
        out << c.slug() << "," << csv_field(c.portfolio_label()) << "," << c.jk_label() << ","
            << to_string(c.momentum) << "," << to_string(c.mass) << "," << c.lookback_j << ","
            << c.holding_k << "," << to_string(c.direction) << "," << c.groups << ","
            << r.window_start.to_string() << "," << r.window_end.to_string()
            << "," << r.num_months << "," << r.num_periods << "," << fmt(r.monthly_mean_pct)
            << "," << fmt(r.monthly_std_pct) << "," << fmt(r.final_wealth) << ","
            << fmt_opt(r.sharpe) << "," << fmt(r.var95_pct) << "," << fmt(r.mdd_pct) << ","
            << fmt_opt(r.capm_alpha_pct) << "," << fmt_opt(r.capm_beta) << ","
            << row.result.skipped_formations << "," << (row.result.halted ? 1 : 0) << "\n";
    }
}

void write_best_csv(const fs::path& file, const GridSummary& summary) {
    std::ofstream out(file);
    if (!out) throw DataError("cannot write " + file.string());
    out << "Portfolio,Strategy,J-K,Basket,Mean,Std. Dev.,Fin. Wealth,Sharpe,VaR95,MDD\n";
    for (size_t idx : summary.best_rows) {
        const auto& row = summary.rows[idx];
        const auto& c = row.config;
        const auto& r = row.report;
        out << csv_field(c.portfolio_label()) << ","
            << (c.direction == Direction::traditional ? "Traditional" : "Contrarian") << ","
            << c.jk_label() << "," << c.basket_label() << "," << fmt(r.monthly_mean_pct) << ","
            << fmt(r.monthly_std_pct) << "," << fmt(r.final_wealth) << "," << fmt_opt(r.sharpe)
            << "," << fmt(r.var95_pct) << "," << fmt(r.mdd_pct) << "\n";
    }
}

namespace {

void run_single(const RunConfig& cfg) {
    LoadReport load_rep;
    const AssetPanel panel =
        load_panel(cfg.data_dir, cfg.benchmark_file, cfg.calendar_policy, &load_rep);
    for (const auto& w : load_rep.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());

    Membership membership;
    if (!cfg.membership_file.empty()) membership = Membership::load(cfg.membership_file);

    StrategyConfig strat = cfg.strategy;
    strat.groups = cfg.groups;
    strat.validate();

    const BacktestResult result =
        run_backtest(panel, strat, membership.empty() ? nullptr : &membership);

    const auto [bench_dates, bench_values] = benchmark_curve(panel);
    ReportOptions ropts;
    ropts.rf_monthly = cfg.rf_monthly;
    ropts.sharpe_on_periods = cfg.sharpe_on_periods;
    ropts.window = benchmark_window(strat, panel.calendar());
    const RiskReport report = risk_report(result, bench_dates, bench_values, ropts);

    fs::create_directories(cfg.out_dir);
    std::vector<Date> wd;
    std::vector<double> ww;
    clipped_wealth(result, report, wd, ww);
    write_wealth_csv(cfg.out_dir / ("wealth_" + strat.slug() + ".csv"), wd, ww);
    write_report_json(cfg.out_dir / ("report_" + strat.slug() + ".json"), strat, report,
                      result);
}

void run_grid_mode(const RunConfig& cfg) {
    LoadReport load_rep;
    const AssetPanel panel =
        load_panel(cfg.data_dir, cfg.benchmark_file, cfg.calendar_policy, &load_rep);
    for (const auto& w : load_rep.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());

    Membership membership;
    if (!cfg.membership_file.empty()) membership = Membership::load(cfg.membership_file);
    const Membership* mem = membership.empty() ? nullptr : &membership;

    auto timescales = cfg.grid_timescales;
    if (timescales.empty())
        timescales = {Timescale::day, Timescale::week, Timescale::month, Timescale::year};

    fs::create_directories(cfg.out_dir);
    for (Timescale ts : timescales) {
        const GridSummary summary = run_grid(panel, ts, cfg, mem);
        write_grid_csv(cfg.out_dir / ("grid_" + std::string(to_string(ts)) + ".csv"), summary);
        write_best_csv(cfg.out_dir / ("best_" + std::string(to_string(ts)) + ".csv"), summary);
        for (const auto& row : summary.rows)
            write_report_json(cfg.out_dir / ("report_" + row.config.slug() + ".json"),
                              row.config, row.report, row.result);
        std::vector<Date> wd;
        std::vector<double> ww;
        for (size_t idx : summary.best_rows) {
            const auto& row = summary.rows[idx];
            clipped_wealth(row.result, row.report, wd, ww);
            write_wealth_csv(cfg.out_dir / ("wealth_" + row.config.slug() + ".csv"), wd, ww);
        }
    }
}

} // namespace

void run(const RunConfig& cfg) {
    switch (cfg.mode) {
        case Mode::single: run_single(cfg); break;
        case Mode::grid: run_grid_mode(cfg); break;
        case Mode::synth:
            cfg.synth.validate();
            write_synth_panel(cfg.synth, cfg.seed, cfg.out_dir);
            break;
    }
}

} // namespace physmom::app
