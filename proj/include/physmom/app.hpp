#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "physmom/analytics.hpp"
#include "physmom/synth.hpp"

namespace physmom::app {

enum class Mode { single, grid, synth };

struct RunConfig {
    Mode mode = Mode::single;
    std::filesystem::path data_dir;
    std::filesystem::path benchmark_file;
    std::filesystem::path membership_file; // optional
    std::filesystem::path out_dir = "out";

    StrategyConfig strategy;                // single mode
    std::vector<Timescale> grid_timescales; // grid mode; empty = all four

    double rf_monthly = 0.0;
    int groups = 50;
    AssetPanel::CalendarPolicy calendar_policy = AssetPanel::CalendarPolicy::union_dates;
    bool sharpe_on_periods = false;
    int threads = 0; // 0 = hardware concurrency

    std::uint64_t seed = 42; // synth mode
    SynthSpec synth;
};

struct GridRow {
    StrategyConfig config;
    RiskReport report;
    BacktestResult result;
};

/// One full grid sweep for a timescale: every enumerated config, backtested
/// and reduced, rows in enumeration order plus the best row (by final wealth)
/// for each momentum/mass combination.
struct GridSummary {
    Timescale timescale = Timescale::day;
    std::vector<GridRow> rows;
    std::vector<std::size_t> best_rows; // indices into rows, one per combo
};

GridSummary run_grid(const AssetPanel& panel, Timescale ts, const RunConfig& cfg,
                     const Membership* membership);

/// Benchmark close curve as (dates, values), skipping missing observations.
std::pair<std::vector<Date>, std::vector<double>> benchmark_curve(const AssetPanel& panel);

// Report writers. All numeric output uses "%.17g" so reruns are byte-identical
// and downstream readers can reproduce values exactly.
void write_wealth_csv(const std::filesystem::path& file, std::span<const Date> dates,
                      std::span<const double> wealth);
void write_report_json(const std::filesystem::path& file, const StrategyConfig& config,
                       const RiskReport& report, const BacktestResult& result);
void write_grid_csv(const std::filesystem::path& file, const GridSummary& summary);
void write_best_csv(const std::filesystem::path& file, const GridSummary& summary);

/// Executes one run. Throws ConfigError (exit 1), DataError (exit 2) or
/// std::runtime_error (exit 3); the CLI maps exceptions to exit codes.
void run(const RunConfig& cfg);

} // namespace physmom::app
