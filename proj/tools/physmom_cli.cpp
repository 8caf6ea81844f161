#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "physmom/app.hpp"
#include "physmom/errors.hpp"
#include "physmom/kernels.hpp"

// Exit codes: 0 ok, 1 configuration error, 2 data error, 3 runtime error.

namespace {

using physmom::app::Mode;
using physmom::app::RunConfig;

int run_app(const RunConfig& cfg) {
    try {
        physmom::app::run(cfg);
        return 0;
    } catch (const physmom::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const physmom::DataError& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App cli{"Cross-sectional physical-momentum backtester"};
    cli.set_config("--config", "", "Key-value config file; command-line flags override it");

    RunConfig cfg;
    std::string mode = "single";
    std::string momentum = "p1", mass = "turnover", direction = "traditional";
    std::vector<std::string> timescales;
    std::string calendar_policy = "union";
    std::string start_date;
    std::string backend;

    cli.add_option("--mode", mode, "single | grid | synth")
        ->check(CLI::IsMember({"single", "grid", "synth"}));
    cli.add_option("--data-dir", cfg.data_dir, "Directory of per-symbol CSV files");
    cli.add_option("--benchmark", cfg.benchmark_file, "Benchmark CSV (date,close)");
    cli.add_option("--membership", cfg.membership_file,
                   "Optional universe membership CSV (date,symbol,action)");
    cli.add_option("--out", cfg.out_dir, "Output directory");
    cli.add_option("--momentum", momentum, "p1 | p2 | p3");
    cli.add_option("--mass", mass, "turnover | inv_turnover | inv_vol");
    cli.add_option("--timescale", timescales,
                   "day | week | month | year (repeatable in grid mode)");
    cli.add_option("--J", cfg.strategy.lookback_j, "Lookback periods");
    cli.add_option("--K", cfg.strategy.holding_k, "Holding periods");
    cli.add_option("--direction", direction, "traditional | contrarian");
    cli.add_option("--groups", cfg.groups, "Ranking group count (default 50)");
    cli.add_option("--rf", cfg.rf_monthly, "Monthly risk-free rate, decimal (default 0)");
    cli.add_option("--seed", cfg.seed, "Seed for synth mode");
    cli.add_option("--calendar-policy", calendar_policy, "union | intersection");
    cli.add_option("--threads", cfg.threads, "Worker threads for grid sweeps (0 = auto)");
    cli.add_flag("--sharpe-on-periods", cfg.sharpe_on_periods,
                 "Compute Sharpe from per-grid-period returns instead of monthly ones");
    cli.add_option("--symbols", cfg.synth.num_symbols, "synth: symbol count");
    cli.add_option("--days", cfg.synth.num_days, "synth: trading-day count");
    cli.add_option("--start", start_date, "synth: first date (YYYY-MM-DD)");
    cli.add_option("--missing-prob", cfg.synth.missing_prob,
                   "synth: chance per symbol-day of a short data gap");
    cli.add_option("--kernel-backend", backend, "scalar | avx2 (default: best available)");

    CLI11_PARSE(cli, argc, argv);

    try {
        if (mode == "single") cfg.mode = Mode::single;
        else if (mode == "grid") cfg.mode = Mode::grid;
        else cfg.mode = Mode::synth;

        if (auto m = physmom::momentum_from_string(momentum)) cfg.strategy.momentum = *m;
        else throw physmom::ConfigError("unknown momentum '" + momentum + "'");
        if (auto m = physmom::mass_from_string(mass)) cfg.strategy.mass = *m;
        else throw physmom::ConfigError("unknown mass '" + mass + "'");
        if (auto d = physmom::direction_from_string(direction)) cfg.strategy.direction = *d;
        else throw physmom::ConfigError("unknown direction '" + direction + "'");

        for (const auto& t : timescales) {
            auto ts = physmom::timescale_from_string(t);
            if (!ts) throw physmom::ConfigError("unknown timescale '" + t + "'");
            cfg.grid_timescales.push_back(*ts);
        }
        if (cfg.mode == Mode::single) {
            if (cfg.grid_timescales.size() > 1)
                throw physmom::ConfigError("single mode takes exactly one --timescale");
            if (!cfg.grid_timescales.empty()) cfg.strategy.timescale = cfg.grid_timescales[0];
        }

        if (calendar_policy == "union")
            cfg.calendar_policy = physmom::AssetPanel::CalendarPolicy::union_dates;
        else if (calendar_policy == "intersection")
            cfg.calendar_policy = physmom::AssetPanel::CalendarPolicy::intersection;
        else
            throw physmom::ConfigError("unknown calendar policy '" + calendar_policy + "'");

        if (!start_date.empty()) cfg.synth.start_date = physmom::Date::parse(start_date);

        if (!backend.empty()) {
            if (backend == "scalar")
                physmom::kernels::force_backend(physmom::kernels::Backend::scalar);
            else if (backend == "avx2")
                physmom::kernels::force_backend(physmom::kernels::Backend::avx2);
            else
                throw physmom::ConfigError("unknown kernel backend '" + backend + "'");
        }

        if (cfg.mode != Mode::synth) {
            if (cfg.data_dir.empty()) throw physmom::ConfigError("--data-dir is required");
            if (cfg.benchmark_file.empty())
                throw physmom::ConfigError("--benchmark is required");
        }
    } catch (const physmom::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    }

    return run_app(cfg);
}
