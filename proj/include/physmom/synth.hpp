#pragma once

#include <cstdint>
#include <filesystem>

#include "physmom/market_data.hpp"

namespace physmom {

/// Synthetic market generator: per-symbol geometric random walks on a
/// weekday calendar, lognormal daily volume, constant shares outstanding.
/// Per-symbol drift/vol are drawn from the ranges below. Fully determined by
/// the seed (the normal sampler is hand-rolled, not implementation-defined).
struct SynthSpec {
    int num_symbols = 10;
    int num_days = 60;
    Date start_date = Date::from_ymd(2014, 1, 1); // advanced to the next weekday

    double init_price_min = 20.0;
    double init_price_max = 800.0;
    double daily_drift_min = -0.0008;
    double daily_drift_max = 0.0015;
    double daily_vol_min = 0.004;
    double daily_vol_max = 0.035;

    double base_volume_min = 2e4;
    double base_volume_max = 5e6;
    double volume_log_sigma = 0.7;
    double shares_min = 1e7;
    double shares_max = 1e9;

    /// Chance per symbol-day of opening a 1-3 day data gap (missing bars).
    double missing_prob = 0.0;

    double benchmark_drift = 0.0004;
    double benchmark_vol = 0.010;

    void validate() const; // throws ConfigError
};

AssetPanel synth_panel(const SynthSpec& spec, std::uint64_t seed);

/// Generates and writes the panel in the load_panel layout:
/// <out_dir>/symbols/*.csv and <out_dir>/benchmark.csv.
void write_synth_panel(const SynthSpec& spec, std::uint64_t seed,
                       const std::filesystem::path& out_dir);

} // namespace physmom
