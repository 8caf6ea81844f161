#include "physmom/synth.hpp"

#include <cmath>
#include <random>

#include "physmom/errors.hpp"

namespace physmom {

namespace {

// Deterministic across standard libraries: mt19937_64 plus hand-rolled
// uniform/normal transforms (std::normal_distribution is
// implementation-defined).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform01() { // [0, 1)
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
    double log_uniform(double lo, double hi) {
        return std::exp(uniform(std::log(lo), std::log(hi)));
    }
    double normal() { // Box-Muller, one value per pair of uniforms
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u = uniform01();
        while (u == 0.0) u = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u));
        const double theta = 2.0 * 3.14159265358979323846 * uniform01();
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }
    std::uint64_t integer(std::uint64_t n) { return gen_() % n; }

private:
    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

std::vector<Date> weekday_calendar(Date start, int count) {
    std::vector<Date> out;
    out.reserve(static_cast<size_t>(count));
    Date d = start;
    while (d.weekday() >= 5) d = d + 1;
    while (static_cast<int>(out.size()) < count) {
        out.push_back(d);
        do d = d + 1;
        while (d.weekday() >= 5);
    }
    return out;
}

} // namespace

void SynthSpec::validate() const {
    if (num_symbols < 1 || num_days < 2)
        throw ConfigError("synthetic panel needs at least 1 symbol and 2 days");
    if (init_price_min <= 0.0 || init_price_max < init_price_min)
        throw ConfigError("bad synthetic price range");
    if (daily_vol_min < 0.0 || daily_vol_max < daily_vol_min)
        throw ConfigError("bad synthetic volatility range");
    if (daily_drift_max < daily_drift_min) throw ConfigError("bad synthetic drift range");
    if (missing_prob < 0.0 || missing_prob > 0.5)
        throw ConfigError("missing_prob must be in [0, 0.5]");
    if (shares_min <= 0.0 || base_volume_min < 0.0)
        throw ConfigError("bad synthetic volume/shares range");
}

AssetPanel synth_panel(const SynthSpec& spec, std::uint64_t seed) {
    spec.validate();
    Rng rng(seed);
    const auto dates = weekday_calendar(spec.start_date, spec.num_days);

    AssetPanel::Input in;
    in.symbols.reserve(static_cast<size_t>(spec.num_symbols));
    in.bars.reserve(static_cast<size_t>(spec.num_symbols));

    for (int s = 0; s < spec.num_symbols; ++s) {
        char name[16];
        std::snprintf(name, sizeof name, "SYM%03d", s);
        in.symbols.emplace_back(name);

        const double drift = rng.uniform(spec.daily_drift_min, spec.daily_drift_max);
        const double vol = rng.uniform(spec.daily_vol_min, spec.daily_vol_max);
        const double base_volume = rng.log_uniform(std::max(spec.base_volume_min, 1.0),
                                                   std::max(spec.base_volume_max, 1.0));
        const double shares =
            std::round(rng.log_uniform(spec.shares_min, spec.shares_max));
        double close = rng.log_uniform(spec.init_price_min, spec.init_price_max);

        std::vector<Bar> bars;
        bars.reserve(dates.size());
        int gap_left = 0;
        for (const Date& d : dates) {
            // Evolve the walk through gaps too, so a gap hides data rather
            // than pausing the price process.
            const double prev_close = close;
            close = close * std::exp(drift - 0.5 * vol * vol + vol * rng.normal());
            const double open = prev_close * std::exp(0.3 * vol * rng.normal());
            const double volume =
                std::round(base_volume * std::exp(spec.volume_log_sigma * rng.normal()));

            if (gap_left > 0) {
                --gap_left;
                continue;
            }
            if (spec.missing_prob > 0.0 && rng.uniform01() < spec.missing_prob) {
                gap_left = static_cast<int>(rng.integer(3));
                continue;
            }
            Bar b;
            b.date = d;
            b.open = open;
            b.close = close;
            b.volume = volume;
            b.shares_outstanding = shares;
            bars.push_back(b);
        }
        in.bars.push_back(std::move(bars));
    }

    double bench = 10000.0;
    in.benchmark.reserve(dates.size());
    for (const Date& d : dates) {
        bench = bench * std::exp(spec.benchmark_drift -
                                 0.5 * spec.benchmark_vol * spec.benchmark_vol +
                                 spec.benchmark_vol * rng.normal());
        in.benchmark.emplace_back(d, bench);
    }

    return AssetPanel::build(std::move(in), AssetPanel::CalendarPolicy::union_dates);
}

void write_synth_panel(const SynthSpec& spec, std::uint64_t seed,
                       const std::filesystem::path& out_dir) {
    write_panel(synth_panel(spec, seed), out_dir);
}

} // namespace physmom
