#include "physmom/signals.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "physmom/errors.hpp"
#include "physmom/kernels.hpp"

namespace physmom {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

const char* to_string(MomentumKind m) {
    switch (m) {
        case MomentumKind::p1: return "p1";
        case MomentumKind::p2: return "p2";
        case MomentumKind::p3: return "p3";
    }
    return "?";
}

const char* to_string(MassKind m) {
    switch (m) {
        case MassKind::turnover_rate: return "turnover";
        case MassKind::inverse_turnover: return "inv_turnover";
        case MassKind::inverse_volatility: return "inv_vol";
    }
    return "?";
}

std::optional<MomentumKind> momentum_from_string(std::string_view s) {
    if (s == "p1") return MomentumKind::p1;
    if (s == "p2") return MomentumKind::p2;
    if (s == "p3") return MomentumKind::p3;
    return std::nullopt;
}

std::optional<MassKind> mass_from_string(std::string_view s) {
    if (s == "turnover") return MassKind::turnover_rate;
    if (s == "inv_turnover") return MassKind::inverse_turnover;
    if (s == "inv_vol") return MassKind::inverse_volatility;
    return std::nullopt;
}

bool compatible(MomentumKind momentum, MassKind mass) {
    if (momentum == MomentumKind::p3) return mass == MassKind::inverse_volatility;
    return mass == MassKind::turnover_rate || mass == MassKind::inverse_turnover;
}

double velocity(double close_start, double close_end) {
    if (!(close_start > 0.0) || !(close_end > 0.0))
        throw std::domain_error("velocity requires positive prices");
    return std::log(close_end) - std::log(close_start);
}

double turnover_rate(double volume, double shares_outstanding) {
    if (!(shares_outstanding > 0.0))
        throw std::domain_error("turnover_rate requires positive shares outstanding");
    if (volume < 0.0) throw std::domain_error("turnover_rate requires non-negative volume");
    return volume / shares_outstanding;
}

std::optional<double> inverse_turnover(double turnover) {
    if (turnover == 0.0) return std::nullopt;
    return 1.0 / turnover;
}

double rolling_volatility(std::span<const double> velocities) {
    const size_t k = velocities.size();
    if (k < 2) throw std::invalid_argument("rolling_volatility needs at least 2 observations");
    double s = 0.0;
    for (double v : velocities) s += v;
    const double mean = s / static_cast<double>(k);
    double s2 = 0.0;
    for (double v : velocities) {
        const double d = v - mean;
        s2 += d * d;
    }
    return std::sqrt(s2 / static_cast<double>(k - 1));
}

double momentum_p1(std::span<const double> masses, std::span<const double> velocities) {
    if (masses.size() != velocities.size() || masses.empty())
        throw std::invalid_argument("momentum_p1 needs equal, non-empty mass/velocity windows");
    double acc = 0.0;
    for (size_t i = 0; i < masses.size(); ++i) acc += masses[i] * velocities[i];
    return acc;
}

std::optional<double> momentum_p2(std::span<const double> masses,
                                  std::span<const double> velocities) {
    if (masses.size() != velocities.size() || masses.empty())
        throw std::invalid_argument("momentum_p2 needs equal, non-empty mass/velocity windows");
    double num = 0.0;
    for (size_t i = 0; i < masses.size(); ++i) num += masses[i] * velocities[i];
    double den = 0.0;
    for (double m : masses) den += m;
    if (den == 0.0) return std::nullopt;
    return num / den;
}

std::optional<double> momentum_p3(std::span<const double> velocities) {
    const double sd = rolling_volatility(velocities);
    if (sd == 0.0) return std::nullopt;
    double s = 0.0;
    for (double v : velocities) s += v;
    const double mean = s / static_cast<double>(velocities.size());
    return mean / sd;
}

StepSeries::StepSeries(const AssetPanel& panel, std::vector<int> grid)
    : panel_(&panel), grid_(std::move(grid)) {
    if (grid_.size() < 2) throw ConfigError("formation grid needs at least 2 dates");
    const int steps = num_steps();
    const int syms = panel.num_symbols();
    const size_t total = static_cast<size_t>(steps) * static_cast<size_t>(syms);
    velocity_.assign(total, kNaN);
    turnover_.assign(total, kNaN);
    inv_turnover_.assign(total, kNaN);
    step_ok_.assign(total, 0);
    ok_prefix_.assign(static_cast<size_t>(syms) * (static_cast<size_t>(steps) + 1), 0);

    std::vector<double> log_close(grid_.size());
    std::vector<double> vol_sum(static_cast<size_t>(steps));
    std::vector<double> shares_last(static_cast<size_t>(steps));

    for (int s = 0; s < syms; ++s) {
        auto close = panel.close(s);
        auto volume = panel.volume(s);
        auto shares = panel.shares(s);
        double* vel = velocity_.data() + static_cast<size_t>(s) * steps;
        double* to = turnover_.data() + static_cast<size_t>(s) * steps;
        double* inv = inv_turnover_.data() + static_cast<size_t>(s) * steps;
        std::uint8_t* ok = step_ok_.data() + static_cast<size_t>(s) * steps;

        for (size_t g = 0; g < grid_.size(); ++g) {
            const int t = grid_[g];
            log_close[g] = panel.valid(s, t) ? std::log(close[static_cast<size_t>(t)]) : kNaN;
        }

        for (int j = 1; j <= steps; ++j) {
            const int lo = grid_[static_cast<size_t>(j - 1)];
            const int hi = grid_[static_cast<size_t>(j)];
            if (!panel.all_valid(s, lo, hi)) continue;
            ok[j - 1] = 1;
            // volume over (lo, hi], summed in day order; shares from the last
            // day of the step
            double vsum = 0.0;
            for (int t = lo + 1; t <= hi; ++t) vsum += volume[static_cast<size_t>(t)];
            vol_sum[static_cast<size_t>(j - 1)] = vsum;
            shares_last[static_cast<size_t>(j - 1)] = shares[static_cast<size_t>(hi)];
        }

        const auto& k = kernels::active();
        k.diff(log_close.data(), log_close.size(), vel);
        k.divide(vol_sum.data(), shares_last.data(), static_cast<size_t>(steps), to);
        k.reciprocal(to, static_cast<size_t>(steps), inv);
        for (int j = 0; j < steps; ++j) {
            if (!ok[j]) {
                vel[j] = kNaN;
                to[j] = kNaN;
                inv[j] = kNaN;
            }
        }

        int* pre = ok_prefix_.data() + static_cast<size_t>(s) * (static_cast<size_t>(steps) + 1);
        for (int j = 0; j < steps; ++j) pre[j + 1] = pre[j] + (ok[j] ? 1 : 0);
    }
}

bool StepSeries::steps_ok(int sym, int first, int last) const {
    const int* pre =
        ok_prefix_.data() + static_cast<size_t>(sym) * (static_cast<size_t>(num_steps()) + 1);
    return pre[last] - pre[first - 1] == last - first + 1;
}

std::optional<SignalWindow> extract_window(const StepSeries& steps, int sym, int formation,
                                           int lookback, MassKind mass) {
    if (formation < lookback || formation >= static_cast<int>(steps.grid().size()))
        return std::nullopt;
    if (!steps.steps_ok(sym, formation - lookback + 1, formation)) return std::nullopt;
    SignalWindow w;
    w.symbol = sym;
    w.formation = formation;
    w.velocities.reserve(static_cast<size_t>(lookback));
    w.masses.reserve(static_cast<size_t>(lookback));
    auto vel = steps.velocity(sym);
    auto to = steps.turnover(sym);
    for (int j = formation - lookback + 1; j <= formation; ++j) {
        const auto sj = static_cast<size_t>(j - 1);
        w.velocities.push_back(vel[sj]);
        switch (mass) {
            case MassKind::turnover_rate: w.masses.push_back(to[sj]); break;
            case MassKind::inverse_turnover: {
                auto inv = inverse_turnover(to[sj]);
                if (!inv) return std::nullopt;
                w.masses.push_back(*inv);
                break;
            }
            case MassKind::inverse_volatility:
                w.masses.push_back(kNaN); // defined by the whole window, filled by p3
                break;
        }
    }
    return w;
}

ScoreSet compute_scores(const StepSeries& steps, MomentumKind momentum, MassKind mass,
                        int lookback) {
    if (!compatible(momentum, mass))
        throw ConfigError(std::string("mass ") + to_string(mass) + " is not valid for " +
                          to_string(momentum));
    if (lookback < 1 || (momentum == MomentumKind::p3 && lookback < 2))
        throw ConfigError("lookback too short for momentum kind");
    const int grid_size = static_cast<int>(steps.grid().size());
    if (lookback > steps.num_steps())
        throw ConfigError("lookback exceeds available history on the formation grid");

    ScoreSet out;
    out.grid_.assign(steps.grid().begin(), steps.grid().end());
    out.lookback_ = lookback;
    out.num_symbols_ = steps.num_symbols();
    const int forms = grid_size - lookback;
    const size_t total = static_cast<size_t>(forms) * static_cast<size_t>(out.num_symbols_);
    out.score_.assign(total, kNaN);
    out.eligible_.assign(total, 0);

    const auto& k = kernels::active();
    const auto uk = static_cast<size_t>(lookback);
    const auto ns = static_cast<size_t>(steps.num_steps());
    std::vector<double> tmp_a(static_cast<size_t>(forms));
    std::vector<double> tmp_b(static_cast<size_t>(forms));

    for (int s = 0; s < out.num_symbols_; ++s) {
        double* score = out.score_.data() + static_cast<size_t>(s) * forms;
        std::uint8_t* elig = out.eligible_.data() + static_cast<size_t>(s) * forms;
        const double* vel = steps.velocity(s).data();

        switch (momentum) {
            case MomentumKind::p1: {
                const double* m = mass == MassKind::turnover_rate
                                      ? steps.turnover(s).data()
                                      : steps.inverse_turnover(s).data();
                k.window_dot(m, vel, ns, uk, score);
                break;
            }
            case MomentumKind::p2: {
                const double* m = mass == MassKind::turnover_rate
                                      ? steps.turnover(s).data()
                                      : steps.inverse_turnover(s).data();
                k.window_dot(m, vel, ns, uk, tmp_a.data());
                k.window_sum(m, ns, uk, tmp_b.data());
                k.divide(tmp_a.data(), tmp_b.data(), static_cast<size_t>(forms), score);
                break;
            }
            case MomentumKind::p3: {
                k.window_mean_sstd(vel, ns, uk, tmp_a.data(), tmp_b.data());
                k.divide(tmp_a.data(), tmp_b.data(), static_cast<size_t>(forms), score);
                break;
            }
        }

        // A symbol enters the formation universe only when every step of the
        // lookback window is complete and the score came out finite (inf/NaN
        // encode the exclusion cases: zero turnover under an inverse mass,
        // zero mass sum for p2, zero deviation for p3).
        for (int f = lookback; f < grid_size; ++f) {
            const int i = f - lookback;
            elig[i] = steps.steps_ok(s, f - lookback + 1, f) && std::isfinite(score[i]) ? 1 : 0;
        }
    }
    return out;
}

} // namespace physmom
