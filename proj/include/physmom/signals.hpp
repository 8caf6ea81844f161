#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "physmom/market_data.hpp"

namespace physmom {

enum class MomentumKind { p1, p2, p3 };
enum class MassKind { turnover_rate, inverse_turnover, inverse_volatility };

const char* to_string(MomentumKind m);
const char* to_string(MassKind m);
std::optional<MomentumKind> momentum_from_string(std::string_view s);
std::optional<MassKind> mass_from_string(std::string_view s);

/// p3 pairs with inverse volatility only; p1/p2 with the turnover masses.
bool compatible(MomentumKind momentum, MassKind mass);

// ---- scalar signal ops ----------------------------------------------------
// Window arguments are in chronological order (oldest first) and reductions
// accumulate in that order; the columnar engine below reproduces these
// bit-for-bit.

/// One-step log return log(close_end) - log(close_start). Throws
/// std::domain_error unless both prices are positive.
double velocity(double close_start, double close_end);

/// volume / shares_outstanding. Throws std::domain_error if shares <= 0 or
/// volume < 0.
double turnover_rate(double volume, double shares_outstanding);

/// 1/v, or nullopt when the turnover is zero (the symbol is excluded from
/// the formation rather than given an unbounded mass).
std::optional<double> inverse_turnover(double turnover);

/// Sample standard deviation (divisor k-1) of k >= 2 velocities. Throws
/// std::invalid_argument for shorter windows.
double rolling_volatility(std::span<const double> velocities);

/// Sum of mass-weighted velocities over the window.
double momentum_p1(std::span<const double> masses, std::span<const double> velocities);

/// Mass-weighted average velocity; nullopt when the mass sum is zero.
std::optional<double> momentum_p2(std::span<const double> masses,
                                  std::span<const double> velocities);

/// Mean velocity over sample standard deviation; nullopt when the deviation
/// is zero.
std::optional<double> momentum_p3(std::span<const double> velocities);

// ---- columnar engine -------------------------------------------------------

/// Per-symbol step columns on one formation grid. Step j (j = 1..M-1, stored
/// at j-1) spans the trading days (grid[j-1], grid[j]]: velocity is
/// close-to-close between the grid endpoints, volume is summed over the
/// step's days and shares are the last observation in the step. A step is
/// only "ok" when the symbol has a bar on every day of [grid[j-1], grid[j]];
/// columns hold NaN elsewhere, so missing data can never leak into a score.
class StepSeries {
public:
    StepSeries(const AssetPanel& panel, std::vector<int> grid);

    const AssetPanel& panel() const { return *panel_; }
    std::span<const int> grid() const { return grid_; }
    int num_steps() const { return static_cast<int>(grid_.size()) - 1; }
    int num_symbols() const { return panel_->num_symbols(); }

    std::span<const double> velocity(int sym) const { return col(velocity_, sym); }
    std::span<const double> turnover(int sym) const { return col(turnover_, sym); }
    std::span<const double> inverse_turnover(int sym) const { return col(inv_turnover_, sym); }
    bool step_ok(int sym, int step) const { // step is 1-based
        return step_ok_[static_cast<size_t>(sym) * static_cast<size_t>(num_steps()) +
                        static_cast<size_t>(step - 1)] != 0;
    }
    /// Every step in [first, last] (1-based) is ok.
    bool steps_ok(int sym, int first, int last) const;

private:
    std::span<const double> col(const std::vector<double>& v, int sym) const {
        const auto ns = static_cast<size_t>(num_steps());
        return {v.data() + static_cast<size_t>(sym) * ns, ns};
    }
    const AssetPanel* panel_;
    std::vector<int> grid_;
    std::vector<double> velocity_, turnover_, inv_turnover_;
    std::vector<std::uint8_t> step_ok_;
    std::vector<int> ok_prefix_; // per symbol, length num_steps()+1
};

/// The J-step signal window ending at a formation grid position, chronological.
struct SignalWindow {
    int symbol = -1;
    int formation = -1; // grid position
    std::vector<double> velocities;
    std::vector<double> masses;
};

/// Extracts the lookback window for one symbol/formation, or nullopt when any
/// step is incomplete. For inverse-turnover masses a zero-turnover step also
/// yields nullopt (exclusion).
std::optional<SignalWindow> extract_window(const StepSeries& steps, int sym, int formation,
                                           int lookback, MassKind mass);

/// Momentum scores for every formation position f in [lookback, M-1] and every
/// symbol. `eligible` is false when the window is incomplete or the momentum /
/// mass combination signals an exclusion (zero turnover under an inverse mass,
/// zero mass sum for p2, zero deviation for p3).
class ScoreSet {
public:
    std::span<const int> grid() const { return grid_; }
    int lookback() const { return lookback_; }
    int first_formation() const { return lookback_; }
    int num_formations() const { return static_cast<int>(grid_.size()) - lookback_; }
    int num_symbols() const { return num_symbols_; }

    double score(int formation, int sym) const { return score_[flat(formation, sym)]; }
    bool eligible(int formation, int sym) const { return eligible_[flat(formation, sym)] != 0; }

private:
    friend ScoreSet compute_scores(const StepSeries&, MomentumKind, MassKind, int);
    size_t flat(int formation, int sym) const {
        return static_cast<size_t>(sym) * static_cast<size_t>(num_formations()) +
               static_cast<size_t>(formation - lookback_);
    }
    std::vector<int> grid_;
    int lookback_ = 0;
    int num_symbols_ = 0;
    std::vector<double> score_;
    std::vector<std::uint8_t> eligible_;
};

ScoreSet compute_scores(const StepSeries& steps, MomentumKind momentum, MassKind mass,
                        int lookback);

} // namespace physmom
