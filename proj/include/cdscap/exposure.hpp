#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "cdscap/curves.hpp"
#include "cdscap/grid.hpp"
#include "cdscap/math.hpp"
#include "cdscap/params.hpp"

namespace cdscap {

/// The five CEM add-on asset classes.
enum class AssetClass { InterestRate, FxGold, Equity, PreciousMetal, OtherCommodity };

enum class SwapSide { PayFixed, ReceiveFixed };

struct SwapSpec {
    double notional = 100.0;
    double fixed_rate = 0.02; // per year
    double maturity = 5.0;    // years
    int frequency = 4;        // payments per year
    SwapSide side = SwapSide::ReceiveFixed;
    AssetClass treatment = AssetClass::InterestRate;

    void validate() const {
        require(notional > 0.0, "SwapSpec: notional must be positive");
        require(maturity > 0.0, "SwapSpec: maturity must be positive");
        require(frequency == 1 || frequency == 2 || frequency == 4 || frequency == 12,
                "SwapSpec: frequency must be one of {1,2,4,12}");
    }
};

/// Fixed-leg payment times, generated backwards from maturity so that a stub,
/// if any, sits at the start.
inline std::vector<double> payment_times(const SwapSpec& swap) {
    swap.validate();
    std::vector<double> ts;
    const double step = 1.0 / swap.frequency;
    for (double t = swap.maturity; t > 1e-9; t -= step)
        ts.push_back(t);
    std::reverse(ts.begin(), ts.end());
    return ts;
}

/// Expected-exposure profile on a time grid, with regulatory add-ons and the
/// resulting exposure-at-default. ead == ee until ead_profile has been applied.
struct ExposureProfile {
    std::vector<double> grid;
    std::vector<double> ee;
    std::vector<double> addon;
    std::vector<double> ead;

    double ee_at(double t) const { return value_at(ee, t); }
    double addon_at(double t) const { return value_at(addon, t); }
    double ead_at(double t) const { return value_at(ead, t); }

    double maturity() const { return grid.empty() ? 0.0 : grid.back(); }

  private:
    double value_at(const std::vector<double>& ys, double t) const {
        require(!grid.empty(), "ExposureProfile: empty profile");
        require(t >= 0.0, "ExposureProfile: negative time");
        if (t >= grid.back())
            return 0.0; // exposure dies at maturity
        if (t <= grid.front())
            return ys.front();
        const auto it = std::upper_bound(grid.begin(), grid.end(), t);
        const std::size_t i = static_cast<std::size_t>(it - grid.begin());
        const double w = (t - grid[i - 1]) / (grid[i] - grid[i - 1]);
        return (1.0 - w) * ys[i - 1] + w * ys[i];
    }
};

/// Lognormal swaption volatility surface on a rectangular (expiry x tenor)
/// grid with bilinear interpolation. Queries outside the grid are an error
/// that names the missing point.
class VolSurface {
  public:
    VolSurface() : VolSurface(0.0) {}

    explicit VolSurface(double flat_vol) : flat_(true), flat_vol_(flat_vol) {
        require(flat_vol >= 0.0, "VolSurface: negative volatility");
    }

    VolSurface(std::vector<double> expiries, std::vector<double> tenors,
               std::vector<std::vector<double>> vols)
        : flat_(false), expiries_(std::move(expiries)), tenors_(std::move(tenors)),
          vols_(std::move(vols)) {
        require(expiries_.size() >= 2 && tenors_.size() >= 2,
                "VolSurface: need at least a 2x2 grid");
        require(vols_.size() == expiries_.size(), "VolSurface: row count must match expiries");
        require(std::is_sorted(expiries_.begin(), expiries_.end()),
                "VolSurface: expiries must be increasing");
        require(std::is_sorted(tenors_.begin(), tenors_.end()),
                "VolSurface: tenors must be increasing");
        for (const auto& row : vols_) {
            require(row.size() == tenors_.size(), "VolSurface: column count must match tenors");
            for (double v : row)
                require(v >= 0.0, "VolSurface: negative volatility");
        }
    }

    static VolSurface flat(double vol) { return VolSurface(vol); }

    double vol(double expiry, double tenor) const {
        if (flat_)
            return flat_vol_;
        if (expiry < expiries_.front() - 1e-9 || expiry > expiries_.back() + 1e-9 ||
            tenor < tenors_.front() - 1e-9 || tenor > tenors_.back() + 1e-9) {
            std::ostringstream os;
            os << "vol surface missing point (expiry=" << expiry << ", tenor=" << tenor << ")";
            throw std::invalid_argument(os.str());
        }
        const auto [i, wx] = locate(expiries_, expiry);
        const auto [j, wy] = locate(tenors_, tenor);
        return (1.0 - wx) * ((1.0 - wy) * vols_[i][j] + wy * vols_[i][j + 1]) +
               wx * ((1.0 - wy) * vols_[i + 1][j] + wy * vols_[i + 1][j + 1]);
    }

  private:
    static std::pair<std::size_t, double> locate(const std::vector<double>& xs, double x) {
        if (x <= xs.front())
            return {0, 0.0};
        if (x >= xs.back())
            return {xs.size() - 2, 1.0};
        const auto it = std::upper_bound(xs.begin(), xs.end(), x);
        const std::size_t i = static_cast<std::size_t>(it - xs.begin()) - 1;
        return {i, (x - xs[i]) / (xs[i + 1] - xs[i])};
    }

    bool flat_;
    double flat_vol_ = 0.0;
    std::vector<double> expiries_;
    std::vector<double> tenors_;
    std::vector<std::vector<double>> vols_;
};

/// Black formula for a swaption, quoted as annuity times the Black value.
/// The caller handles the forward-premium convention (divide by the riskless
/// discount factor to expiry). A payer swaption is a call on the swap rate.
inline double black_swaption_premium(double forward, double strike, double vol, double expiry,
                                     double annuity, SwapSide side) {
    require(vol >= 0.0, "black_swaption_premium: negative volatility");
    require(expiry >= 0.0, "black_swaption_premium: negative expiry");
    require(annuity >= 0.0, "black_swaption_premium: negative annuity");
    const double omega = side == SwapSide::PayFixed ? 1.0 : -1.0;
    const double stddev = vol * std::sqrt(expiry);
    if (stddev <= 0.0 || forward <= 0.0 || strike <= 0.0)
        return annuity * std::max(omega * (forward - strike), 0.0);
    const double d1 = (std::log(forward / strike) + 0.5 * stddev * stddev) / stddev;
    const double d2 = d1 - stddev;
    return annuity * omega * (forward * norm_cdf(omega * d1) - strike * norm_cdf(omega * d2));
}

/// Discounted fixed-leg annuity of the residual swap entered at time `start`.
inline double residual_annuity(const SwapSpec& swap, const DiscountCurve& discount, double start) {
    double acc = 0.0;
    double prev = start;
    for (double t : payment_times(swap)) {
        if (t <= start + 1e-12)
            continue;
        acc += (t - prev) * discount(t);
        prev = t;
    }
    return acc;
}

/// Forward rate of the residual swap entered at `start` (par rate seen from 0).
inline double forward_swap_rate(const SwapSpec& swap, const DiscountCurve& discount, double start) {
    const double a = residual_annuity(swap, discount, start);
    require(a > 0.0, "forward_swap_rate: no residual payments");
    return (discount(start) - discount(swap.maturity)) / a;
}

/// Grid for exposure profiles: monthly by default, with payment dates and the
/// CEM bucket-edge times (maturity - 1, maturity - 5) inserted as knots.
inline std::vector<double> exposure_grid(const SwapSpec& swap, double step = 1.0 / 12.0) {
    std::vector<double> grid = uniform_grid(0.0, swap.maturity, step);
    std::vector<double> knots = payment_times(swap);
    if (swap.maturity > 1.0)
        knots.push_back(swap.maturity - 1.0);
    if (swap.maturity > 5.0)
        knots.push_back(swap.maturity - 5.0);
    insert_knots(grid, knots);
    return grid;
}

/// Expected exposure profile of a swap via forward swaption premia: at each
/// grid time S the exposure equals the premium of the option to enter the
/// residual swap (strike = contract fixed rate), grossed up to a forward
/// premium with the inverse discount factor to S. Coupon accruals excluded.
inline ExposureProfile ee_profile(const SwapSpec& swap, const DiscountCurve& discount,
                                  const VolSurface& vols, double step = 1.0 / 12.0) {
    swap.validate();
    ExposureProfile p;
    p.grid = exposure_grid(swap, step);
    p.ee.reserve(p.grid.size());
    for (double s : p.grid) {
        double v = 0.0;
        if (s < swap.maturity - 1e-12) {
            const double a = residual_annuity(swap, discount, s);
            const double f = (discount(s) - discount(swap.maturity)) / a;
            const double sigma = s > 0.0 ? vols.vol(s, swap.maturity - s) : 0.0;
            const double premium =
                black_swaption_premium(f, swap.fixed_rate, sigma, s, a, swap.side);
            v = swap.notional * premium / discount(s);
        }
        p.ee.push_back(std::max(v, 0.0));
    }
    p.addon.assign(p.grid.size(), 0.0);
    p.ead = p.ee;
    return p;
}

/// Regulatory notional at a point in the trade's life. Interest-rate treatment
/// uses the contractual (coupon-generating) notional regardless of tenor;
/// other-commodity treatment sums the remaining flow magnitudes.
inline double regulatory_notional(const SwapSpec& swap, double at_time = 0.0) {
    swap.validate();
    require(at_time >= 0.0, "regulatory_notional: negative time");
    if (swap.treatment != AssetClass::OtherCommodity)
        return swap.notional;
    double acc = 0.0;
    double prev = 0.0;
    for (double t : payment_times(swap)) {
        if (t > at_time + 1e-12)
            acc += std::abs(swap.notional * swap.fixed_rate) * (t - prev);
        prev = t;
    }
    return acc;
}

/// CEM potential-future-exposure add-on rate by asset class and residual
/// maturity bucket. Buckets are closed on the right: 1.0 falls in the first
/// row, 5.0 in the second.
inline double cem_addon_rate(AssetClass ac, double residual_maturity) {
    require(residual_maturity >= 0.0, "cem_addon_rate: negative residual maturity");
    static constexpr double table[5][3] = {
        {0.000, 0.005, 0.015}, // InterestRate
        {0.010, 0.050, 0.075}, // FxGold
        {0.060, 0.080, 0.100}, // Equity
        {0.070, 0.070, 0.080}, // PreciousMetal
        {0.100, 0.120, 0.150}, // OtherCommodity
    };
    const int row = static_cast<int>(ac);
    const int col = residual_maturity <= 1.0 ? 0 : (residual_maturity <= 5.0 ? 1 : 2);
    return table[row][col];
}

/// Regulatory exposure-at-default profile. CEM adds the bucketed notional
/// add-on to the expected exposure; IMM scales the exposure by alpha with no
/// add-on. An alpha outside [1.2, 1.4] produces a warning via `warning`
/// unless the override flag is set.
inline ExposureProfile ead_profile(const ExposureProfile& profile, const SwapSpec& swap,
                                   const CapitalParams& params,
                                   std::string* warning = nullptr) {
    params.validate();
    ExposureProfile out = profile;
    if (params.regime == Regime::Cem) {
        for (std::size_t i = 0; i < out.grid.size(); ++i) {
            const double t = out.grid[i];
            const double residual = swap.maturity - t;
            double add = 0.0;
            if (residual > 1e-12)
                add = cem_addon_rate(swap.treatment, residual) * regulatory_notional(swap, t);
            out.addon[i] = add;
            out.ead[i] = out.ee[i] + add;
        }
    } else {
        if (auto w = alpha_range_warning(params); w && warning)
            *warning = *w;
        for (std::size_t i = 0; i < out.grid.size(); ++i) {
            out.addon[i] = 0.0;
            out.ead[i] = params.alpha * out.ee[i];
        }
    }
    return out;
}

/// Effective EE node values: running maximum of EE to date, tracked over the
/// first year of the profile.
inline std::vector<double> effective_ee(const ExposureProfile& p, double window = 1.0) {
    std::vector<double> eff(p.ee.size());
    double running = 0.0;
    for (std::size_t i = 0; i < p.ee.size(); ++i) {
        if (p.grid[i] <= window + 1e-12) {
            running = std::max(running, p.ee[i]);
            eff[i] = running;
        } else {
            eff[i] = p.ee[i];
        }
    }
    return eff;
}

namespace detail {

/// Trapezoid integral of piecewise-linear node values ys against df over
/// [t0, t1], with segments split exactly at the window bounds.
template <class DF>
double weighted_integral(std::span<const double> grid, std::span<const double> ys, DF&& df,
                         double t0, double t1) {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        double a = grid[i], b = grid[i + 1];
        if (b <= t0 + 1e-14 || a >= t1 - 1e-14)
            continue;
        double ya = ys[i], yb = ys[i + 1];
        if (a < t0) {
            const double w = (t0 - grid[i]) / (grid[i + 1] - grid[i]);
            ya = (1.0 - w) * ys[i] + w * ys[i + 1];
            a = t0;
        }
        if (b > t1) {
            const double w = (t1 - grid[i]) / (grid[i + 1] - grid[i]);
            yb = (1.0 - w) * ys[i] + w * ys[i + 1];
            b = t1;
        }
        acc += 0.5 * (ya * df(a) + yb * df(b)) * (b - a);
    }
    return acc;
}

} // namespace detail

/// Regulatory effective maturity of an exposure profile measured from its
/// start: first-year Effective EE and post-first-year EE, discounted and
/// time-weighted. Used when the profile extends beyond one year; shorter
/// profiles fall back to the profile length. Optionally capped.
template <class DF>
double effective_maturity(const ExposureProfile& p, DF&& discount,
                          std::optional<double> cap = std::nullopt) {
    require(!p.grid.empty(), "effective_maturity: empty profile");
    const double horizon = p.grid.back();
    if (horizon <= 1.0 + 1e-12)
        return cap ? std::min(horizon, *cap) : horizon;
    const std::vector<double> eff = effective_ee(p);
    const double first_year = detail::weighted_integral(p.grid, eff, discount, 0.0, 1.0);
    require(first_year > 0.0, "effective_maturity: no exposure in the first year");
    const double tail = detail::weighted_integral(p.grid, p.ee, discount, 1.0, horizon);
    const double m = (first_year + tail) / first_year;
    return cap ? std::min(m, *cap) : m;
}

/// Time-weighted average of Effective EE over [0, horizon].
inline double epe(const ExposureProfile& p, double horizon) {
    require(horizon > 0.0, "epe: horizon must be positive");
    require(!p.grid.empty() && horizon <= p.grid.back() + 1e-12,
            "epe: horizon beyond the profile grid");
    const std::vector<double> eff = effective_ee(p, horizon);
    const auto unit = [](double) { return 1.0; };
    return detail::weighted_integral(p.grid, eff, unit, 0.0, horizon) / horizon;
}

/// The part of a profile from `t` onwards, re-based so that times run from 0.
inline ExposureProfile residual_profile(const ExposureProfile& p, double t) {
    require(!p.grid.empty(), "residual_profile: empty profile");
    require(t >= 0.0, "residual_profile: negative time");
    ExposureProfile out;
    out.grid.push_back(0.0);
    out.ee.push_back(p.ee_at(t));
    out.addon.push_back(p.addon_at(t));
    out.ead.push_back(p.ead_at(t));
    for (std::size_t i = 0; i < p.grid.size(); ++i) {
        if (p.grid[i] > t + 1e-12) {
            out.grid.push_back(p.grid[i] - t);
            out.ee.push_back(p.ee[i]);
            out.addon.push_back(p.addon[i]);
            out.ead.push_back(p.ead[i]);
        }
    }
    return out;
}

} // namespace cdscap
