#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <vector>

#include "cdscap/capital.hpp"
#include "cdscap/curves.hpp"
#include "cdscap/grid.hpp"
#include "cdscap/math.hpp"

namespace cdscap {

/// CDS contract terms: protection window [start, maturity], premium dates,
/// notional and loss given default. Times are year fractions (ACT/365-fixed
/// upstream); spreads are running, no upfront.
struct CdsTerms {
    double protection_start = 0.0;
    double maturity = 5.0;
    std::vector<double> coupon_times; // strictly increasing, in (start, maturity]
    double notional = 1.0;
    double lgd = 0.6;

    void validate() const {
        require(protection_start >= 0.0 && protection_start < maturity,
                "CdsTerms: need 0 <= start < maturity");
        require(!coupon_times.empty(), "CdsTerms: no coupon dates");
        require(lgd >= 0.0 && lgd <= 1.0, "CdsTerms: lgd outside [0,1]");
        require(notional > 0.0, "CdsTerms: notional must be positive");
        double prev = protection_start;
        for (double t : coupon_times) {
            require(t > prev, "CdsTerms: coupon dates must be strictly increasing");
            prev = t;
        }
        require(std::abs(coupon_times.back() - maturity) < 1e-9,
                "CdsTerms: last coupon must fall on maturity");
    }
};

/// Standard running-coupon schedule, generated backwards from maturity.
inline CdsTerms make_cds_terms(double maturity, double lgd, int frequency = 4,
                               double protection_start = 0.0, double notional = 1.0) {
    require(frequency > 0, "make_cds_terms: frequency must be positive");
    CdsTerms t;
    t.protection_start = protection_start;
    t.maturity = maturity;
    t.notional = notional;
    t.lgd = lgd;
    const double step = 1.0 / frequency;
    for (double s = maturity; s > protection_start + 1e-9; s -= step)
        t.coupon_times.push_back(s);
    std::reverse(t.coupon_times.begin(), t.coupon_times.end());
    t.validate();
    return t;
}

namespace detail {

inline std::vector<double> leg_grid(const CdsTerms& terms, const HazardCurve& hazard, double step,
                                    std::span<const double> extra = {}) {
    std::vector<double> grid = uniform_grid(terms.protection_start, terms.maturity, step);
    insert_knots(grid, terms.coupon_times);
    insert_knots(grid, hazard.segment_starts());
    if (!extra.empty())
        insert_knots(grid, extra);
    return grid;
}

inline double previous_coupon(const CdsTerms& terms, double t) {
    double prev = terms.protection_start;
    for (double c : terms.coupon_times) {
        if (c < t)
            prev = c;
        else
            break;
    }
    return prev;
}

} // namespace detail

/// Premium leg per unit spread: the risky coupon annuity plus the
/// accrual-on-default integral.
inline double premium_annuity(const CdsTerms& terms, const DiscountCurve& discount,
                              const HazardCurve& hazard, double step = 1.0 / 12.0) {
    terms.validate();
    double coupons = 0.0;
    double prev = terms.protection_start;
    for (double c : terms.coupon_times) {
        coupons += (c - prev) * discount(c) * hazard.survival(c);
        prev = c;
    }
    const std::vector<double> grid = detail::leg_grid(terms, hazard, step);
    const double accrual = integrate(grid, [&](double t, double m) {
        return discount(t) * (t - detail::previous_coupon(terms, m)) * hazard.hazard(m) *
               hazard.survival(t);
    });
    return terms.notional * (coupons + accrual);
}

inline double premium_leg(const CdsTerms& terms, double spread, const DiscountCurve& discount,
                          const HazardCurve& hazard, double step = 1.0 / 12.0) {
    return spread * premium_annuity(terms, discount, hazard, step);
}

/// Protection leg: LGD times the discounted default density over the window.
inline double protection_leg(const CdsTerms& terms, const DiscountCurve& discount,
                             const HazardCurve& hazard, double step = 1.0 / 12.0) {
    terms.validate();
    const std::vector<double> grid = detail::leg_grid(terms, hazard, step);
    const double dflt = integrate(grid, [&](double t, double m) {
        return discount(t) * hazard.hazard(m) * hazard.survival(t);
    });
    return terms.notional * terms.lgd * dflt;
}

/// Capital relief leg for an arbitrary relief-rate function: the rate is
/// survival-weighted (relief stops at reference-entity default) and discounted
/// on the capital curve.
template <class RateFn>
double relief_leg(const CdsTerms& terms, const DiscountCurve& capital_discount,
                  const HazardCurve& hazard, RateFn&& rate, double step = 1.0 / 12.0,
                  std::span<const double> extra_knots = {}) {
    terms.validate();
    const std::vector<double> grid = detail::leg_grid(terms, hazard, step, extra_knots);
    const double value = integrate(grid, [&](double t, double m) {
        return capital_discount(t) * rate(t, m) * hazard.survival(t);
    });
    return terms.notional * value;
}

namespace detail {

/// Hazard-independent relief-rate samples on the integration grid. Segment
/// endpoints are evaluated with the segment midpoint selecting the piecewise
/// pieces (add-on bucket, gate), so bucket steps integrate exactly. The CVC
/// gate is stored unresolved: the IMM weight scale is applied at integration
/// time.
struct ReliefCache {
    std::vector<double> grid;
    std::vector<double> dcc_a, dcc_b; // per-segment endpoint rates
    std::vector<double> cvc_a, cvc_b; // before the gate
    std::vector<double> gate_charge, gate_hedge;
};

inline ReliefCache make_relief_cache(const CdsTerms& terms, const ReliefModel& model,
                                     double step) {
    ReliefCache cache;
    std::vector<double> extra = payment_times(model.swap());
    const double sw_mat = model.swap().maturity;
    if (sw_mat > 1.0)
        extra.push_back(sw_mat - 1.0);
    if (sw_mat > 5.0)
        extra.push_back(sw_mat - 5.0);
    for (double t : model.profile().grid)
        extra.push_back(t);
    cache.grid = uniform_grid(terms.protection_start, terms.maturity, step);
    insert_knots(cache.grid, terms.coupon_times);
    insert_knots(cache.grid, extra);
    const std::size_t nseg = cache.grid.size() - 1;
    cache.dcc_a.resize(nseg);
    cache.dcc_b.resize(nseg);
    cache.cvc_a.resize(nseg);
    cache.cvc_b.resize(nseg);
    cache.gate_charge.resize(nseg);
    cache.gate_hedge.resize(nseg);
    for (std::size_t i = 0; i < nseg; ++i) {
        const double a = cache.grid[i], b = cache.grid[i + 1];
        const double m = 0.5 * (a + b);
        const ReliefModel::Parts pa = model.parts(a, m);
        const ReliefModel::Parts pb = model.parts(b, m);
        cache.dcc_a[i] = pa.dcc;
        cache.dcc_b[i] = pb.dcc;
        cache.cvc_a[i] = pa.cvc_ungated;
        cache.cvc_b[i] = pb.cvc_ungated;
        cache.gate_charge[i] = pa.gate_charge;
        cache.gate_hedge[i] = pa.gate_hedge;
    }
    return cache;
}

inline ReliefRate integrate_relief(const ReliefCache& cache, const CdsTerms& terms,
                                   const DiscountCurve& capital_discount,
                                   const HazardCurve& hazard, double w_scale) {
    ReliefRate out;
    for (std::size_t i = 0; i + 1 < cache.grid.size(); ++i) {
        const double a = cache.grid[i], b = cache.grid[i + 1];
        const double wa = capital_discount(a) * hazard.survival(a);
        const double wb = capital_discount(b) * hazard.survival(b);
        const double h = 0.5 * (b - a);
        out.dcc += h * (cache.dcc_a[i] * wa + cache.dcc_b[i] * wb);
        if (cache.gate_hedge[i] > 0.0) {
            const double used = std::min(1.0, cache.gate_charge[i] * w_scale / cache.gate_hedge[i]);
            out.cvc += h * used * (cache.cvc_a[i] * wa + cache.cvc_b[i] * wb);
        }
    }
    out.dcc *= terms.notional;
    out.cvc *= terms.notional;
    return out;
}

} // namespace detail

struct FixedPointOptions {
    double damping = 0.5;
    double tolerance = 1e-10;
    int max_iterations = 100;
    std::optional<double> start;
};

struct FairSpreadResult {
    double spread = 0.0;
    int iterations = 0;
};

/// Fair spread: premium = protection + capital relief. Without a relief model
/// (or for non-IMM banks) this is a direct ratio; for IMM banks the observed
/// spread enters the relief leg, giving a damped fixed-point iteration.
inline FairSpreadResult fair_spread(const CdsTerms& terms, const DiscountCurve& riskless,
                                    const DiscountCurve& capital_discount,
                                    const HazardCurve& hazard, const ReliefModel* relief = nullptr,
                                    double step = 1.0 / 12.0, FixedPointOptions opts = {}) {
    const double annuity = premium_annuity(terms, riskless, hazard, step);
    const double protection = protection_leg(terms, riskless, hazard, step);
    FairSpreadResult res;
    if (relief == nullptr) {
        res.spread = protection / annuity;
        return res;
    }

    const detail::ReliefCache cache = detail::make_relief_cache(terms, *relief, step);
    const ReliefRate base = detail::integrate_relief(cache, terms, capital_discount, hazard, 1.0);

    if (relief->params().regime == Regime::Cem) {
        res.spread = (protection + base.dcc + base.cvc) / annuity;
        return res;
    }

    // IMM: the observed spread enters the relief leg, so the fair spread
    // appears on both sides. Damped fixed point c <- (1-theta) c + theta Phi(c),
    // with a safeguarded Aitken extrapolation every third step to collapse the
    // geometric convergence mode.
    const auto phi = [&](double c) {
        const double scale = relief->imm_weight_scale(c, terms.lgd, hazard);
        const ReliefRate r =
            detail::integrate_relief(cache, terms, capital_discount, hazard, scale);
        return (protection + r.dcc + r.cvc) / annuity;
    };
    double c = opts.start ? *opts.start : phi(protection / annuity);
    double hist[3] = {c, 0.0, 0.0};
    int nhist = 1;
    for (int k = 1; k <= opts.max_iterations; ++k) {
        const double next = (1.0 - opts.damping) * c + opts.damping * phi(c);
        if (std::abs(next - c) < opts.tolerance) {
            res.spread = next;
            res.iterations = k;
            return res;
        }
        c = next;
        hist[nhist % 3] = c;
        ++nhist;
        if (nhist % 3 == 0) {
            const double x0 = hist[0], x1 = hist[1], x2 = hist[2];
            const double denom = (x2 - x1) - (x1 - x0);
            if (std::abs(denom) > 1e-300) {
                const double accel = x2 - (x2 - x1) * (x2 - x1) / denom;
                if (accel > 0.25 * x2 && accel < 4.0 * x2)
                    c = accel;
            }
            hist[0] = c;
            nhist = 1;
        }
    }
    std::ostringstream os;
    os << "fair_spread: IMM fixed point did not converge after " << opts.max_iterations
       << " iterations; last iterates " << c << ", " << phi(c);
    throw std::runtime_error(os.str());
}

/// Decomposition of an observed spread into default, DCC-relief and
/// CVC-relief fractions, plus the flat hazard that reproduces it.
struct Attribution {
    double spread_total = 0.0;
    double frac_default = 1.0;
    double frac_dcc = 0.0;
    double frac_cvc = 0.0;
    double implied_hazard = 0.0;

    void validate() const {
        require(frac_default >= -1e-9 && frac_dcc >= -1e-9 && frac_cvc >= -1e-9,
                "Attribution: negative fraction");
        require(std::abs(frac_default + frac_dcc + frac_cvc - 1.0) < 1e-9,
                "Attribution: fractions must sum to 1");
    }
};

namespace detail {

struct AttributionWorkspace {
    const CdsTerms* terms;
    const DiscountCurve* riskless;
    const DiscountCurve* capital;
    const ReliefModel* relief;
    double step;
    double observed;
    std::optional<ReliefCache> cache;

    struct Legs {
        double annuity, protection, dcc, cvc, fair;
    };

    Legs eval(double lambda) const {
        const HazardCurve hz = HazardCurve::flat(lambda);
        Legs l{};
        l.annuity = premium_annuity(*terms, *riskless, hz, step);
        l.protection = protection_leg(*terms, *riskless, hz, step);
        l.dcc = l.cvc = 0.0;
        if (relief != nullptr) {
            double w_scale = 1.0;
            if (relief->params().regime == Regime::Imm)
                w_scale = relief->imm_weight_scale(observed, terms->lgd, hz);
            const ReliefRate r = integrate_relief(*cache, *terms, *capital, hz, w_scale);
            l.dcc = r.dcc;
            l.cvc = r.cvc;
        }
        l.fair = (l.protection + l.dcc + l.cvc) / l.annuity;
        return l;
    }
};

} // namespace detail

/// Solve for the flat hazard whose fair spread matches the observed one and
/// report the annuity-normalized share of each leg. The root is bracketed by
/// scanning hazards downward from 10 (the default-dominated branch), then
/// bisection with secant polish to 1e-12 on the spread.
inline Attribution attribute_spread(double observed, const CdsTerms& terms,
                                    const DiscountCurve& riskless,
                                    const DiscountCurve& capital_discount,
                                    const ReliefModel* relief = nullptr, double step = 1.0 / 12.0) {
    require(observed > 0.0, "attribute_spread: observed spread must be positive");
    detail::AttributionWorkspace ws{&terms, &riskless, &capital_discount,
                                    relief,  step,      observed,        std::nullopt};
    if (relief != nullptr)
        ws.cache = detail::make_relief_cache(terms, *relief, step);

    const double lo_bound = 1e-6, hi_bound = 10.0;
    const auto f = [&](double lambda) { return ws.eval(lambda).fair - observed; };

    // Walk down a log grid from the top until the sign flips.
    constexpr int scan_points = 97;
    double hi = hi_bound;
    double fhi = f(hi);
    std::optional<std::pair<double, double>> bracket;
    if (fhi >= 0.0) {
        const double ratio = std::log(hi_bound / lo_bound) / (scan_points - 1);
        for (int i = 1; i < scan_points; ++i) {
            const double lambda = hi_bound * std::exp(-ratio * i);
            const double flambda = f(lambda);
            if (flambda <= 0.0) {
                bracket = {lambda, hi};
                break;
            }
            hi = lambda;
            fhi = flambda;
        }
    }
    if (!bracket) {
        std::ostringstream os;
        os << "attribute_spread: no hazard in [1e-6, 10] reproduces the observed spread "
           << observed << " (below the pure-relief floor or above the range)";
        throw std::runtime_error(os.str());
    }

    const RootResult root = solve_bracketed(f, bracket->first, bracket->second, 1e-12);
    const auto legs = ws.eval(root.x);
    Attribution a;
    a.spread_total = observed;
    const double paid = observed * legs.annuity;
    a.frac_default = legs.protection / paid;
    a.frac_dcc = legs.dcc / paid;
    a.frac_cvc = legs.cvc / paid;
    a.implied_hazard = root.x;
    a.validate();
    return a;
}

struct HazardBounds {
    double lambda_min = 0.0; // full capital relief priced in
    double lambda_max = 0.0; // default-only reading of the spread
};

/// Bounds on the CDS-implied hazard rate: zero relief gives the upper bound,
/// full relief the lower one.
inline HazardBounds implied_hazard_bounds(double observed, const CdsTerms& terms,
                                          const DiscountCurve& riskless,
                                          const DiscountCurve& capital_discount,
                                          const ReliefModel* relief = nullptr,
                                          double step = 1.0 / 12.0) {
    HazardBounds b;
    b.lambda_max =
        attribute_spread(observed, terms, riskless, capital_discount, nullptr, step).implied_hazard;
    b.lambda_min = relief == nullptr
                       ? b.lambda_max
                       : attribute_spread(observed, terms, riskless, capital_discount, relief, step)
                             .implied_hazard;
    require(b.lambda_min <= b.lambda_max + 1e-12, "implied_hazard_bounds: inverted bounds");
    return b;
}

} // namespace cdscap
