#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "cdscap/curves.hpp"
#include "cdscap/exposure.hpp"
#include "cdscap/math.hpp"
#include "cdscap/params.hpp"

namespace cdscap {

/// Regulatory maturity discounting (1 - e^{-0.05 M}) / (0.05 M), with the
/// M -> 0 limit handled by series expansion.
inline double reg_discount(double m) {
    require(m >= 0.0, "reg_discount: negative maturity");
    const double x = 0.05 * m;
    if (x < 1e-6)
        return 1.0 - 0.5 * x + x * x / 6.0;
    return (1.0 - std::exp(-x)) / x;
}

/// One counterparty row of the standardized CVA charge. Exposures and hedge
/// notionals are expected pre-discounted with reg_discount.
struct CounterpartyLine {
    double w = 0.0;              // rating weight
    double maturity = 0.0;       // effective maturity M_i (uncapped)
    double ead_discounted = 0.0; // discounted EAD
    double hedge_notional = 0.0; // discounted single-name CDS notional B_i
    double hedge_maturity = 0.0; // maturity of the hedge
};

struct IndexHedge {
    double w = 0.0;
    double maturity = 0.0;
    double notional = 0.0; // discounted
};

/// Standardized CVA risk capital charge: capital directly, not RWA.
/// K = 2.33 sqrt(h) sqrt[ (sum_i 0.5 w_i (M_i EAD_i - M_i^h B_i)
///                          - sum_ind w_ind M_ind B_ind)^2
///                        + sum_i 0.75 w_i^2 (M_i EAD_i - M_i^h B_i)^2 ].
inline double standardized_cva_charge(std::span<const CounterpartyLine> lines,
                                      std::span<const IndexHedge> index_hedges, double h = 1.0) {
    require(h > 0.0, "standardized_cva_charge: risk horizon must be positive");
    std::vector<double> systematic, idiosyncratic;
    systematic.reserve(lines.size() + index_hedges.size());
    idiosyncratic.reserve(lines.size());
    for (const auto& l : lines) {
        const double hedged = l.maturity * l.ead_discounted - l.hedge_maturity * l.hedge_notional;
        systematic.push_back(0.5 * l.w * hedged);
        idiosyncratic.push_back(0.75 * l.w * l.w * hedged * hedged);
    }
    for (const auto& ih : index_hedges)
        systematic.push_back(-ih.w * ih.maturity * ih.notional);
    const double s = pairwise_sum(systematic);
    const double q = pairwise_sum(idiosyncratic);
    return 2.33 * std::sqrt(h) * std::sqrt(s * s + q);
}

/// Basel maturity adjustment b(PD) = (0.11852 - 0.05478 ln PD)^2.
inline double b_maturity_adjustment(double pd) {
    require(pd > 0.0 && pd <= 1.0, "b_maturity_adjustment: pd must lie in (0,1]");
    const double b = 0.11852 - 0.05478 * std::log(pd);
    return b * b;
}

enum class RFormula {
    Standard, // negative exponents, complementary weights
    AsPrinted // kept only for comparison against the published form
};

/// IRB asset correlation R(PD).
inline double asset_correlation(double pd, RFormula form = RFormula::Standard) {
    require(pd > 0.0 && pd <= 1.0, "asset_correlation: pd must lie in (0,1]");
    const double denom = 1.0 - std::exp(-50.0);
    if (form == RFormula::AsPrinted) {
        const double u = 1.0 - std::exp(50.0 * pd);
        return (0.12 * u + 0.24 * (1.0 - u)) / denom;
    }
    const double w = (1.0 - std::exp(-50.0 * pd)) / denom;
    return 0.12 * w + 0.24 * (1.0 - w);
}

/// Default capital charge K as a fraction of EAD: Vasicek 99.9% tail with the
/// Basel maturity adjustment. The caller floors PD at 3bp and caps M at five
/// years; both are asserted here again.
inline double k_dcc(double lgd, double pd, double m) {
    require(lgd >= 0.0 && lgd <= 1.0, "k_dcc: lgd outside [0,1]");
    require(pd > 0.0, "k_dcc: pd must be positive");
    require(pd >= CapitalParams::pd_floor - 1e-15, "k_dcc: pd below the 3bp floor");
    require(pd < 1.0, "k_dcc: pd must be below 1");
    require(m > 0.0, "k_dcc: maturity must be positive");
    require(m <= CapitalParams::dcc_maturity_cap + 1e-12, "k_dcc: maturity above the 5y cap");
    const double r = asset_correlation(pd);
    const double b = b_maturity_adjustment(pd);
    const double z =
        (norm_ppf(pd) + std::sqrt(r / (1.0 - r)) * norm_ppf(0.999)) / std::sqrt(1.0 - r);
    const double tail = lgd * norm_cdf(z) - pd * lgd;
    const double maturity_factor = (1.0 + (m - 2.5) * b) / (1.0 - 1.5 * b);
    return tail * maturity_factor;
}

/// RWA for the default capital charge: 12.5 x K x EAD.
inline double rwa_dcc(double k, double ead) {
    require(k >= 0.0 && ead >= 0.0, "rwa_dcc: negative input");
    return 12.5 * k * ead;
}

enum class ChargeKind {
    DirectCapital,     // the CVA charge is capital, not RWA
    RiskWeightedAssets // DCC-style: capital = min ratio x RWA
};

/// Instantaneous cost-of-capital rate H for a given charge.
inline double capital_cost_rate(double amount, const CapitalParams& params, ChargeKind kind) {
    require(amount >= 0.0, "capital_cost_rate: negative charge");
    const double capital =
        kind == ChargeKind::RiskWeightedAssets ? params.min_capital_ratio * amount : amount;
    return params.cost_of_capital * capital;
}

/// Capital relief rate split into its default-capital and CVA-capital parts,
/// per unit CDS notional per year.
struct ReliefRate {
    double dcc = 0.0;
    double cvc = 0.0;
    double total() const { return dcc + cvc; }
};

namespace detail {

struct ShiftedDiscount {
    const DiscountCurve* base;
    double t0;
    double operator()(double u) const { return base->discount(t0 + u) / base->discount(t0); }
};

} // namespace detail

/// Capital relief from holding CDS protection against one counterparty.
///
/// DCC side: substitution — CDS notional B replaces the protected part
/// min(B, EAD(t)) of the exposure with a perfectly collateralized seller, so
/// the saved capital is min_ratio x 12.5 x K_DCC x min(B, EAD(t)).
///
/// CVC side: the single-name charge is linear in B until the hedged term
/// crosses zero, so the marginal saving per unit of notional is
/// 2.33 sqrt(h) w M_h reg_discount(M_h), scaled by the portfolio context
/// factor (1 stand-alone, 1/2 in the large-portfolio limit).
/// For IMM banks the charge side is scaled by the ratio of observed-implied
/// to model-implied default probabilities (passed as w_scale): the market-
/// based charge is larger, which extends how much hedging earns relief, while
/// the marginal relief per unit of notional keeps the regulatory weight.
class ReliefModel {
  public:
    /// Takes the base expected-exposure profile; the regulatory EAD (add-ons
    /// or alpha scaling) is derived analytically so that bucket steps stay
    /// exact under quadrature.
    ReliefModel(const ExposureProfile& ee_prof, SwapSpec swap, CapitalParams params,
                const DiscountCurve& riskless, double cds_maturity, double cds_notional = 1.0)
        : profile_(&ee_prof), swap_(swap), params_(params), riskless_(&riskless),
          cds_maturity_(cds_maturity), cds_notional_(cds_notional) {
        require(cds_maturity > 0.0, "ReliefModel: CDS maturity must be positive");
        require(cds_notional > 0.0, "ReliefModel: CDS notional must be positive");
        params_.validate();
    }

    /// Node-level pieces of the relief rate: the DCC rate, the CVC rate before
    /// gating, and the charge/hedge sides of the CVC gate. Smooth parts are
    /// evaluated at t, piecewise selections (add-on bucket, gate) at sel.
    struct Parts {
        double dcc = 0.0;
        double cvc_ungated = 0.0;
        double gate_charge = 0.0; // M reg_discount(M) EAD at sel
        double gate_hedge = 0.0;  // M_h reg_discount(M_h) B at sel
    };

    Parts parts(double t, double sel) const {
        Parts out;
        if (cds_maturity_ - sel <= 1e-12 || swap_.maturity - sel <= 1e-12)
            return out;
        // The trade endpoint has no well-defined residual quantities; use the
        // in-segment limit there.
        if (swap_.maturity - t <= 1e-9 || cds_maturity_ - t <= 1e-9)
            t = sel;
        const double ead = ead_at(t, sel);
        if (ead <= 0.0)
            return out;

        // Default capital relief: substitution of the protected exposure.
        const double m_dcc = maturity_dcc(t);
        if (m_dcc > 0.0) {
            const double k = k_dcc(params_.lgd_reg, params_.floored_pd(), m_dcc);
            const double protected_frac = std::min(cds_notional_, ead) / cds_notional_;
            out.dcc = capital_cost_rate(rwa_dcc(k, protected_frac), params_,
                                        ChargeKind::RiskWeightedAssets) *
                      params_.relief_fraction;
        }

        // CVA capital relief, before the gate.
        const double hedge_mat = cds_maturity_ - t;
        const double marginal_k = 2.33 * std::sqrt(params_.risk_horizon_h) * params_.weight_w *
                                  hedge_mat * reg_discount(hedge_mat) * params_.context_factor();
        out.cvc_ungated =
            capital_cost_rate(marginal_k, params_, ChargeKind::DirectCapital) *
            params_.relief_fraction;

        const double m_cvc = maturity_cvc(sel);
        out.gate_charge = m_cvc * reg_discount(m_cvc) * ead_at(sel, sel);
        out.gate_hedge =
            (cds_maturity_ - sel) * reg_discount(cds_maturity_ - sel) * cds_notional_;
        return out;
    }

    /// Relief rate at time t per unit CDS notional. w_scale inflates the
    /// charge side of the CVC gate (the IMM observed-spread adjustment).
    ReliefRate rate(double t, double w_scale = 1.0) const { return rate_at(t, t, w_scale); }

    /// The CVC part is the averaged saving K(0) - K(B) per unit of notional:
    /// full marginal relief while the hedged term stays positive, tapering
    /// once the hedge overshoots the (scaled) charge.
    ReliefRate rate_at(double t, double sel, double w_scale = 1.0) const {
        const Parts p = parts(t, sel);
        ReliefRate out;
        out.dcc = p.dcc;
        if (p.gate_hedge > 0.0)
            out.cvc = p.cvc_ungated * std::min(1.0, p.gate_charge * w_scale / p.gate_hedge);
        return out;
    }

    /// Regulatory EAD of the netting set measured at t. CEM: expected exposure
    /// plus the bucketed add-on (bucket selected at sel). IMM: alpha times the
    /// Effective EPE of the residual exposure over the coming year.
    double ead_at(double t, double sel) const {
        if (params_.regime == Regime::Imm) {
            const double horizon = std::min(1.0, swap_.maturity - t);
            if (horizon <= 1e-9)
                return 0.0;
            const ExposureProfile res = residual_profile(*profile_, t);
            return params_.alpha * epe(res, horizon);
        }
        const double ee = profile_->ee_at(t);
        const double residual = swap_.maturity - sel;
        double add = 0.0;
        if (residual > 1e-12)
            add = cem_addon_rate(swap_.treatment, residual) * regulatory_notional(swap_, sel);
        return ee + add;
    }

    /// Effective maturity for the default charge at time t, capped at 5y.
    /// Non-IMM banks use the notional-weighted average (the residual maturity
    /// for a single trade); IMM banks use the exposure-profile formula.
    double maturity_dcc(double t) const {
        const double residual = swap_.maturity - t;
        if (residual <= 1e-12)
            return 0.0;
        if (params_.regime == Regime::Cem)
            return std::min(residual, CapitalParams::dcc_maturity_cap);
        const ExposureProfile res = residual_profile(*profile_, t);
        return effective_maturity(res, detail::ShiftedDiscount{riskless_, t},
                                  CapitalParams::dcc_maturity_cap);
    }

    /// Effective maturity for the CVA charge at time t (no cap).
    double maturity_cvc(double t) const {
        const double residual = swap_.maturity - t;
        if (residual <= 1e-12)
            return 0.0;
        if (params_.regime == Regime::Cem)
            return residual;
        const ExposureProfile res = residual_profile(*profile_, t);
        return effective_maturity(res, detail::ShiftedDiscount{riskless_, t});
    }

    /// Ratio of observed-implied to model-implied default probabilities at the
    /// effective maturity, used to scale the charge side of the CVC relief for
    /// IMM banks.
    double imm_weight_scale(double observed_spread, double lgd_cds,
                            const HazardCurve& hazard) const {
        require(observed_spread > 0.0, "imm_weight_scale: observed spread must be positive");
        require(lgd_cds > 0.0, "imm_weight_scale: lgd must be positive");
        const double m = maturity_cvc(0.0);
        const double pd_observed = 1.0 - std::exp(-(observed_spread / lgd_cds) * m);
        const double pd_model = 1.0 - hazard.survival(m);
        require(pd_model > 0.0, "imm_weight_scale: model default probability is zero");
        return pd_observed / pd_model;
    }

    const CapitalParams& params() const { return params_; }
    const ExposureProfile& profile() const { return *profile_; }
    double cds_maturity() const { return cds_maturity_; }
    double cds_notional() const { return cds_notional_; }
    const SwapSpec& swap() const { return swap_; }

  private:
    const ExposureProfile* profile_;
    SwapSpec swap_;
    CapitalParams params_;
    const DiscountCurve* riskless_;
    double cds_maturity_;
    double cds_notional_;
};

/// Capital relief from one unit of CDS notional at time t. IMM banks need the
/// observed CDS spread (and the model hazard) for the weight scaling.
inline double k_relief(double t, const ReliefModel& model,
                       std::optional<double> observed_spread = std::nullopt,
                       const HazardCurve* hazard = nullptr, double lgd_cds = 0.6) {
    double w_scale = 1.0;
    if (model.params().regime == Regime::Imm) {
        require(observed_spread.has_value(),
                "k_relief: IMM regime requires the observed CDS spread");
        require(hazard != nullptr, "k_relief: IMM regime requires the hazard curve");
        w_scale = model.imm_weight_scale(*observed_spread, lgd_cds, *hazard);
    }
    return model.rate(t, w_scale).total();
}

} // namespace cdscap
