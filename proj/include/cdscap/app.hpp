#pragma once

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cdscap/cds.hpp"
#include "cdscap/csv.hpp"
#include "cdscap/portfolio.hpp"
#include "cdscap/scenario.hpp"

namespace cdscap {

/// Everything needed to price the CDS against one underlying swap maturity.
struct PricingContext {
    SwapSpec swap;
    ExposureProfile profile;
    CdsTerms terms;
};

inline PricingContext build_context(const Scenario& sc, double maturity) {
    PricingContext ctx;
    ctx.swap = sc.build_swap(maturity);
    ctx.profile = ee_profile(ctx.swap, sc.riskless, sc.vols, sc.grid_step);
    ctx.terms = make_cds_terms(maturity, sc.lgd(), sc.cds_frequency, 0.0, sc.cds_notional);
    return ctx;
}

// ---------------------------------------------------------------- price ----

struct PriceRow {
    double maturity = 0.0;
    double default_only = 0.0;
    double cem = 0.0;
    double imm = 0.0;
};

/// Fair spreads for the three regimes across the maturity grid.
inline std::vector<PriceRow> run_price(const Scenario& sc) {
    std::vector<double> maturities = sc.price_maturities;
    if (maturities.empty())
        for (double m = 0.5; m <= 10.0 + 1e-9; m += 0.25)
            maturities.push_back(m);

    const DiscountCurve capital = sc.capital_discount();
    std::vector<PriceRow> rows;
    rows.reserve(maturities.size());
    for (double m : maturities) {
        const PricingContext ctx = build_context(sc, m);
        PriceRow row;
        row.maturity = m;
        row.default_only =
            fair_spread(ctx.terms, sc.riskless, capital, sc.hazard, nullptr, sc.grid_step).spread;

        CapitalParams cem = sc.params;
        cem.regime = Regime::Cem;
        const ReliefModel cem_model(ctx.profile, ctx.swap, cem, sc.riskless, m, sc.cds_notional);
        row.cem =
            fair_spread(ctx.terms, sc.riskless, capital, sc.hazard, &cem_model, sc.grid_step).spread;

        CapitalParams imm = sc.params;
        imm.regime = Regime::Imm;
        const ReliefModel imm_model(ctx.profile, ctx.swap, imm, sc.riskless, m, sc.cds_notional);
        row.imm =
            fair_spread(ctx.terms, sc.riskless, capital, sc.hazard, &imm_model, sc.grid_step).spread;
        rows.push_back(row);
    }
    return rows;
}

inline std::string price_csv(const std::vector<PriceRow>& rows) {
    std::ostringstream os;
    os << "maturity,default_only_bp,cem_bp,imm_bp\n";
    for (const auto& r : rows)
        os << fmt_fixed(r.maturity, 4) << ',' << fmt_bp(r.default_only) << ',' << fmt_bp(r.cem)
           << ',' << fmt_bp(r.imm) << '\n';
    return os.str();
}

// ------------------------------------------------------------ attribute ----

struct AttributionRow {
    RatingRow rating;
    Attribution cem;
    Attribution imm;
    std::string error; // non-empty when this row failed
};

/// Spread attribution per rating row, CEM and IMM blocks.
inline std::vector<AttributionRow> run_attribute(const Scenario& sc) {
    require(!sc.ratings.empty(), "attribute: scenario has no rating table");
    const DiscountCurve capital = sc.capital_discount();
    const PricingContext base = build_context(sc, sc.cds_maturity);

    std::vector<AttributionRow> rows;
    rows.reserve(sc.ratings.size());
    for (const RatingRow& rating : sc.ratings) {
        AttributionRow out;
        out.rating = rating;
        try {
            CdsTerms terms = base.terms;
            terms.lgd = 1.0 - rating.recovery;

            CapitalParams params = sc.params;
            params.weight_w = rating.weight;
            params.pd_historical = rating.pd;
            params.lgd_reg = 1.0 - rating.recovery;

            CapitalParams cem = params;
            cem.regime = Regime::Cem;
            const ReliefModel cem_model(base.profile, base.swap, cem, sc.riskless, sc.cds_maturity,
                                        sc.cds_notional);
            out.cem = attribute_spread(rating.observed_spread, terms, sc.riskless, capital,
                                       &cem_model, sc.grid_step);

            CapitalParams imm = params;
            imm.regime = Regime::Imm;
            const ReliefModel imm_model(base.profile, base.swap, imm, sc.riskless, sc.cds_maturity,
                                        sc.cds_notional);
            out.imm = attribute_spread(rating.observed_spread, terms, sc.riskless, capital,
                                       &imm_model, sc.grid_step);
        } catch (const std::exception& e) {
            out.error = e.what();
        }
        rows.push_back(std::move(out));
    }
    return rows;
}

inline std::string attribute_csv(const std::vector<AttributionRow>& rows) {
    std::ostringstream os;
    os << "rating,cds_bp,rec_pct,pd_bp,w_pct,"
          "cem_default_pct,cem_dcc_pct,cem_cvc_pct,"
          "imm_default_pct,imm_dcc_pct,imm_cvc_pct\n";
    for (const auto& r : rows) {
        if (!r.error.empty())
            continue;
        os << r.rating.name << ',' << fmt_fixed(r.rating.observed_spread * 1e4, 1) << ','
           << fmt_pct(r.rating.recovery) << ',' << fmt_fixed(r.rating.pd * 1e4, 1) << ','
           << fmt_pct(r.rating.weight) << ',' << fmt_pct(r.cem.frac_default) << ','
           << fmt_pct(r.cem.frac_dcc) << ',' << fmt_pct(r.cem.frac_cvc) << ','
           << fmt_pct(r.imm.frac_default) << ',' << fmt_pct(r.imm.frac_dcc) << ','
           << fmt_pct(r.imm.frac_cvc) << '\n';
    }
    return os.str();
}

// ------------------------------------------------------------- profiles ----

struct ProfilesOutput {
    ExposureProfile receiver;
    ExposureProfile payer;

    struct NotionalRow {
        double rate_level;
        double maturity;
        double irs_notional;
        double oc_notional;
        double oc_to_irs_ratio;
        double irs_to_oc_ratio;
    };
    std::vector<NotionalRow> notionals;
};

/// Receiver and payer EE/EAD profiles plus the rates-vs-commodity regulatory
/// notional comparison grid.
inline ProfilesOutput run_profiles(const Scenario& sc) {
    ProfilesOutput out;
    SwapSpec receiver = sc.build_swap(sc.swap.maturity);
    receiver.side = SwapSide::ReceiveFixed;
    SwapSpec payer = receiver;
    payer.side = SwapSide::PayFixed;
    out.receiver = ead_profile(ee_profile(receiver, sc.riskless, sc.vols, sc.grid_step), receiver,
                               sc.params);
    out.payer =
        ead_profile(ee_profile(payer, sc.riskless, sc.vols, sc.grid_step), payer, sc.params);

    for (double rate : {0.01, 0.02, 0.03, 0.04}) {
        for (double m = 1.0; m <= 20.0 + 1e-9; m += 1.0) {
            SwapSpec oc;
            oc.notional = sc.swap.notional;
            oc.fixed_rate = rate;
            oc.maturity = m;
            oc.frequency = sc.swap.frequency;
            oc.treatment = AssetClass::OtherCommodity;
            ProfilesOutput::NotionalRow row{};
            row.rate_level = rate;
            row.maturity = m;
            row.irs_notional = oc.notional;
            row.oc_notional = regulatory_notional(oc, 0.0);
            row.oc_to_irs_ratio = row.oc_notional / row.irs_notional;
            row.irs_to_oc_ratio = row.irs_notional / row.oc_notional;
            out.notionals.push_back(row);
        }
    }
    return out;
}

inline std::string profiles_csv(const ProfilesOutput& out) {
    std::ostringstream os;
    os << "time,receiver_ee,receiver_addon,receiver_ead,payer_ee,payer_addon,payer_ead\n";
    for (std::size_t i = 0; i < out.receiver.grid.size(); ++i)
        os << fmt_fixed(out.receiver.grid[i], 6) << ',' << fmt_fixed(out.receiver.ee[i], 8) << ','
           << fmt_fixed(out.receiver.addon[i], 8) << ',' << fmt_fixed(out.receiver.ead[i], 8)
           << ',' << fmt_fixed(out.payer.ee[i], 8) << ',' << fmt_fixed(out.payer.addon[i], 8)
           << ',' << fmt_fixed(out.payer.ead[i], 8) << '\n';
    return os.str();
}

inline std::string notionals_csv(const ProfilesOutput& out) {
    std::ostringstream os;
    os << "rate_level,maturity,irs_notional,oc_notional,oc_to_irs_ratio,irs_to_oc_ratio\n";
    for (const auto& r : out.notionals)
        os << fmt_fixed(r.rate_level, 4) << ',' << fmt_fixed(r.maturity, 2) << ','
           << fmt_fixed(r.irs_notional, 4) << ',' << fmt_fixed(r.oc_notional, 4) << ','
           << fmt_fixed(r.oc_to_irs_ratio, 6) << ',' << fmt_fixed(r.irs_to_oc_ratio, 6) << '\n';
    return os.str();
}

// ------------------------------------------------------------ portfolio ----

struct PortfolioRow {
    int n = 0;
    double sigma_d = 0.0;
    double rho = 0.0;
    double factor = 0.0;
    double ratio_to_regulatory = 0.0;
    double crossover_rho = 0.0;
};

/// Proportionality-factor sweep over (n, sigma_D, rho) with the conservatism
/// crossover per portfolio.
inline std::vector<PortfolioRow> run_portfolio(const Scenario& sc) {
    std::vector<double> rhos = sc.portfolio_rhos;
    if (rhos.empty())
        for (int i = 0; i <= 20; ++i)
            rhos.push_back(std::min(1.0, 0.05 * i));

    std::vector<PortfolioRow> rows;
    for (int n : sc.portfolio_n) {
        for (double sigma : sc.portfolio_sigmas) {
            const std::vector<double> sizes = lognormal_quantile_sizes(n, sigma);
            const double regulatory = proportionality_factor(sizes, 0.25);
            const double crossover = n >= 2 ? conservatism_crossover(sizes) : 1.0;
            for (double rho : rhos) {
                PortfolioRow row;
                row.n = n;
                row.sigma_d = sigma;
                row.rho = rho;
                row.factor = proportionality_factor(sizes, rho);
                row.ratio_to_regulatory = row.factor / regulatory;
                row.crossover_rho = crossover;
                rows.push_back(row);
            }
        }
    }
    return rows;
}

inline std::string portfolio_csv(const std::vector<PortfolioRow>& rows) {
    std::ostringstream os;
    os << "n,sigma_d,rho,factor,ratio_to_regulatory,crossover_rho\n";
    for (const auto& r : rows)
        os << r.n << ',' << fmt_fixed(r.sigma_d, 4) << ',' << fmt_fixed(r.rho, 4) << ','
           << fmt_fixed(r.factor, 8) << ',' << fmt_fixed(r.ratio_to_regulatory, 8) << ','
           << fmt_fixed(r.crossover_rho, 6) << '\n';
    return os.str();
}

// ------------------------------------------------------------ calibrate ----

struct CalibrationReport {
    double observed = 0.0;
    double lambda_min = 0.0;      // full capital relief priced in
    double lambda_max = 0.0;      // default-only reading
    double lambda_adjusted = 0.0; // capital-adjusted hazard (= lambda_min)
    double lambda_naive = 0.0;    // default-only hazard (= lambda_max)
    double fair_check = 0.0;      // fair spread at the adjusted hazard
};

/// Invert an observed spread into hazard bounds and the capital-adjusted
/// hazard under the scenario's regime.
inline CalibrationReport run_calibrate(const Scenario& sc, double observed) {
    require(observed > 0.0, "calibrate: observed spread must be positive");
    const DiscountCurve capital = sc.capital_discount();
    const PricingContext ctx = build_context(sc, sc.cds_maturity);
    const ReliefModel model(ctx.profile, ctx.swap, sc.params, sc.riskless, sc.cds_maturity,
                            sc.cds_notional);

    CalibrationReport rep;
    rep.observed = observed;
    const HazardBounds bounds =
        implied_hazard_bounds(observed, ctx.terms, sc.riskless, capital, &model, sc.grid_step);
    rep.lambda_min = bounds.lambda_min;
    rep.lambda_max = bounds.lambda_max;
    rep.lambda_adjusted = bounds.lambda_min;
    rep.lambda_naive = bounds.lambda_max;

    const HazardCurve adjusted = HazardCurve::flat(rep.lambda_adjusted);
    FixedPointOptions opts;
    opts.start = observed;
    rep.fair_check =
        fair_spread(ctx.terms, sc.riskless, capital, adjusted, &model, sc.grid_step, opts).spread;
    return rep;
}

inline std::string calibrate_report(const CalibrationReport& rep) {
    std::ostringstream os;
    os << "observed_spread_bp " << fmt_bp(rep.observed) << '\n'
       << "lambda_naive " << fmt_fixed(rep.lambda_naive, 8) << '\n'
       << "lambda_adjusted " << fmt_fixed(rep.lambda_adjusted, 8) << '\n'
       << "lambda_min " << fmt_fixed(rep.lambda_min, 8) << '\n'
       << "lambda_max " << fmt_fixed(rep.lambda_max, 8) << '\n'
       << "fair_spread_check_bp " << fmt_bp(rep.fair_check) << '\n';
    return os.str();
}

// ------------------------------------------------------ default scenario ----

/// The scenario shipped with the tool (also available as scenarios/table2.scn):
/// a 5Y ATM EUR-style receiver IRS hedged by a 5Y CDS, with a synthetic flat
/// volatility calibrated so the 5Y CEM fair spread is 200bp at the 0.0156
/// hazard, and the five-row rating table.
inline const char* default_scenario_text();

inline Scenario default_scenario() { return parse_scenario_text(default_scenario_text()); }

inline const char* default_scenario_text() {
    return R"(# Default scenario: a 5Y ATM receiver IRS protected by a 5Y CDS, CEM bank,
# plus the five-row rating table for spread attribution.
#
# The riskless curve and the flat swaption volatility are synthetic stand-ins
# (no market data ships with the tool). Together with the swap notional per
# unit of CDS protection and the counterparty weight below they are calibrated
# so that the 5Y CEM fair CDS spread at the 0.0156 hazard equals 200bp; the
# hazard, recovery, alpha, cost of capital, minimum capital ratio and
# historical default probability are the example parameters.

riskless_curve flat 0.01
capital_curve cost_of_capital
hazard flat 0.0156

# Exposure scale: notional of swap hedged per unit of CDS notional.
swap notional 130
swap fixed_rate atm
swap maturity 5
swap frequency 4
swap direction receiver
swap asset_class interest_rate

vol flat 0.40

cds maturity 5
cds frequency 4
cds notional 1
cds recovery 0.40

capital regime cem
capital alpha 1.3
capital cost_of_capital 0.10
capital min_capital_ratio 0.10
capital pd_historical 24bp
capital weight 0.00845290
# Marginal CVC relief between the stand-alone and large-portfolio bounds:
# the counterparty is one of a three-name-equivalent CVA book.
capital portfolio_size 3
capital relief_fraction 1.0

# rating  cds      recovery  pd      weight
rating A    90bp   0.38      8bp     0.8%
rating BBB  130bp  0.38      24bp    1.0%
rating BB   290bp  0.37      90bp    2.0%
rating B    510bp  0.36      448bp   3.0%
rating CCC  1170bp 0.33      2600bp  10.0%

price grid 0.5 10 0.25

portfolio n 1000
portfolio sigma_d 0 0.5 1.0 1.5
)";
}

} // namespace cdscap
