#include <catch2/catch.hpp>

#include <cmath>

#include "cdscap/cds.hpp"
#include "oracles.hpp"

using namespace cdscap;

namespace {

struct Setup {
    DiscountCurve riskless = DiscountCurve::flat(0.0);
    DiscountCurve capital = DiscountCurve::flat(0.10);
    SwapSpec swap;
    VolSurface vols = VolSurface::flat(0.20);
    ExposureProfile profile;

    explicit Setup(double rate = 0.02, double maturity = 5.0) {
        riskless = DiscountCurve::flat(rate);
        swap.notional = 100.0;
        swap.maturity = maturity;
        swap.frequency = 4;
        swap.fixed_rate = forward_swap_rate(swap, riskless, 0.0);
        profile = ee_profile(swap, riskless, vols);
    }

    ReliefModel relief(CapitalParams params, double cds_maturity) const {
        return ReliefModel(profile, swap, params, riskless, cds_maturity);
    }
};

} // namespace

TEST_CASE("premium leg") {
    SECTION("zero spread pays nothing") {
        const auto terms = make_cds_terms(5.0, 0.6, 4);
        CHECK(premium_leg(terms, 0.0, DiscountCurve::flat(0.0), HazardCurve::flat(0.01)) == 0.0);
    }
    SECTION("riskless flat world: annual annuity of five") {
        const auto terms = make_cds_terms(5.0, 0.6, 1);
        const double a =
            premium_annuity(terms, DiscountCurve::flat(0.0), HazardCurve::flat(0.0));
        CHECK(a == Approx(5.0).epsilon(1e-13));
        CHECK(premium_leg(terms, 0.01, DiscountCurve::flat(0.0), HazardCurve::flat(0.0)) ==
              Approx(0.05).epsilon(1e-13));
    }
    SECTION("flat hazard against the closed-form per-period sums") {
        for (double r : {0.0, 0.02}) {
            const auto terms = make_cds_terms(5.0, 0.6, 4);
            const double a =
                premium_annuity(terms, DiscountCurve::flat(r), HazardCurve::flat(0.0156));
            const double oracle = oracles::flat_coupon_annuity(0.0156, r, 5.0, 4) +
                                  oracles::flat_accrual(0.0156, r, 5.0, 4);
            CHECK(a == Approx(oracle).epsilon(1e-6));
        }
    }
    SECTION("linear in the spread") {
        const auto terms = make_cds_terms(7.0, 0.55, 4);
        const auto d = DiscountCurve::flat(0.01);
        const auto h = HazardCurve::flat(0.03);
        const double one = premium_leg(terms, 0.01, d, h);
        CHECK(premium_leg(terms, 0.07, d, h) == Approx(7.0 * one).epsilon(1e-12));
    }
    SECTION("insufficient curve span is an error") {
        const auto terms = make_cds_terms(5.0, 0.6, 4);
        const DiscountCurve shortcurve({1.0, 3.0}, {0.99, 0.97}, false);
        CHECK_THROWS_AS(premium_annuity(terms, shortcurve, HazardCurve::flat(0.01)),
                        std::invalid_argument);
    }
}

TEST_CASE("protection leg") {
    SECTION("no hazard or no loss, no protection") {
        const auto terms = make_cds_terms(5.0, 0.6, 4);
        CHECK(protection_leg(terms, DiscountCurve::flat(0.0), HazardCurve::flat(0.0)) == 0.0);
        auto zero_lgd = make_cds_terms(5.0, 0.0, 4);
        CHECK(protection_leg(zero_lgd, DiscountCurve::flat(0.0), HazardCurve::flat(0.05)) == 0.0);
    }
    SECTION("flat hazard closed form at zero rates") {
        const auto terms = make_cds_terms(5.0, 0.6, 4);
        const double v = protection_leg(terms, DiscountCurve::flat(0.0), HazardCurve::flat(0.0156));
        CHECK(v == Approx(0.6 * (1.0 - std::exp(-0.078))).epsilon(1e-6));
        CHECK(v == Approx(0.0450214).margin(1e-6));
    }
    SECTION("flat hazard closed form with discounting") {
        const auto terms = make_cds_terms(5.0, 0.6, 4);
        const double v = protection_leg(terms, DiscountCurve::flat(0.02), HazardCurve::flat(0.0156));
        CHECK(v == Approx(oracles::flat_protection(0.6, 0.0156, 0.02, 5.0)).epsilon(1e-6));
    }
    SECTION("linear in LGD") {
        const auto d = DiscountCurve::flat(0.01);
        const auto h = HazardCurve::flat(0.02);
        const double a = protection_leg(make_cds_terms(5.0, 0.3, 4), d, h);
        const double b = protection_leg(make_cds_terms(5.0, 0.9, 4), d, h);
        CHECK(b == Approx(3.0 * a).epsilon(1e-12));
    }
}

TEST_CASE("relief leg with injected rate functions") {
    const auto terms = make_cds_terms(5.0, 0.6, 4);
    SECTION("zero rate, zero leg") {
        const double v = relief_leg(terms, DiscountCurve::flat(0.10), HazardCurve::flat(0.01),
                                    [](double, double) { return 0.0; });
        CHECK(v == 0.0);
    }
    SECTION("constant rate, zero capital rates, flat hazard: closed form") {
        const double rate = 0.004, lambda = 0.03;
        const double v = relief_leg(terms, DiscountCurve::flat(0.0), HazardCurve::flat(lambda),
                                    [&](double, double) { return rate; });
        CHECK(v == Approx(rate * (1.0 - std::exp(-lambda * 5.0)) / lambda).epsilon(1e-6));
    }
    SECTION("enormous hazard kills the relief annuity") {
        const double rate = 0.004, lambda = 60.0;
        const double v = relief_leg(terms, DiscountCurve::flat(0.0), HazardCurve::flat(lambda),
                                    [&](double, double) { return rate; }, 1.0 / 48.0);
        CHECK(v < rate / 50.0);
    }
}

TEST_CASE("fair spread without relief matches the flat-hazard oracle") {
    SECTION("credit triangle at zero rates") {
        const auto terms = make_cds_terms(5.0, 0.6, 4);
        const auto res =
            fair_spread(terms, DiscountCurve::flat(0.0), DiscountCurve::flat(0.10),
                        HazardCurve::flat(0.0156));
        CHECK(res.iterations == 0);
        CHECK(res.spread == Approx(0.00936).margin(5e-6)); // ~ lgd * lambda
        CHECK(res.spread ==
              Approx(oracles::flat_par_spread(0.6, 0.0156, 0.0, 5.0, 4)).epsilon(1e-6));
    }
    SECTION("two-leg oracle across hazards, maturities and rates within 0.1bp") {
        for (double r : {0.0, 0.02})
            for (double maturity : {1.0, 3.0, 5.0, 10.0})
                for (double lambda : {0.001, 0.0156, 0.05, 0.10}) {
                    const auto terms = make_cds_terms(maturity, 0.6, 4);
                    const auto res = fair_spread(terms, DiscountCurve::flat(r),
                                                 DiscountCurve::flat(0.10),
                                                 HazardCurve::flat(lambda));
                    const double oracle = oracles::flat_par_spread(0.6, lambda, r, maturity, 4);
                    CHECK(std::abs(res.spread - oracle) < 1e-5);
                }
    }
}

TEST_CASE("fair spread with capital relief") {
    const Setup s;
    CapitalParams params;
    params.regime = Regime::Cem;
    params.portfolio_context = PortfolioContext::Standalone;
    const auto terms = make_cds_terms(5.0, 0.6, 4);
    const auto hz = HazardCurve::flat(0.0156);

    SECTION("relief widens the fair spread") {
        const auto model = s.relief(params, 5.0);
        const auto with = fair_spread(terms, s.riskless, s.capital, hz, &model);
        const auto without = fair_spread(terms, s.riskless, s.capital, hz);
        CHECK(with.spread > without.spread);
    }
    SECTION("fair spread satisfies the leg identity") {
        const auto model = s.relief(params, 5.0);
        const auto res = fair_spread(terms, s.riskless, s.capital, hz, &model);
        const double annuity = premium_annuity(terms, s.riskless, hz);
        const double prot = protection_leg(terms, s.riskless, hz);
        const double relief =
            relief_leg(terms, s.capital, hz,
                       [&](double t, double m) { return s.relief(params, 5.0).rate_at(t, m).total(); });
        CHECK(res.spread * annuity == Approx(prot + relief).epsilon(1e-6));
    }
    SECTION("monotone in hazard and in the cost of capital") {
        const auto model = s.relief(params, 5.0);
        double prev = 0.0;
        for (double lambda : {0.001, 0.005, 0.0156, 0.05}) {
            const auto res =
                fair_spread(terms, s.riskless, s.capital, HazardCurve::flat(lambda), &model);
            CHECK(res.spread > prev);
            prev = res.spread;
        }
        CapitalParams expensive = params;
        expensive.cost_of_capital = 0.20;
        const auto costly = s.relief(expensive, 5.0);
        CHECK(fair_spread(terms, s.riskless, s.capital, hz, &costly).spread >
              fair_spread(terms, s.riskless, s.capital, hz, &model).spread);
    }
    SECTION("weakly increasing in the CEM add-on scale") {
        SwapSpec fx = s.swap;
        fx.treatment = AssetClass::FxGold; // higher add-on rates than rates
        const ReliefModel ir_model = s.relief(params, 5.0);
        const ReliefModel fx_model(s.profile, fx, params, s.riskless, 5.0);
        CHECK(fair_spread(terms, s.riskless, s.capital, hz, &fx_model).spread >=
              fair_spread(terms, s.riskless, s.capital, hz, &ir_model).spread - 1e-12);
    }
}

TEST_CASE("IMM fixed point") {
    const Setup s;
    CapitalParams params;
    params.regime = Regime::Imm;
    params.portfolio_context = PortfolioContext::Standalone;
    const auto terms = make_cds_terms(5.0, 0.6, 4);
    const auto hz = HazardCurve::flat(0.0156);
    const auto model = s.relief(params, 5.0);

    SECTION("two starting points land on the same spread") {
        FixedPointOptions a, b;
        a.start = 0.005;
        b.start = 0.05;
        const auto ra = fair_spread(terms, s.riskless, s.capital, hz, &model, 1.0 / 12.0, a);
        const auto rb = fair_spread(terms, s.riskless, s.capital, hz, &model, 1.0 / 12.0, b);
        CHECK(std::abs(ra.spread - rb.spread) < 1e-9);
        CHECK(ra.iterations <= 60);
        CHECK(rb.iterations <= 60);
    }
    SECTION("the map is a contraction on a grid of spread pairs") {
        const double annuity = premium_annuity(terms, s.riskless, hz);
        const double prot = protection_leg(terms, s.riskless, hz);
        const auto phi = [&](double c) {
            const double scale = model.imm_weight_scale(c, terms.lgd, hz);
            const double relief = relief_leg(terms, s.capital, hz, [&](double t, double m) {
                return model.rate_at(t, m, scale).total();
            });
            return (prot + relief) / annuity;
        };
        const double cs[] = {0.005, 0.01, 0.02, 0.05, 0.10};
        for (double c1 : cs)
            for (double c2 : cs)
                if (c1 < c2)
                    CHECK(std::abs(phi(c1) - phi(c2)) < (c2 - c1));
    }
    SECTION("fixed point of a constant map converges immediately") {
        CapitalParams off = params;
        off.relief_fraction = 0.0;
        const auto zero_model = s.relief(off, 5.0);
        const auto res = fair_spread(terms, s.riskless, s.capital, hz, &zero_model);
        CHECK(res.iterations == 1);
        CHECK(res.spread ==
              Approx(fair_spread(terms, s.riskless, s.capital, hz).spread).epsilon(1e-12));
    }
}

TEST_CASE("spread attribution") {
    const Setup s;
    const auto terms = make_cds_terms(5.0, 0.6, 4);

    SECTION("no relief model: all default, hazard inverts the par spread") {
        const double lambda = 0.02;
        const double observed = oracles::flat_par_spread(0.6, lambda, 0.02, 5.0, 4);
        const auto a = attribute_spread(observed, terms, s.riskless, s.capital);
        CHECK(a.frac_default == Approx(1.0).margin(1e-9));
        CHECK(a.frac_dcc == Approx(0.0).margin(1e-12));
        CHECK(a.implied_hazard == Approx(lambda).margin(2e-6));
    }
    SECTION("relief forced to zero behaves like no model") {
        CapitalParams off;
        off.relief_fraction = 0.0;
        const auto model = s.relief(off, 5.0);
        const auto a = attribute_spread(0.02, terms, s.riskless, s.capital, &model);
        CHECK(a.frac_default == Approx(1.0).margin(1e-9));
    }
    SECTION("with relief the fractions split and sum to one") {
        CapitalParams params;
        params.portfolio_context = PortfolioContext::Standalone;
        const auto model = s.relief(params, 5.0);
        const auto a = attribute_spread(0.02, terms, s.riskless, s.capital, &model);
        CHECK(a.frac_default + a.frac_dcc + a.frac_cvc == Approx(1.0).margin(1e-9));
        CHECK(a.frac_default > 0.0);
        CHECK(a.frac_default < 1.0);
        CHECK(a.frac_dcc > 0.0);
        CHECK(a.frac_cvc >= 0.0);
        CHECK(a.implied_hazard < 0.02 / 0.6);
    }
    SECTION("observed below the pure-relief floor is an error") {
        CapitalParams params;
        params.portfolio_context = PortfolioContext::Standalone;
        params.weight_w = 0.10;
        params.cost_of_capital = 0.50; // relief floor far above 1bp
        const auto model = s.relief(params, 5.0);
        CHECK_THROWS_AS(attribute_spread(0.0001, terms, s.riskless, s.capital, &model),
                        std::runtime_error);
    }
}

TEST_CASE("implied hazard bounds") {
    const Setup s;
    const auto terms = make_cds_terms(5.0, 0.6, 4);
    SECTION("bounds collapse without relief") {
        const auto b = implied_hazard_bounds(0.02, terms, s.riskless, s.capital);
        CHECK(b.lambda_min == Approx(b.lambda_max));
    }
    SECTION("relief shifts the lower bound down") {
        CapitalParams params;
        params.portfolio_context = PortfolioContext::Standalone;
        const auto model = s.relief(params, 5.0);
        const auto b = implied_hazard_bounds(0.02, terms, s.riskless, s.capital, &model);
        CHECK(b.lambda_min < b.lambda_max);
        // default-only reading is roughly spread / lgd
        CHECK(b.lambda_max == Approx(0.02 / 0.6).epsilon(0.05));
    }
}

TEST_CASE("cds terms validation") {
    CHECK_THROWS_AS(make_cds_terms(0.0, 0.6, 4), std::invalid_argument);
    auto t = make_cds_terms(5.0, 0.6, 4);
    t.lgd = 1.5;
    CHECK_THROWS_AS(t.validate(), std::invalid_argument);
    t.lgd = 0.6;
    t.coupon_times.back() = 4.0;
    CHECK_THROWS_AS(t.validate(), std::invalid_argument);
}
