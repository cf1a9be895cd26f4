#pragma once

#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cdscap/capital.hpp"
#include "cdscap/cds.hpp"
#include "cdscap/curves.hpp"
#include "cdscap/exposure.hpp"
#include "cdscap/math.hpp"
#include "cdscap/params.hpp"

namespace cdscap {

/// One row of the rating table: observed spread, recovery, historical PD and
/// the CVA-charge weight.
struct RatingRow {
    std::string name;
    double observed_spread = 0.0;
    double recovery = 0.4;
    double pd = 0.0024;
    double weight = 0.01;
};

/// A batch scenario: curves, the underlying swap, the CDS, capital parameters,
/// rating table and sweep grids. Rates and spreads are decimals; the config
/// reader also accepts explicit "bp" and "%" suffixes.
struct Scenario {
    DiscountCurve riskless = DiscountCurve::flat(0.01);
    std::optional<DiscountCurve> capital_curve; // default: flat at the cost of capital
    HazardCurve hazard = HazardCurve::flat(0.0156);

    SwapSpec swap;
    bool swap_atm = true; // resolve the strike at par when building

    VolSurface vols = VolSurface::flat(0.30);

    double cds_maturity = 5.0;
    int cds_frequency = 4;
    double cds_notional = 1.0;
    double recovery = 0.40;

    CapitalParams params;

    std::vector<RatingRow> ratings;

    std::vector<double> price_maturities;
    std::vector<int> portfolio_n{1000};
    std::vector<double> portfolio_sigmas{0.0, 0.5, 1.0, 1.5};
    std::vector<double> portfolio_rhos;

    double grid_step = 1.0 / 12.0;

    double lgd() const { return 1.0 - recovery; }

    DiscountCurve capital_discount() const {
        return capital_curve ? *capital_curve : DiscountCurve::flat(params.cost_of_capital);
    }

    /// The underlying swap for a given maturity, with the strike resolved at
    /// par when the scenario asks for an ATM swap.
    SwapSpec build_swap(double maturity) const {
        SwapSpec s = swap;
        s.maturity = maturity;
        if (swap_atm)
            s.fixed_rate = forward_swap_rate(s, riskless, 0.0);
        return s;
    }
};

namespace config_detail {

inline double parse_quantity(const std::string& token) {
    std::string body = token;
    double scale = 1.0;
    if (body.size() > 2 && body.substr(body.size() - 2) == "bp") {
        scale = 1e-4;
        body = body.substr(0, body.size() - 2);
    } else if (body.size() > 1 && body.back() == '%') {
        scale = 1e-2;
        body = body.substr(0, body.size() - 1);
    }
    std::size_t pos = 0;
    double value = 0.0;
    try {
        value = std::stod(body, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("config: cannot parse number '" + token + "'");
    }
    require(pos == body.size(), "config: trailing characters in number '" + token + "'");
    return value * scale;
}

inline int parse_int(const std::string& token) {
    std::size_t pos = 0;
    int value = 0;
    try {
        value = std::stoi(token, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("config: cannot parse integer '" + token + "'");
    }
    require(pos == token.size(), "config: trailing characters in integer '" + token + "'");
    return value;
}

/// "t:v" pillar pairs.
inline std::pair<double, double> parse_pillar(const std::string& token) {
    const auto colon = token.find(':');
    require(colon != std::string::npos, "config: pillar '" + token + "' must look like time:value");
    return {parse_quantity(token.substr(0, colon)), parse_quantity(token.substr(colon + 1))};
}

inline DiscountCurve parse_discount(const std::vector<std::string>& tokens) {
    require(!tokens.empty(), "config: empty curve definition");
    if (tokens[0] == "flat") {
        require(tokens.size() == 2, "config: 'flat' curve takes one rate");
        return DiscountCurve::flat(parse_quantity(tokens[1]));
    }
    require(tokens[0] == "pillars", "config: curve must be 'flat <rate>' or 'pillars t:df ...'");
    bool extrapolate = false;
    std::vector<double> times, dfs;
    for (std::size_t i = 1; i < tokens.size(); ++i) {
        if (tokens[i] == "extrapolate") {
            extrapolate = true;
            continue;
        }
        const auto [t, v] = parse_pillar(tokens[i]);
        times.push_back(t);
        dfs.push_back(v);
    }
    return DiscountCurve(std::move(times), std::move(dfs), extrapolate);
}

inline HazardCurve parse_hazard(const std::vector<std::string>& tokens) {
    require(!tokens.empty(), "config: empty hazard definition");
    if (tokens[0] == "flat") {
        require(tokens.size() == 2, "config: 'flat' hazard takes one rate");
        return HazardCurve::flat(parse_quantity(tokens[1]));
    }
    require(tokens[0] == "pillars", "config: hazard must be 'flat <rate>' or 'pillars t:rate ...'");
    std::vector<double> times, rates;
    for (std::size_t i = 1; i < tokens.size(); ++i) {
        const auto [t, v] = parse_pillar(tokens[i]);
        times.push_back(t);
        rates.push_back(v);
    }
    return HazardCurve(std::move(times), std::move(rates));
}

} // namespace config_detail

/// Parse a scenario from the structured text format: one `key value...` per
/// line, '#' comments, numbers as decimals with optional bp / % suffixes.
inline Scenario parse_scenario(std::istream& in) {
    using namespace config_detail;
    Scenario sc;
    sc.price_maturities.clear();
    sc.portfolio_rhos.clear();

    std::vector<double> vol_expiries, vol_tenors;
    std::vector<std::vector<double>> vol_rows;
    bool have_vol_surface = false;

    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line = line.substr(0, hash);
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key))
            continue;
        std::vector<std::string> tok;
        for (std::string t; ls >> t;)
            tok.push_back(t);

        const auto fail_here = [&](const std::string& msg) {
            throw std::invalid_argument("config line " + std::to_string(line_no) + ": " + msg);
        };
        const auto need = [&](std::size_t n) {
            if (tok.size() != n)
                fail_here("expected " + std::to_string(n) + " value(s) after '" + key + "'");
        };

        try {
            if (key == "riskless_curve") {
                sc.riskless = parse_discount(tok);
            } else if (key == "capital_curve") {
                if (tok.size() == 1 && tok[0] == "cost_of_capital")
                    sc.capital_curve.reset();
                else
                    sc.capital_curve = parse_discount(tok);
            } else if (key == "hazard") {
                sc.hazard = parse_hazard(tok);
            } else if (key == "swap") {
                require(tok.size() >= 2, "swap setting needs a field and a value");
                const std::string& field = tok[0];
                if (field == "notional") {
                    sc.swap.notional = parse_quantity(tok[1]);
                } else if (field == "fixed_rate") {
                    if (tok[1] == "atm") {
                        sc.swap_atm = true;
                    } else {
                        sc.swap_atm = false;
                        sc.swap.fixed_rate = parse_quantity(tok[1]);
                    }
                } else if (field == "maturity") {
                    sc.swap.maturity = parse_quantity(tok[1]);
                } else if (field == "frequency") {
                    sc.swap.frequency = parse_int(tok[1]);
                } else if (field == "direction") {
                    if (tok[1] == "payer")
                        sc.swap.side = SwapSide::PayFixed;
                    else if (tok[1] == "receiver")
                        sc.swap.side = SwapSide::ReceiveFixed;
                    else
                        fail_here("swap direction must be payer or receiver");
                } else if (field == "asset_class") {
                    static const std::map<std::string, AssetClass> classes{
                        {"interest_rate", AssetClass::InterestRate},
                        {"fx_gold", AssetClass::FxGold},
                        {"equity", AssetClass::Equity},
                        {"precious_metal", AssetClass::PreciousMetal},
                        {"other_commodity", AssetClass::OtherCommodity}};
                    const auto it = classes.find(tok[1]);
                    if (it == classes.end())
                        fail_here("unknown asset class '" + tok[1] + "'");
                    sc.swap.treatment = it->second;
                } else {
                    fail_here("unknown swap field '" + field + "'");
                }
            } else if (key == "vol") {
                require(tok.size() == 2 && tok[0] == "flat", "vol must be 'flat <vol>'"
                                                             " or use vol_expiries/vol_tenors/vol_row");
                sc.vols = VolSurface::flat(parse_quantity(tok[1]));
                have_vol_surface = false;
            } else if (key == "vol_expiries") {
                vol_expiries.clear();
                for (const auto& t : tok)
                    vol_expiries.push_back(parse_quantity(t));
                have_vol_surface = true;
            } else if (key == "vol_tenors") {
                vol_tenors.clear();
                for (const auto& t : tok)
                    vol_tenors.push_back(parse_quantity(t));
                have_vol_surface = true;
            } else if (key == "vol_row") {
                std::vector<double> row;
                for (const auto& t : tok)
                    row.push_back(parse_quantity(t));
                vol_rows.push_back(std::move(row));
                have_vol_surface = true;
            } else if (key == "cds") {
                require(tok.size() == 2, "cds setting needs a field and a value");
                const std::string& field = tok[0];
                if (field == "maturity")
                    sc.cds_maturity = parse_quantity(tok[1]);
                else if (field == "frequency")
                    sc.cds_frequency = parse_int(tok[1]);
                else if (field == "notional")
                    sc.cds_notional = parse_quantity(tok[1]);
                else if (field == "recovery")
                    sc.recovery = parse_quantity(tok[1]);
                else
                    fail_here("unknown cds field '" + field + "'");
            } else if (key == "capital") {
                require(tok.size() == 2, "capital setting needs a field and a value");
                const std::string& field = tok[0];
                if (field == "regime") {
                    if (tok[1] == "cem")
                        sc.params.regime = Regime::Cem;
                    else if (tok[1] == "imm")
                        sc.params.regime = Regime::Imm;
                    else
                        fail_here("regime must be cem or imm");
                } else if (field == "alpha") {
                    sc.params.alpha = parse_quantity(tok[1]);
                } else if (field == "cost_of_capital") {
                    sc.params.cost_of_capital = parse_quantity(tok[1]);
                } else if (field == "min_capital_ratio") {
                    sc.params.min_capital_ratio = parse_quantity(tok[1]);
                } else if (field == "pd_historical") {
                    sc.params.pd_historical = parse_quantity(tok[1]);
                } else if (field == "weight") {
                    sc.params.weight_w = parse_quantity(tok[1]);
                } else if (field == "risk_horizon") {
                    sc.params.risk_horizon_h = parse_quantity(tok[1]);
                } else if (field == "portfolio_context") {
                    if (tok[1] == "standalone")
                        sc.params.portfolio_context = PortfolioContext::Standalone;
                    else if (tok[1] == "large_portfolio")
                        sc.params.portfolio_context = PortfolioContext::LargePortfolio;
                    else
                        fail_here("portfolio_context must be standalone or large_portfolio");
                } else if (field == "portfolio_size") {
                    sc.params.portfolio_size = parse_int(tok[1]);
                } else if (field == "relief_fraction") {
                    sc.params.relief_fraction = parse_quantity(tok[1]);
                } else if (field == "alpha_override") {
                    sc.params.alpha_override = tok[1] == "true";
                } else {
                    fail_here("unknown capital field '" + field + "'");
                }
            } else if (key == "rating") {
                require(tok.size() == 5, "rating rows are: name cds recovery pd weight");
                RatingRow row;
                row.name = tok[0];
                row.observed_spread = parse_quantity(tok[1]);
                row.recovery = parse_quantity(tok[2]);
                row.pd = parse_quantity(tok[3]);
                row.weight = parse_quantity(tok[4]);
                sc.ratings.push_back(std::move(row));
            } else if (key == "price") {
                require(!tok.empty(), "price needs 'maturities ...' or 'grid start stop step'");
                if (tok[0] == "maturities") {
                    sc.price_maturities.clear();
                    for (std::size_t i = 1; i < tok.size(); ++i)
                        sc.price_maturities.push_back(parse_quantity(tok[i]));
                } else if (tok[0] == "grid") {
                    need(4);
                    const double start = parse_quantity(tok[1]), stop = parse_quantity(tok[2]),
                                 step = parse_quantity(tok[3]);
                    require(step > 0.0 && stop >= start, "bad price grid");
                    sc.price_maturities.clear();
                    for (double m = start; m <= stop + 1e-9; m += step)
                        sc.price_maturities.push_back(m);
                } else {
                    fail_here("price needs 'maturities' or 'grid'");
                }
            } else if (key == "portfolio") {
                require(tok.size() >= 2, "portfolio setting needs a field and values");
                const std::string& field = tok[0];
                if (field == "n") {
                    sc.portfolio_n.clear();
                    for (std::size_t i = 1; i < tok.size(); ++i)
                        sc.portfolio_n.push_back(parse_int(tok[i]));
                } else if (field == "sigma_d") {
                    sc.portfolio_sigmas.clear();
                    for (std::size_t i = 1; i < tok.size(); ++i)
                        sc.portfolio_sigmas.push_back(parse_quantity(tok[i]));
                } else if (field == "rho") {
                    sc.portfolio_rhos.clear();
                    for (std::size_t i = 1; i < tok.size(); ++i)
                        sc.portfolio_rhos.push_back(parse_quantity(tok[i]));
                } else {
                    fail_here("unknown portfolio field '" + field + "'");
                }
            } else if (key == "grid_step") {
                need(1);
                sc.grid_step = parse_quantity(tok[0]);
                require(sc.grid_step > 0.0, "grid_step must be positive");
            } else {
                fail_here("unknown key '" + key + "'");
            }
        } catch (const std::invalid_argument& e) {
            const std::string what = e.what();
            if (what.rfind("config line", 0) == 0)
                throw;
            throw std::invalid_argument("config line " + std::to_string(line_no) + ": " + what);
        }
    }

    if (have_vol_surface) {
        require(!vol_expiries.empty() && !vol_tenors.empty() && !vol_rows.empty(),
                "config: vol surface needs vol_expiries, vol_tenors and vol_row lines");
        sc.vols = VolSurface(vol_expiries, vol_tenors, vol_rows);
    }
    return sc;
}

inline Scenario parse_scenario_text(const std::string& text) {
    std::istringstream in(text);
    return parse_scenario(in);
}

} // namespace cdscap
