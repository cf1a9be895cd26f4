#pragma once

#include <cmath>
#include <optional>
#include <sstream>
#include <string>

#include "cdscap/math.hpp"

namespace cdscap {

enum class Regime { Cem, Imm };

enum class PortfolioContext { Standalone, LargePortfolio };

/// Regulatory and economic parameters driving the capital calculations.
struct CapitalParams {
    Regime regime = Regime::Cem;
    double alpha = 1.3;              // IMM exposure multiplier
    double cost_of_capital = 0.10;   // per year
    double min_capital_ratio = 0.10; // capital as a fraction of RWA
    double lgd_reg = 0.60;           // regulatory loss given default
    double pd_historical = 0.0024;   // one-year PD, historical calibration
    double weight_w = 0.01;          // CVA charge counterparty weight w_i
    double risk_horizon_h = 1.0;     // years
    PortfolioContext portfolio_context = PortfolioContext::LargePortfolio;
    int portfolio_size = 0;          // >0: finite portfolio of that many names
    double relief_fraction = 1.0;    // share of available capital relief priced in
    bool alpha_override = false;     // silence the alpha range warning

    static constexpr double pd_floor = 0.0003;
    static constexpr double dcc_maturity_cap = 5.0;

    double floored_pd() const { return pd_historical < pd_floor ? pd_floor : pd_historical; }

    /// Marginal CVC effect of one name as a fraction of its stand-alone
    /// effect: 1 alone, sqrt(1/4 + 3/(4n)) among n equal names, 1/2 in the
    /// large-portfolio limit.
    double context_factor() const {
        if (portfolio_size > 0)
            return std::sqrt(0.25 + 0.75 / portfolio_size);
        return portfolio_context == PortfolioContext::LargePortfolio ? 0.5 : 1.0;
    }

    void validate() const {
        require(alpha > 0.0, "CapitalParams: alpha must be positive");
        require(cost_of_capital >= 0.0, "CapitalParams: negative cost of capital");
        require(min_capital_ratio >= 0.0, "CapitalParams: negative minimum capital ratio");
        require(lgd_reg >= 0.0 && lgd_reg <= 1.0, "CapitalParams: lgd_reg outside [0,1]");
        require(pd_historical >= 0.0 && pd_historical <= 1.0,
                "CapitalParams: pd_historical outside [0,1]");
        require(weight_w >= 0.0, "CapitalParams: negative weight");
        require(risk_horizon_h > 0.0, "CapitalParams: risk horizon must be positive");
        require(portfolio_size >= 0, "CapitalParams: negative portfolio size");
        require(relief_fraction >= 0.0 && relief_fraction <= 1.0,
                "CapitalParams: relief_fraction outside [0,1]");
    }
};

/// Alpha is expected inside [1.2, 1.4]; outside that we warn rather than fail,
/// and the override flag silences the warning.
inline std::optional<std::string> alpha_range_warning(const CapitalParams& p) {
    if (p.alpha_override || (p.alpha >= 1.2 && p.alpha <= 1.4))
        return std::nullopt;
    std::ostringstream os;
    os << "alpha " << p.alpha << " outside the usual [1.2, 1.4] range";
    return os.str();
}

inline const char* to_string(Regime r) { return r == Regime::Cem ? "cem" : "imm"; }

} // namespace cdscap
