#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <string>

#include "cdscap/app.hpp"

namespace {

struct CommonOpts {
    std::string scenario_path;
    std::string out_path;
    std::string regime;
    double relief_fraction = -1.0;
    double grid_step = -1.0;
};

void add_common(CLI::App* sub, CommonOpts& opts) {
    sub->add_option("--scenario", opts.scenario_path,
                    "Scenario file (structured text); defaults to the built-in scenario");
    sub->add_option("--out", opts.out_path, "Output path (stdout when omitted)");
    sub->add_option("--regime", opts.regime, "Capital regime override")
        ->check(CLI::IsMember({"cem", "imm"}));
    sub->add_option("--relief-fraction", opts.relief_fraction,
                    "Fraction of available capital relief priced in")
        ->check(CLI::Range(0.0, 1.0));
    sub->add_option("--grid-step", opts.grid_step, "Quadrature / profile grid step in years")
        ->check(CLI::PositiveNumber);
}

cdscap::Scenario load_scenario(const CommonOpts& opts) {
    cdscap::Scenario sc;
    if (opts.scenario_path.empty()) {
        sc = cdscap::default_scenario();
    } else {
        std::ifstream in(opts.scenario_path);
        if (!in)
            throw std::runtime_error("cannot open scenario file '" + opts.scenario_path + "'");
        sc = cdscap::parse_scenario(in);
    }
    if (!opts.regime.empty())
        sc.params.regime = opts.regime == "cem" ? cdscap::Regime::Cem : cdscap::Regime::Imm;
    if (opts.relief_fraction >= 0.0)
        sc.params.relief_fraction = opts.relief_fraction;
    if (opts.grid_step > 0.0)
        sc.grid_step = opts.grid_step;
    if (const auto warning = cdscap::alpha_range_warning(sc.params))
        std::cerr << "cdscap: warning: " << *warning << '\n';
    return sc;
}

/// Collect the full output first, then write once.
void write_output(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::cout << content;
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw std::runtime_error("cannot open output file '" + path + "'");
    out << content;
    if (!out)
        throw std::runtime_error("failed writing output file '" + path + "'");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"cdscap - CDS pricing with capital relief"};
    app.require_subcommand(1);

    CommonOpts price_opts, attr_opts, prof_opts, port_opts, cal_opts;
    std::string notionals_out;
    std::string observed_str;

    CLI::App* price = app.add_subcommand(
        "price", "Fair CDS spreads (default-only, CEM, IMM) across a maturity grid");
    add_common(price, price_opts);

    CLI::App* attribute = app.add_subcommand(
        "attribute", "Decompose observed spreads per rating into default / DCC / CVC");
    add_common(attribute, attr_opts);

    CLI::App* profiles =
        app.add_subcommand("profiles", "Expected exposure and EAD profiles; notional comparison");
    add_common(profiles, prof_opts);
    profiles->add_option("--notionals-out", notionals_out,
                         "Path for the rates-vs-commodity notional grid (stdout when omitted)");

    CLI::App* portfolio = app.add_subcommand(
        "portfolio", "Proportionality-factor sweep and conservatism crossover");
    add_common(portfolio, port_opts);

    CLI::App* calibrate = app.add_subcommand(
        "calibrate", "Invert an observed spread into hazard bounds and adjusted hazard");
    add_common(calibrate, cal_opts);
    calibrate->add_option("--observed", observed_str, "Observed CDS spread (e.g. 200bp or 0.02)")
        ->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (price->parsed()) {
            const auto sc = load_scenario(price_opts);
            write_output(price_opts.out_path, cdscap::price_csv(cdscap::run_price(sc)));
        } else if (attribute->parsed()) {
            const auto sc = load_scenario(attr_opts);
            const auto rows = cdscap::run_attribute(sc);
            for (const auto& row : rows)
                if (!row.error.empty())
                    std::cerr << "cdscap: warning: rating " << row.rating.name
                              << " failed: " << row.error << '\n';
            write_output(attr_opts.out_path, cdscap::attribute_csv(rows));
        } else if (profiles->parsed()) {
            const auto sc = load_scenario(prof_opts);
            const auto out = cdscap::run_profiles(sc);
            write_output(prof_opts.out_path, cdscap::profiles_csv(out));
            write_output(notionals_out, cdscap::notionals_csv(out));
        } else if (portfolio->parsed()) {
            const auto sc = load_scenario(port_opts);
            write_output(port_opts.out_path, cdscap::portfolio_csv(cdscap::run_portfolio(sc)));
        } else if (calibrate->parsed()) {
            const auto sc = load_scenario(cal_opts);
            const double observed = cdscap::config_detail::parse_quantity(observed_str);
            write_output(cal_opts.out_path,
                         cdscap::calibrate_report(cdscap::run_calibrate(sc, observed)));
        }
    } catch (const std::exception& e) {
        std::cerr << "cdscap: error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
