#include <catch2/catch.hpp>

#include <cmath>
#include <vector>

#include "cdscap/portfolio.hpp"
#include "oracles.hpp"

using namespace cdscap;

TEST_CASE("correlated variance") {
    SECTION("single name") {
        const std::vector<double> one{3.0};
        CHECK(correlated_variance(one, 0.7) == Approx(9.0).epsilon(1e-15));
    }
    SECTION("perfect correlation gives the comonotone square") {
        const std::vector<double> sig(5, 2.0);
        CHECK(correlated_variance(sig, 1.0) == Approx(100.0).epsilon(1e-14));
    }
    SECTION("four names at the regulatory correlation") {
        const std::vector<double> sig(4, 1.0);
        CHECK(correlated_variance(sig, 0.25) == Approx(7.0).epsilon(1e-14));
    }
    SECTION("correlation validity follows the equicorrelation eigenvalues") {
        const std::vector<double> sig(4, 1.0);
        CHECK_THROWS_AS(correlated_variance(sig, -0.34), std::invalid_argument);
        CHECK_THROWS_AS(correlated_variance(sig, 1.1), std::invalid_argument);
        // just inside the boundary: the smallest eigenvalue is positive
        CHECK(correlated_variance(sig, -1.0 / 3.0 + 1e-6) > 0.0);
        CHECK(correlated_variance(sig, -1.0 / 3.0 + 1e-6) < 1e-4);
    }
}

TEST_CASE("proportionality factor") {
    SECTION("single name is its own stand-alone") {
        const std::vector<double> one{5.0};
        CHECK(proportionality_factor(one, 0.25) == Approx(1.0).epsilon(1e-15));
    }
    SECTION("comonotone portfolios keep the full effect") {
        const std::vector<double> sizes{1.0, 4.0, 2.5};
        CHECK(proportionality_factor(sizes, 1.0) == Approx(1.0).epsilon(1e-14));
    }
    SECTION("equal sizes at the regulatory correlation: closed form in n") {
        for (int n : {1, 2, 10, 100, 200}) {
            const std::vector<double> sizes(static_cast<std::size_t>(n), 0.37);
            const double expected = std::sqrt(0.25 + 0.75 / n);
            CHECK(proportionality_factor(sizes, 0.25) == Approx(expected).epsilon(1e-14));
        }
    }
    SECTION("monotone increasing in correlation") {
        const std::vector<double> sizes{1.0, 2.0, 3.0, 4.0};
        double prev = 0.0;
        for (double rho : {0.0, 0.1, 0.25, 0.5, 0.75, 1.0}) {
            const double f = proportionality_factor(sizes, rho);
            CHECK(f > prev);
            prev = f;
        }
    }
    SECTION("n = 1000 at the regulatory value sits just above one half") {
        const std::vector<double> sizes(1000, 1.0);
        CHECK(proportionality_factor(sizes, 0.25) == Approx(0.5007495).epsilon(1e-6));
    }
}

TEST_CASE("lognormal quantile sizes") {
    SECTION("degenerate dispersion gives equal sizes") {
        const auto sizes = lognormal_quantile_sizes(10, 0.0);
        for (double s : sizes)
            CHECK(s == Approx(1.0).epsilon(1e-14));
    }
    SECTION("single counterparty carries the preserved total") {
        const auto sizes = lognormal_quantile_sizes(1, 1.5);
        REQUIRE(sizes.size() == 1);
        CHECK(sizes[0] == Approx(1.0).epsilon(1e-14));
    }
    SECTION("long-tailed sizes preserve the total and match the analytic CDF") {
        const int n = 1000;
        const double sigma = 1.5;
        const auto sizes = lognormal_quantile_sizes(n, sigma);
        CHECK(pairwise_sum(sizes) == Approx(static_cast<double>(n)).epsilon(1e-9));

        // Kolmogorov distance between the empirical CDF of the sizes and the
        // analytic Log-Normal CDF (of the unscaled distribution).
        double ks = 0.0;
        for (int i = 0; i < n; ++i) {
            const double x = sizes[static_cast<std::size_t>(i)];
            const double analytic =
                oracles::ref_norm_cdf((std::log(x) + 0.5 * sigma * sigma) / sigma);
            const double lo = static_cast<double>(i) / n, hi = (i + 1.0) / n;
            ks = std::max(ks, std::max(std::abs(analytic - lo), std::abs(analytic - hi)));
        }
        CHECK(ks < 0.05);
        // and the tail really is long
        CHECK(sizes.back() / sizes.front() > 1e4);
    }
}

TEST_CASE("conservatism crossover") {
    SECTION("two names: closed form from the exact two-name variance") {
        const std::vector<double> sizes{1.0, 2.0};
        const double total = 3.0, sum_sq = 5.0;
        const double s = sum_sq / (total * total);
        const double target = std::sqrt(0.25 + 0.75 * s);
        const double expected = (target - s) / (1.0 - s);
        CHECK(conservatism_crossover(sizes) == Approx(expected).margin(1e-9));
    }
    SECTION("dispersed thousand-name portfolio crosses near one half") {
        const auto sizes = lognormal_quantile_sizes(1000, 1.0);
        const double rho_star = conservatism_crossover(sizes);
        CHECK(rho_star > 0.40);
        CHECK(rho_star < 0.60);

        // internal consistency with the closed form
        std::vector<double> sq(sizes.size());
        for (std::size_t i = 0; i < sizes.size(); ++i)
            sq[i] = sizes[i] * sizes[i];
        const double s = pairwise_sum(sq) / (pairwise_sum(sizes) * pairwise_sum(sizes));
        const double expected = (std::sqrt(0.25 + 0.75 * s) - s) / (1.0 - s);
        CHECK(rho_star == Approx(expected).margin(1e-9));
    }
    SECTION("needs at least two names") {
        const std::vector<double> one{1.0};
        CHECK_THROWS_AS(conservatism_crossover(one), std::invalid_argument);
    }
}

TEST_CASE("factor convergence to one half across dispersions") {
    for (double sigma : {0.0, 0.5, 1.0, 1.5}) {
        const auto sizes = lognormal_quantile_sizes(1000, sigma);
        const double f = proportionality_factor(sizes, 0.25);
        CHECK(std::abs(f - 0.5) < 0.01);
    }
}

TEST_CASE("relative variance in rho") {
    const std::vector<double> sizes(8, 1.0);
    CHECK(relative_variance(sizes, 1.0) == Approx(1.0).epsilon(1e-14));
    CHECK(relative_variance(sizes, 0.25) == Approx(0.25 + 0.75 / 8.0).epsilon(1e-14));
    CHECK(relative_variance(sizes, 0.0) == Approx(1.0 / 8.0).epsilon(1e-14));
}
