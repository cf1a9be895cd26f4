#include <catch2/catch.hpp>

#include <cmath>
#include <vector>

#include "cdscap/math.hpp"
#include "oracles.hpp"

using namespace cdscap;

TEST_CASE("normal cdf matches the integration oracle") {
    for (double x : {-6.0, -3.0, -1.30556, -0.5, 0.0, 0.1, 0.7, 2.33, 3.0902, 5.5})
        CHECK(norm_cdf(x) == Approx(oracles::ref_norm_cdf(x)).margin(1e-14));
}

TEST_CASE("normal quantile inverts the cdf to near machine precision") {
    for (double p : {3e-4, 0.0024, 0.01, 0.02425, 0.26, 0.5, 0.75, 0.999, 0.9995}) {
        const double x = norm_ppf(p);
        CHECK(norm_cdf(x) == Approx(p).epsilon(1e-13));
        CHECK(x == Approx(oracles::ref_norm_ppf(p)).margin(2e-11));
    }
    CHECK_THROWS_AS(norm_ppf(0.0), std::invalid_argument);
    CHECK_THROWS_AS(norm_ppf(1.0), std::invalid_argument);
}

TEST_CASE("pairwise summation is exact on simple series") {
    std::vector<double> xs(1000, 0.125);
    CHECK(pairwise_sum(xs) == 125.0);
    std::vector<double> empty;
    CHECK(pairwise_sum(empty) == 0.0);
}

TEST_CASE("bracketed solver finds roots to tolerance") {
    auto f = [](double x) { return x * x - 2.0; };
    const auto root = solve_bracketed(f, 0.0, 2.0, 1e-13);
    CHECK(root.x == Approx(std::sqrt(2.0)).epsilon(1e-10));
    CHECK_THROWS_AS(solve_bracketed(f, 2.0, 3.0, 1e-13), std::runtime_error);
}
