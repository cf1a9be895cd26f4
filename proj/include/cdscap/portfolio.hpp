#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "cdscap/math.hpp"

namespace cdscap {

struct PortfolioSpec {
    int n = 1000;         // counterparties
    double sigma_d = 1.0; // Log-Normal dispersion of sizes
    double rho = 0.25;    // mutual correlation

    void validate() const {
        require(n >= 1, "PortfolioSpec: need at least one counterparty");
        require(sigma_d >= 0.0, "PortfolioSpec: negative dispersion");
    }
};

namespace detail {

inline void check_rho(std::size_t n, double rho) {
    require(rho <= 1.0, "correlation above 1");
    if (n >= 2)
        require(rho > -1.0 / static_cast<double>(n - 1),
                "correlation below -1/(n-1): correlation matrix not positive definite");
    else
        require(rho >= -1.0, "correlation below -1");
}

} // namespace detail

/// Variance of the sum of n random variables with mutual correlation rho:
/// V = rho (sum sigma)^2 + (1 - rho) sum sigma^2.
inline double correlated_variance(std::span<const double> sigmas, double rho) {
    require(!sigmas.empty(), "correlated_variance: no sizes");
    detail::check_rho(sigmas.size(), rho);
    std::vector<double> sq(sigmas.size());
    for (std::size_t i = 0; i < sigmas.size(); ++i)
        sq[i] = sigmas[i] * sigmas[i];
    const double total = pairwise_sum(sigmas);
    const double total_sq = pairwise_sum(sq);
    return rho * total * total + (1.0 - rho) * total_sq;
}

/// sqrt(V) / sum sigma: a counterparty's portfolio capital effect as a
/// fraction of its stand-alone effect.
inline double proportionality_factor(std::span<const double> sigmas, double rho) {
    const double total = pairwise_sum(sigmas);
    require(total > 0.0, "proportionality_factor: sizes sum to zero");
    return std::sqrt(correlated_variance(sigmas, rho)) / total;
}

/// V(rho) relative to its comonotone value V(rho = 1) = (sum sigma)^2.
inline double relative_variance(std::span<const double> sigmas, double rho) {
    const double total = pairwise_sum(sigmas);
    require(total > 0.0, "relative_variance: sizes sum to zero");
    return correlated_variance(sigmas, rho) / (total * total);
}

/// Counterparty sizes as midpoint quantiles of a Log-Normal distribution with
/// dispersion sigma_d and unit median scale, rescaled so the total size is
/// preserved (sum = n, average size 1) across dispersions.
inline std::vector<double> lognormal_quantile_sizes(int n, double sigma_d) {
    require(n >= 1, "lognormal_quantile_sizes: need at least one size");
    require(sigma_d >= 0.0, "lognormal_quantile_sizes: negative dispersion");
    std::vector<double> sizes(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double p = (i + 0.5) / n;
        sizes[static_cast<std::size_t>(i)] =
            std::exp(-0.5 * sigma_d * sigma_d + sigma_d * norm_ppf(p));
    }
    const double total = pairwise_sum(sizes);
    const double scale = n / total;
    for (double& s : sizes)
        s *= scale;
    return sizes;
}

inline std::vector<double> lognormal_quantile_sizes(const PortfolioSpec& spec) {
    spec.validate();
    return lognormal_quantile_sizes(spec.n, spec.sigma_d);
}

/// Correlation up to which the standardized charge stays conservative for the
/// given portfolio: the relative variance curve in rho is compared against the
/// standardized proportionality factor at the regulatory correlation 0.25,
/// and the crossing is located by bisection on [0.25, 1]. Reported as 1 when
/// the curve never reaches the standardized level (conservative everywhere).
inline double conservatism_crossover(std::span<const double> sizes) {
    require(sizes.size() >= 2, "conservatism_crossover: need at least two counterparties");
    const double target = proportionality_factor(sizes, 0.25);
    const auto g = [&](double rho) { return relative_variance(sizes, rho) - target; };
    double lo = 0.25, hi = 1.0;
    if (g(lo) >= 0.0 || g(hi) <= 0.0)
        return 1.0;
    for (int i = 0; i < 200 && hi - lo > 1e-12; ++i) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace cdscap
