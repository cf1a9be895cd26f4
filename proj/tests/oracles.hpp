#pragma once

// Reference implementations used only by the tests. These are deliberately
// independent of the library numerics: the normal CDF is computed by adaptive
// Simpson integration of the density and its inverse by bisection, and the
// flat-hazard CDS legs are closed-form per-period sums.

#include <cmath>
#include <stdexcept>

namespace oracles {

inline double normal_density(double t) {
    return std::exp(-0.5 * t * t) / std::sqrt(2.0 * 3.14159265358979323846);
}

inline double simpson(double a, double b, double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive_simpson(double a, double b, double fa, double fm, double fb, double whole,
                               double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = normal_density(lm), frm = normal_density(rm);
    const double left = simpson(a, m, fa, flm, fm);
    const double right = simpson(m, b, fm, frm, fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double ref_norm_cdf(double x) {
    if (x < -40.0)
        return 0.0;
    if (x > 40.0)
        return 1.0;
    const double a = 0.0, b = std::abs(x);
    if (b == 0.0)
        return 0.5;
    const double fa = normal_density(a), fb = normal_density(b),
                 fm = normal_density(0.5 * (a + b));
    const double whole = simpson(a, b, fa, fm, fb);
    const double integral = adaptive_simpson(a, b, fa, fm, fb, whole, 1e-16, 40);
    return x > 0.0 ? 0.5 + integral : 0.5 - integral;
}

inline double ref_norm_ppf(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::invalid_argument("ref_norm_ppf: p outside (0,1)");
    double lo = -12.0, hi = 12.0;
    for (int i = 0; i < 90; ++i) {
        const double mid = 0.5 * (lo + hi);
        (ref_norm_cdf(mid) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// ---- flat-hazard / flat-rate CDS closed forms -----------------------------

/// integral_0^tau u e^{-k u} du
inline double ramp_integral(double k, double tau) {
    if (std::abs(k) < 1e-14)
        return 0.5 * tau * tau;
    return (1.0 - std::exp(-k * tau) * (1.0 + k * tau)) / (k * k);
}

inline double flat_protection(double lgd, double lambda, double r, double maturity) {
    const double k = r + lambda;
    if (k <= 0.0)
        return 0.0;
    return lgd * lambda / k * (1.0 - std::exp(-k * maturity));
}

inline double flat_coupon_annuity(double lambda, double r, double maturity, int freq) {
    const double k = r + lambda;
    const double tau = 1.0 / freq;
    const int n = static_cast<int>(std::lround(maturity * freq));
    double acc = 0.0;
    for (int i = 1; i <= n; ++i)
        acc += tau * std::exp(-k * (i * tau));
    return acc;
}

inline double flat_accrual(double lambda, double r, double maturity, int freq) {
    const double k = r + lambda;
    const double tau = 1.0 / freq;
    const int n = static_cast<int>(std::lround(maturity * freq));
    double acc = 0.0;
    for (int i = 1; i <= n; ++i)
        acc += std::exp(-k * ((i - 1) * tau)) * ramp_integral(k, tau);
    return lambda * acc;
}

inline double flat_par_spread(double lgd, double lambda, double r, double maturity, int freq) {
    const double annuity =
        flat_coupon_annuity(lambda, r, maturity, freq) + flat_accrual(lambda, r, maturity, freq);
    return flat_protection(lgd, lambda, r, maturity) / annuity;
}

} // namespace oracles
