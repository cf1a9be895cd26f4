#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cdscap {

inline void require(bool cond, const std::string& msg) {
    if (!cond)
        throw std::invalid_argument(msg);
}

inline constexpr double pi = 3.14159265358979323846;

inline double norm_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * pi); }

inline double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

/// Inverse standard normal CDF. Acklam's rational approximation polished with
/// one Halley step against the erfc-based CDF, accurate to full double precision.
inline double norm_ppf(double p) {
    require(p > 0.0 && p < 1.0, "norm_ppf: p must lie in (0,1)");

    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};

    constexpr double p_low = 0.02425;
    double x;
    if (p < p_low) {
        double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        double q = p - 0.5;
        double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }

    double e = norm_cdf(x) - p;
    double u = e * std::sqrt(2.0 * pi) * std::exp(0.5 * x * x);
    return x - u / (1.0 + 0.5 * x * u);
}

/// Pairwise (cascade) summation: reproducible and with O(log n) error growth.
inline double pairwise_sum(std::span<const double> xs) {
    const std::size_t n = xs.size();
    if (n == 0)
        return 0.0;
    if (n <= 8) {
        double s = 0.0;
        for (double x : xs)
            s += x;
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(xs.subspan(0, half)) + pairwise_sum(xs.subspan(half));
}

inline double pairwise_sum(const std::vector<double>& xs) {
    return pairwise_sum(std::span<const double>(xs));
}

struct RootResult {
    double x = 0.0;
    double f = 0.0;
    int iterations = 0;
};

/// Bracketing root finder: bisection to shrink the interval, then secant polish.
/// Requires f(lo) and f(hi) to straddle zero; converges on |f| <= f_tol.
template <class F>
RootResult solve_bracketed(F&& f, double lo, double hi, double f_tol, int max_iter = 200) {
    double flo = f(lo);
    double fhi = f(hi);
    RootResult res;
    if (std::abs(flo) <= f_tol) {
        res.x = lo;
        res.f = flo;
        return res;
    }
    if (std::abs(fhi) <= f_tol) {
        res.x = hi;
        res.f = fhi;
        return res;
    }
    if (flo * fhi > 0.0)
        throw std::runtime_error("solve_bracketed: root not bracketed");

    int it = 0;
    // Bisection phase: shrink the bracket far enough for the secant to be safe.
    while (it < max_iter && (hi - lo) > 1e-4 * (1.0 + std::abs(lo))) {
        double mid = 0.5 * (lo + hi);
        double fm = f(mid);
        ++it;
        if (std::abs(fm) <= f_tol) {
            res.x = mid;
            res.f = fm;
            res.iterations = it;
            return res;
        }
        if (flo * fm <= 0.0) {
            hi = mid;
            fhi = fm;
        } else {
            lo = mid;
            flo = fm;
        }
    }

    // Secant polish inside the bracket; fall back to bisection when it strays.
    double x0 = lo, f0 = flo, x1 = hi, f1 = fhi;
    while (it < max_iter) {
        double x2;
        if (f1 != f0) {
            x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
        } else {
            x2 = 0.5 * (lo + hi);
        }
        if (!(x2 > lo && x2 < hi))
            x2 = 0.5 * (lo + hi);
        double f2 = f(x2);
        ++it;
        if (std::abs(f2) <= f_tol) {
            res.x = x2;
            res.f = f2;
            res.iterations = it;
            return res;
        }
        if (flo * f2 <= 0.0) {
            hi = x2;
            fhi = f2;
        } else {
            lo = x2;
            flo = f2;
        }
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = f2;
        if (hi - lo < 1e-300)
            break;
    }
    throw std::runtime_error("solve_bracketed: no convergence after " + std::to_string(it) +
                             " iterations");
}

} // namespace cdscap
