#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "cdscap/math.hpp"

namespace cdscap {

/// Deterministic discount term structure. Pillars hold (time, discount factor)
/// with log-linear interpolation between them, which makes a flat
/// continuously-compounded curve exact everywhere.
///
/// Queries beyond the last pillar throw unless flat-forward extrapolation was
/// enabled at construction.
class DiscountCurve {
  public:
    DiscountCurve() : DiscountCurve({1.0}, {1.0}, true) {}

    DiscountCurve(std::vector<double> times, std::vector<double> dfs, bool extrapolate = false)
        : extrapolate_(extrapolate) {
        require(!times.empty() && times.size() == dfs.size(),
                "DiscountCurve: pillar times/factors size mismatch");
        // Implicit (0, 1) pillar; an explicit one must carry df == 1.
        if (times.front() > 1e-14) {
            times.insert(times.begin(), 0.0);
            dfs.insert(dfs.begin(), 1.0);
        }
        require(std::abs(dfs.front() - 1.0) < 1e-12 && times.front() < 1e-14,
                "DiscountCurve: discount factor at t=0 must equal 1");
        double prev_t = -1.0, prev_df = 1.0 + 1e-12;
        for (std::size_t i = 0; i < times.size(); ++i) {
            require(times[i] > prev_t, "DiscountCurve: pillar times must be strictly increasing");
            require(dfs[i] > 0.0, "DiscountCurve: discount factors must be strictly positive");
            require(dfs[i] <= prev_df + 1e-15, "DiscountCurve: discount factors must be non-increasing");
            prev_t = times[i];
            prev_df = dfs[i];
        }
        times_ = std::move(times);
        log_dfs_.resize(dfs.size());
        std::transform(dfs.begin(), dfs.end(), log_dfs_.begin(),
                       [](double d) { return std::log(d); });
    }

    /// Flat curve at a continuously-compounded rate.
    static DiscountCurve flat(double rate, double horizon = 200.0) {
        require(rate >= 0.0, "DiscountCurve::flat: negative rate");
        return DiscountCurve({0.0, horizon}, {1.0, std::exp(-rate * horizon)}, true);
    }

    double discount(double t) const {
        require(t >= 0.0, "DiscountCurve: negative time");
        if (t <= times_.front())
            return 1.0;
        if (t > times_.back()) {
            if (!extrapolate_) {
                std::ostringstream os;
                os << "DiscountCurve: time " << t << " beyond last pillar " << times_.back()
                   << " (extrapolation disabled)";
                throw std::invalid_argument(os.str());
            }
            // Flat-forward continuation of the last segment.
            const std::size_t n = times_.size();
            const double fwd = (log_dfs_[n - 1] - log_dfs_[n - 2]) / (times_[n - 1] - times_[n - 2]);
            return std::exp(log_dfs_[n - 1] + fwd * (t - times_[n - 1]));
        }
        const auto it = std::upper_bound(times_.begin(), times_.end(), t);
        const std::size_t i = static_cast<std::size_t>(it - times_.begin());
        const double w = (t - times_[i - 1]) / (times_[i] - times_[i - 1]);
        return std::exp((1.0 - w) * log_dfs_[i - 1] + w * log_dfs_[i]);
    }

    double operator()(double t) const { return discount(t); }

    double last_pillar() const { return times_.back(); }
    bool extrapolates() const { return extrapolate_; }
    std::span<const double> pillar_times() const { return times_; }

  private:
    std::vector<double> times_;
    std::vector<double> log_dfs_;
    bool extrapolate_;
};

/// Piecewise-constant hazard rate term structure. Pillar (t_i, lambda_i) means
/// lambda_i applies on [t_i, t_{i+1}); the last rate extends to infinity.
/// Survival is exp(-integral of lambda), exact per segment.
class HazardCurve {
  public:
    HazardCurve() : HazardCurve({0.0}, {0.0}) {}

    HazardCurve(std::vector<double> start_times, std::vector<double> rates) {
        require(!start_times.empty() && start_times.size() == rates.size(),
                "HazardCurve: pillar times/rates size mismatch");
        require(std::abs(start_times.front()) < 1e-14,
                "HazardCurve: first segment must start at t=0");
        double prev = -1.0;
        for (std::size_t i = 0; i < start_times.size(); ++i) {
            require(start_times[i] > prev, "HazardCurve: segment starts must be strictly increasing");
            require(rates[i] >= 0.0, "HazardCurve: hazard rates must be non-negative");
            prev = start_times[i];
        }
        times_ = std::move(start_times);
        rates_ = std::move(rates);
        cum_.resize(times_.size(), 0.0);
        for (std::size_t i = 1; i < times_.size(); ++i)
            cum_[i] = cum_[i - 1] + rates_[i - 1] * (times_[i] - times_[i - 1]);
    }

    static HazardCurve flat(double lambda) { return HazardCurve({0.0}, {lambda}); }

    /// Integrated hazard: integral of lambda over [0, t].
    double integrated_hazard(double t) const {
        require(t >= 0.0, "HazardCurve: negative time");
        const std::size_t i = segment(t);
        return cum_[i] + rates_[i] * (t - times_[i]);
    }

    /// Q(xi >= t)
    double survival(double t) const { return std::exp(-integrated_hazard(t)); }

    /// lambda(t); right-continuous at segment starts.
    double hazard(double t) const {
        require(t >= 0.0, "HazardCurve: negative time");
        return rates_[segment(t)];
    }

    /// Default time density q(t) = lambda(t) Q(xi >= t).
    double density(double t) const { return hazard(t) * survival(t); }

    std::span<const double> segment_starts() const { return times_; }

  private:
    std::size_t segment(double t) const {
        const auto it = std::upper_bound(times_.begin(), times_.end(), t);
        return static_cast<std::size_t>(it - times_.begin()) - 1;
    }

    std::vector<double> times_;
    std::vector<double> rates_;
    std::vector<double> cum_;
};

} // namespace cdscap
