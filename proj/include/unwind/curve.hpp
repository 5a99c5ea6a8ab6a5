#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace unwind {

/// A deterministic function of time on [0, horizon].
///
/// Either a constant, or samples on a uniform grid over [0, horizon]
/// interpolated linearly (or log-linearly, for strictly positive curves
/// whose logarithmic derivative is needed).
class Curve {
public:
    enum class Interp { linear, log_linear };

    Curve() = default;

    /* implicit */ Curve(double value) : constant_{value} {
        if (!std::isfinite(value)) {
            throw std::invalid_argument("Curve: constant value is not finite");
        }
    }

    Curve(std::vector<double> samples, double horizon, Interp interp = Interp::linear)
        : samples_{std::move(samples)}, horizon_{horizon}, interp_{interp} {
        if (samples_.size() < 2) {
            throw std::invalid_argument("Curve: gridded curve needs at least 2 samples");
        }
        if (!(horizon_ > 0.0) || !std::isfinite(horizon_)) {
            throw std::invalid_argument("Curve: horizon must be positive");
        }
        for (double v : samples_) {
            if (!std::isfinite(v)) {
                throw std::invalid_argument("Curve: sample is not finite");
            }
            if (interp_ == Interp::log_linear && !(v > 0.0)) {
                throw std::invalid_argument("Curve: log-linear curve needs positive samples");
            }
        }
    }

    /// Samples `fn` at `n_samples` equispaced points of [0, horizon].
    template <typename Fn>
    static Curve sampled(Fn&& fn, std::size_t n_samples, double horizon,
                         Interp interp = Interp::linear) {
        if (n_samples < 2) {
            throw std::invalid_argument("Curve: gridded curve needs at least 2 samples");
        }
        std::vector<double> s(n_samples);
        for (std::size_t i = 0; i < n_samples; ++i) {
            s[i] = fn(horizon * static_cast<double>(i) / static_cast<double>(n_samples - 1));
        }
        return Curve{std::move(s), horizon, interp};
    }

    bool is_constant() const { return samples_.empty(); }
    Interp interp() const { return interp_; }
    const std::vector<double>& samples() const { return samples_; }
    double horizon() const { return horizon_; }

    Curve with_interp(Interp interp) const {
        if (is_constant()) {
            return *this;
        }
        return Curve{samples_, horizon_, interp};
    }

    double operator()(double t) const {
        if (is_constant()) {
            return constant_;
        }
        const auto [i, w] = locate(t);
        const double a = samples_[i];
        const double b = samples_[i + 1];
        if (interp_ == Interp::log_linear) {
            return a * std::exp(w * std::log(b / a));
        }
        return a + w * (b - a);
    }

    /// d/dt log(curve) at t. Piecewise constant for log-linear curves; cells
    /// are half-open [t_i, t_{i+1}) except the last one.
    double log_slope(double t) const {
        if (is_constant()) {
            return 0.0;
        }
        const auto [i, w] = locate(t);
        const double h = cell_width();
        const double a = samples_[i];
        const double b = samples_[i + 1];
        if (interp_ == Interp::log_linear) {
            return std::log(b / a) / h;
        }
        // derivative of log of the linear interpolant
        const double v = a + w * (b - a);
        return (b - a) / h / v;
    }

    /// Exact integral of the interpolant over [a, b], a <= b.
    double integral(double a, double b) const {
        if (b < a) {
            return -integral(b, a);
        }
        if (is_constant()) {
            return constant_ * (b - a);
        }
        if (interp_ == Interp::log_linear) {
            // fine trapezoid on the exact interpolant; only used for theta-like curves
            const int n = 64;
            double acc = 0.0;
            const double h = (b - a) / n;
            for (int k = 0; k <= n; ++k) {
                const double wk = (k == 0 || k == n) ? 0.5 : 1.0;
                acc += wk * (*this)(a + h * k);
            }
            return acc * h;
        }
        const double h = cell_width();
        double acc = 0.0;
        double lo = a;
        while (lo < b) {
            auto i = static_cast<std::size_t>(std::floor(lo / h + 1e-12));
            i = std::min(i, samples_.size() - 2);
            const double cell_end = std::min(b, h * static_cast<double>(i + 1));
            const double hi = (cell_end > lo) ? cell_end : b;
            acc += 0.5 * ((*this)(lo) + (*this)(hi)) * (hi - lo);
            lo = hi;
        }
        return acc;
    }

    double min_value() const {
        return is_constant() ? constant_ : *std::min_element(samples_.begin(), samples_.end());
    }
    double max_value() const {
        return is_constant() ? constant_ : *std::max_element(samples_.begin(), samples_.end());
    }

    /// Knot times (empty for constants).
    std::vector<double> knots() const {
        std::vector<double> out;
        for (std::size_t i = 0; i < samples_.size(); ++i) {
            out.push_back(cell_width() * static_cast<double>(i));
        }
        return out;
    }

private:
    double cell_width() const {
        return horizon_ / static_cast<double>(samples_.size() - 1);
    }

    std::pair<std::size_t, double> locate(double t) const {
        const double h = cell_width();
        const double u = std::clamp(t, 0.0, horizon_) / h;
        auto i = static_cast<std::size_t>(std::floor(u));
        i = std::min(i, samples_.size() - 2);
        return {i, u - static_cast<double>(i)};
    }

    double constant_ = 0.0;
    std::vector<double> samples_;
    double horizon_ = 1.0;
    Interp interp_ = Interp::linear;
};

/// Uniform grid t_k = k * T / n_steps, k = 0..n_steps.
struct TimeGrid {
    double horizon = 1.0;
    std::size_t n_steps = 2000;

    TimeGrid() = default;
    TimeGrid(double T, std::size_t steps) : horizon{T}, n_steps{steps} {
        if (steps < 2) {
            throw std::invalid_argument("TimeGrid: need at least 2 steps");
        }
        if (!(T > 0.0)) {
            throw std::invalid_argument("TimeGrid: horizon must be positive");
        }
    }

    double dt() const { return horizon / static_cast<double>(n_steps); }
    double at(std::size_t k) const {
        return k == n_steps ? horizon : horizon * static_cast<double>(k) / static_cast<double>(n_steps);
    }
    std::size_t size() const { return n_steps + 1; }

    bool operator==(const TimeGrid&) const = default;
};

}  // namespace unwind
