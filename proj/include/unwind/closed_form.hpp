#pragma once

#include "unwind/curve.hpp"
#include "unwind/io.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace unwind {

/// Feedback coefficients for constant beta, lambda, epsilon, evaluated in
/// closed form.
struct ClosedFormCoefficients {
    double beta = 0.0;
    double lambda = 0.0;
    double epsilon = 0.0;
    double eps_tilde = 0.0;  ///< epsilon beta / (2 lambda)
    double kappa = 0.0;      ///< beta sqrt(1 + 1/eps_tilde)

    TimeGrid grid;
    std::vector<double> f, g, h;
    std::vector<double> f_tilde, g_tilde;
    /// d_t scaled by exp(-kappa (T - t)); the unscaled value overflows for
    /// large kappa (T - t).
    std::vector<double> d_scaled;
};

struct ClosedFormPoint {
    double f = 0.0;
    double g = 0.0;
    double h = 0.0;
    double f_tilde = 0.0;
    double g_tilde = 0.0;
    double d_scaled = 0.0;
};

namespace detail {

inline void check_liquidity(double beta, double lambda, double epsilon) {
    if (!(beta > 0.0) || !(lambda > 0.0) || !(epsilon > 0.0) || !std::isfinite(beta) ||
        !std::isfinite(lambda) || !std::isfinite(epsilon)) {
        throw std::invalid_argument("closed form: beta, lambda and epsilon must be positive");
    }
}

inline ClosedFormPoint closed_form_point(double beta, double lambda, double epsilon,
                                         double theta_integral, double tau) {
    const double et = epsilon * beta / (2.0 * lambda);
    const double kappa = beta * std::sqrt(1.0 + 1.0 / et);
    const double em = std::exp(-kappa * tau);  // e^{-kappa tau}, never overflows
    const double em2 = em * em;

    ClosedFormPoint p;
    p.f_tilde = -(1.0 / beta - 1.0 / (kappa + beta)) * em - (1.0 / beta + 1.0 / (kappa - beta));
    p.g_tilde = p.f_tilde / lambda - (1.0 + em) * tau / lambda +
                2.0 / (lambda * kappa) * (1.0 - em);

    // d_t e^{-kappa tau}
    const double km = 1.0 / (kappa - beta);
    const double kp = 1.0 / (kappa + beta);
    const double bk = 1.0 / (beta * kappa);
    p.d_scaled = (km * (km + 1.0 / beta - 1.0 / kappa) + bk) +
                 em2 * (kp * (-kp + 1.0 / beta + 1.0 / kappa) + bk) + tau * km +
                 tau * em2 * kp + 4.0 * et * bk * em;

    // (e^{kappa tau} - 1) / d_t = (1 - e^{-kappa tau}) / (d_t e^{-kappa tau})
    const double ratio = (1.0 - em) / p.d_scaled;
    p.f = p.f_tilde * ratio;
    p.g = p.g_tilde * ratio;
    p.h = p.f * (1.0 - std::exp(-theta_integral));
    return p;
}

}  // namespace detail

/// f, g, h at time t for constant liquidity; theta may vary in time.
inline ClosedFormPoint coefficients_at(double beta, double lambda, double epsilon,
                                       const Curve& theta, double t, double T = 1.0) {
    detail::check_liquidity(beta, lambda, epsilon);
    if (!(t >= 0.0 && t <= T)) {
        throw std::domain_error("coefficients_at: t outside [0, T]");
    }
    return detail::closed_form_point(beta, lambda, epsilon, theta.integral(t, T), T - t);
}

/// Closed-form coefficients on a uniform grid.
inline ClosedFormCoefficients closed_form(double beta, double lambda, double epsilon,
                                          const Curve& theta, const TimeGrid& grid) {
    detail::check_liquidity(beta, lambda, epsilon);
    ClosedFormCoefficients out;
    out.beta = beta;
    out.lambda = lambda;
    out.epsilon = epsilon;
    out.eps_tilde = epsilon * beta / (2.0 * lambda);
    out.kappa = beta * std::sqrt(1.0 + 1.0 / out.eps_tilde);
    out.grid = grid;
    const double T = grid.horizon;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double t = grid.at(k);
        const auto p = detail::closed_form_point(beta, lambda, epsilon, theta.integral(t, T), T - t);
        out.f.push_back(p.f);
        out.g.push_back(p.g);
        out.h.push_back(p.h);
        out.f_tilde.push_back(p.f_tilde);
        out.g_tilde.push_back(p.g_tilde);
        out.d_scaled.push_back(p.d_scaled);
    }
    return out;
}

/// Supremum over the grid of |a - b| / max(|a|, |b|, floor), where floor is
/// 1e-3 of the array's largest magnitude (absolute error near zeros).
inline double max_relative_error(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("max_relative_error: size mismatch");
    }
    double scale = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        scale = std::max({scale, std::fabs(a[i]), std::fabs(b[i])});
    }
    const double floor = std::max(1e-3 * scale, 1e-300);
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double denom = std::max({std::fabs(a[i]), std::fabs(b[i]), floor});
        worst = std::max(worst, std::fabs(a[i] - b[i]) / denom);
    }
    return worst;
}

inline void write_closed_form_csv(const ClosedFormCoefficients& cf, const std::string& path) {
    io::CsvWriter w(path, {"t", "f", "g", "h"});
    for (std::size_t k = 0; k < cf.grid.size(); ++k) {
        w.row({cf.grid.at(k), cf.f[k], cf.g[k], cf.h[k]});
    }
}

}  // namespace unwind
