#pragma once

#include "unwind/closed_form.hpp"
#include "unwind/io.hpp"
#include "unwind/params.hpp"
#include "unwind/riccati.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace unwind {

/// Optimal feedback q = f x + g y + h z on a grid, plus the opening-auction
/// constants. The `_open` values are the 0- limits: Riccati values at 0 with
/// lambda_{0-} replacing lambda_0.
struct PolicyCoefficients {
    TimeGrid grid;
    std::vector<double> f, g, h;
    double f_open = 0.0;
    double g_open = 0.0;
    double h_open = 0.0;
    double eta_open = 0.0;  ///< -(1 - lambda_{0-}/lambda_0) / epsilon_0, <= 0
    double r = 0.0;         ///< -f_open - lambda_{0-} (g_open + eta_open), > 0
    double lambda_open = 0.0;

    /// Multiplies f, g, h (all times, including the 0- values) and eta by
    /// `factor` while keeping r, so the opening block scales by `factor` too.
    /// Used for perturbation studies.
    PolicyCoefficients scaled(double factor) const {
        PolicyCoefficients p = *this;
        for (auto* v : {&p.f, &p.g, &p.h}) {
            for (double& x : *v) {
                x *= factor;
            }
        }
        p.f_open *= factor;
        p.g_open *= factor;
        p.h_open *= factor;
        p.eta_open *= factor;
        return p;
    }
};

class PolicyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Quadratic value polynomial at one time.
struct ValuePolynomial {
    double A = 0, B = 0, C = 0, D = 0, E = 0, F = 0, K = 0;

    static ValuePolynomial at(const RiccatiSolution& sol, std::size_t k) {
        return {sol.A[k], sol.B[k], sol.C[k], sol.D[k], sol.E[k], sol.F[k], sol.K[k]};
    }

    double operator()(double x, double y, double z) const {
        return 0.5 * A * x * x + B * x * y + 0.5 * C * y * y + D * x * z + E * y * z +
               0.5 * F * z * z + K;
    }
};

/// f = -(A + lambda B)/eps, g = -(B + lambda C)/eps, h = -(D + lambda E)/eps.
inline PolicyCoefficients feedback_coefficients(const RiccatiSolution& sol,
                                                const MarketCurves& curves) {
    if (std::fabs(sol.grid.horizon - curves.horizon) > 1e-12) {
        throw std::invalid_argument("feedback_coefficients: solution and curves disagree on T");
    }
    PolicyCoefficients p;
    p.grid = sol.grid;
    const std::size_t n = sol.grid.size();
    p.f.resize(n);
    p.g.resize(n);
    p.h.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double t = sol.grid.at(k);
        const double eps = curves.epsilon(t);
        const double lam = curves.lambda(t);
        p.f[k] = -(sol.A[k] + lam * sol.B[k]) / eps;
        p.g[k] = -(sol.B[k] + lam * sol.C[k]) / eps;
        p.h[k] = -(sol.D[k] + lam * sol.E[k]) / eps;
    }
    // exact zeros at T: A_T + lambda_T B_T = 0 and B_T + lambda_T C_T = 0
    // hold only up to rounding of 1/lambda_T
    p.f[n - 1] = 0.0;
    p.g[n - 1] = 0.0;
    p.h[n - 1] = 0.0;

    const double eps0 = curves.epsilon(0.0);
    const double lam0 = curves.lambda(0.0);
    const double lo = curves.lambda_open;
    p.lambda_open = lo;
    p.f_open = -(sol.A[0] + lo * sol.B[0]) / eps0;
    p.g_open = -(sol.B[0] + lo * sol.C[0]) / eps0;
    p.h_open = -(sol.D[0] + lo * sol.E[0]) / eps0;
    p.eta_open = -(1.0 - lo / lam0) / eps0;
    p.r = -p.f_open - lo * (p.g_open + p.eta_open);
    if (!(p.r > 0.0)) {
        throw PolicyError("feedback_coefficients: r <= 0");
    }
    if (!(p.g_open + p.eta_open < 0.0)) {
        throw PolicyError("feedback_coefficients: g_open + eta_open >= 0");
    }
    return p;
}

/// Opening-auction block for inventory x0 (= -z0 for pure in-flow), impact
/// y0 and in-flow z0.
inline double opening_block(const PolicyCoefficients& c, double y0, double z0, double x0) {
    return (c.f_open * x0 + (c.g_open + c.eta_open) * y0 + c.h_open * z0) / c.r;
}

inline double opening_block(const PolicyCoefficients& c, double y0, double z0) {
    return opening_block(c, y0, z0, -z0);
}

/// q_t = f_t x + g_t y + h_t z, coefficients linearly interpolated.
inline double trading_rate(const PolicyCoefficients& c, double t, double x, double y, double z) {
    return RiccatiSolution::interp(c.grid, c.f, t) * x + RiccatiSolution::interp(c.grid, c.g, t) * y +
           RiccatiSolution::interp(c.grid, c.h, t) * z;
}

/// Expected impact plus spread cost of the optimal strategy. The frictionless
/// term E[S_T Z_T] is not a transaction cost and is left out.
///
/// `k0` overrides the diffusion K_0, e.g. with the shock-driver value from
/// `k_for_jump_driver`.
inline double expected_cost(const RiccatiSolution& sol, const PolicyCoefficients& c,
                            const MarketCurves& curves, const InitialState& init, double z0,
                            const double* k0 = nullptr) {
    const double j0 = opening_block(c, init.y0, z0, init.x0);
    const double lo = curves.lambda_open;
    const double lam0 = curves.lambda(0.0);
    ValuePolynomial v = ValuePolynomial::at(sol, 0);
    if (k0) {
        v.K = *k0;
    }
    const double y_after = init.y0 + lo * j0;
    return v(init.x0 + j0, y_after, z0) +
           0.5 * ((1.0 / lo - 1.0 / lam0) * y_after * y_after - init.y0 * init.y0 / lo);
}

/// Supremum of the relative errors between closed-form and Riccati-derived
/// f, g, h on a shared grid.
struct CrossCheck {
    double f = 0.0;
    double g = 0.0;
    double h = 0.0;
    double max() const { return std::max({f, g, h}); }
};

inline CrossCheck cross_check(const ClosedFormCoefficients& closed,
                              const PolicyCoefficients& numeric) {
    if (!(closed.grid == numeric.grid)) {
        throw std::invalid_argument("cross_check: grids differ");
    }
    return {max_relative_error(closed.f, numeric.f), max_relative_error(closed.g, numeric.g),
            max_relative_error(closed.h, numeric.h)};
}

inline void write_policy_csv(const PolicyCoefficients& p, const std::string& path) {
    io::CsvWriter w(path, {"t", "f", "g", "h"});
    for (std::size_t k = 0; k < p.grid.size(); ++k) {
        w.row({p.grid.at(k), p.f[k], p.g[k], p.h[k]});
    }
}

}  // namespace unwind
