#pragma once

#include "unwind/curve.hpp"
#include "unwind/io.hpp"
#include "unwind/params.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace unwind {

/// Coefficients of the quadratic value function
///   v = A x^2/2 + B x y + C y^2/2 + D x z + E y z + F z^2/2 + K
/// on a uniform grid over [0, T].
struct RiccatiSolution {
    TimeGrid grid;
    std::vector<double> A, B, C, D, E, F, K;

    /// Linear interpolation of one coefficient array at time t.
    static double interp(const TimeGrid& g, const std::vector<double>& v, double t) {
        const double u = std::clamp(t, 0.0, g.horizon) / g.dt();
        auto i = static_cast<std::size_t>(std::floor(u));
        if (i >= g.n_steps) {
            return v.back();
        }
        const double w = u - static_cast<double>(i);
        return v[i] + w * (v[i + 1] - v[i]);
    }

    double at(const std::vector<double>& v, double t) const { return interp(grid, v, t); }
};

class RiccatiError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

using RiccatiState = std::array<double, 7>;  // A B C D E F K

struct RiccatiRhs {
    const MarketCurves& m;
    const InflowParams& in;

    // `cell_lo`/`cell_hi` bracket the current step; gamma_dot is read from
    // inside the bracket so knots of a log-linear lambda are not crossed.
    RiccatiState operator()(double t, const RiccatiState& s, double cell_lo, double cell_hi) const {
        const double eps = m.epsilon(t);
        const double lam = m.lambda(t);
        const double beta = m.beta(t);
        const double probe = std::clamp(t, cell_lo, cell_lo + (cell_hi - cell_lo) * (1.0 - 1e-9));
        const double gd = m.lambda.log_slope(probe);
        const double th = in.theta(t);
        const double sg = in.sigma(t);

        const double a = s[0], b = s[1], c = s[2], d = s[3], e = s[4], f = s[5];
        const double mx = a + lam * b;
        const double ny = b + lam * c;
        const double hz = d + lam * e;

        RiccatiState r;
        r[0] = mx * mx / eps;
        r[1] = mx * ny / eps + beta * b;
        r[2] = ny * ny / eps + 2.0 * beta * c - (2.0 * beta + gd) / lam;
        r[3] = mx * hz / eps - th * (a - d);
        r[4] = ny * hz / eps - th * (b - e) + beta * e;
        r[5] = hz * hz / eps - 2.0 * th * (d - f);
        r[6] = -sg * sg * (a - 2.0 * d + f) / 2.0;
        return r;
    }
};

}  // namespace detail

/// Integrates the Riccati system backward from T with classical RK4 on a
/// uniform grid of `n_steps` intervals.
inline RiccatiSolution solve_riccati(const MarketCurves& curves, const InflowParams& inflow,
                                     std::size_t n_steps = 2000) {
    curves.check();
    inflow.check();
    const ValidationReport rep = validate(curves);
    if (!rep.ok) {
        throw std::invalid_argument("solve_riccati: market curves violate " +
                                    rep.violations.front().condition);
    }
    const TimeGrid grid{curves.horizon, n_steps};
    const std::size_t n = grid.size();

    RiccatiSolution sol;
    sol.grid = grid;
    for (auto* v : {&sol.A, &sol.B, &sol.C, &sol.D, &sol.E, &sol.F, &sol.K}) {
        v->assign(n, 0.0);
    }

    const double lam_T = curves.lambda(curves.horizon);
    detail::RiccatiState s{lam_T, -1.0, 1.0 / lam_T, 0.0, 0.0, 0.0, 0.0};
    auto store = [&](std::size_t k) {
        sol.A[k] = s[0];
        sol.B[k] = s[1];
        sol.C[k] = s[2];
        sol.D[k] = s[3];
        sol.E[k] = s[4];
        sol.F[k] = s[5];
        sol.K[k] = s[6];
    };
    store(n - 1);

    const detail::RiccatiRhs rhs{curves, inflow};
    for (std::size_t k = n - 1; k-- > 0;) {
        const double lo = grid.at(k);
        const double hi = grid.at(k + 1);
        const double step = -(hi - lo);
        auto axpy = [](const detail::RiccatiState& x, double w, const detail::RiccatiState& y) {
            detail::RiccatiState r;
            for (std::size_t i = 0; i < r.size(); ++i) {
                r[i] = x[i] + w * y[i];
            }
            return r;
        };
        const auto k1 = rhs(hi, s, lo, hi);
        const auto k2 = rhs(hi + 0.5 * step, axpy(s, 0.5 * step, k1), lo, hi);
        const auto k3 = rhs(hi + 0.5 * step, axpy(s, 0.5 * step, k2), lo, hi);
        const auto k4 = rhs(lo, axpy(s, step, k3), lo, hi);
        for (std::size_t i = 0; i < s.size(); ++i) {
            s[i] += step / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            if (!std::isfinite(s[i])) {
                throw RiccatiError("solve_riccati: non-finite value at t=" + std::to_string(lo));
            }
        }
        store(k);
    }
    return sol;
}

/// K for a martingale made of independent shocks at deterministic times:
/// K_t = sum_{t_i > t} (A - 2D + F)(t_i) var_i / 2.
inline std::vector<double> k_for_jump_driver(const RiccatiSolution& sol,
                                             const std::vector<double>& shock_times,
                                             const std::vector<double>& shock_variances) {
    if (shock_times.size() != shock_variances.size()) {
        throw std::invalid_argument("k_for_jump_driver: times and variances differ in length");
    }
    const double T = sol.grid.horizon;
    std::vector<double> weights(shock_times.size());
    for (std::size_t i = 0; i < shock_times.size(); ++i) {
        const double ti = shock_times[i];
        if (!(ti > 0.0 && ti < T)) {
            throw std::invalid_argument("k_for_jump_driver: shock time outside (0, T)");
        }
        if (!(shock_variances[i] >= 0.0)) {
            throw std::invalid_argument("k_for_jump_driver: negative shock variance");
        }
        weights[i] = 0.5 *
                     (sol.at(sol.A, ti) - 2.0 * sol.at(sol.D, ti) + sol.at(sol.F, ti)) *
                     shock_variances[i];
    }
    std::vector<double> K(sol.grid.size(), 0.0);
    for (std::size_t k = 0; k < K.size(); ++k) {
        const double t = sol.grid.at(k);
        double acc = 0.0;
        for (std::size_t i = 0; i < shock_times.size(); ++i) {
            if (shock_times[i] > t) {
                acc += weights[i];
            }
        }
        K[k] = acc;
    }
    return K;
}

/// Interior equispaced shock times t_i = i T / (n + 1), i = 1..n.
inline std::vector<double> shock_schedule(std::size_t n_shocks, double horizon) {
    std::vector<double> ts(n_shocks);
    for (std::size_t i = 0; i < n_shocks; ++i) {
        ts[i] = horizon * static_cast<double>(i + 1) / static_cast<double>(n_shocks + 1);
    }
    return ts;
}

/// Lists every grid point where a structural property of the solution fails.
/// `tol` is absolute for O(1) entries and relative beyond. Checks the PSD block, 0 <= C <= 1/lambda, B + lambda C > 0 and, when
/// beta + gamma_dot > 0, the ordering A + lambda B > max(D + lambda E, 0),
/// B < min(E, 0).
inline std::vector<std::string> riccati_invariant_violations(const RiccatiSolution& sol,
                                                             const MarketCurves& curves,
                                                             double tol = 1e-9) {
    std::vector<std::string> out;
    const bool strict = strict_resilience(curves);
    auto fail = [&](const char* what, std::size_t k) {
        out.push_back(std::string(what) + " at t=" + std::to_string(sol.grid.at(k)));
    };
    for (std::size_t k = 0; k < sol.grid.size(); ++k) {
        const double a = sol.A[k], b = sol.B[k], c = sol.C[k];
        const double lam = curves.lambda(sol.grid.at(k));
        // tolerances are relative once the entries exceed 1 (C ~ 1/lambda
        // can be large when lambda is small)
        const double det_scale = std::max({1.0, std::fabs(a * c), b * b});
        if (a < -tol * std::max(1.0, std::fabs(a)) || c < -tol * std::max(1.0, std::fabs(c)) ||
            a * c - b * b < -tol * det_scale) {
            fail("psd", k);
        }
        if (c > 1.0 / lam + tol * std::max(1.0, 1.0 / lam)) {
            fail("C_above_inverse_lambda", k);
        }
        if (k + 1 == sol.grid.size()) {
            continue;
        }
        if (!(b + lam * c > 0.0)) {
            fail("B_plus_lambda_C_nonpositive", k);
        }
        if (strict) {
            const double mx = a + lam * b;
            const double hz = sol.D[k] + lam * sol.E[k];
            if (!(mx > std::max(hz, 0.0))) {
                fail("A_plus_lambda_B_order", k);
            }
            if (!(b < std::min(sol.E[k], 0.0))) {
                fail("B_below_min_E_0", k);
            }
        }
    }
    return out;
}

inline void write_riccati_csv(const RiccatiSolution& sol, const std::string& path) {
    io::CsvWriter w(path, {"t", "A", "B", "C", "D", "E", "F", "K"});
    for (std::size_t k = 0; k < sol.grid.size(); ++k) {
        w.row({sol.grid.at(k), sol.A[k], sol.B[k], sol.C[k], sol.D[k], sol.E[k], sol.F[k],
               sol.K[k]});
    }
}

}  // namespace unwind
