#pragma once

#include "unwind/curve.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace unwind {

/// Liquidity and impact curves on [0, T]. Time in days, volumes in ADV
/// fractions.
///
///   beta        impact decay rate, 1/day
///   lambda      price push per unit volume (stored log-linear)
///   lambda_open push in the opening auction
///   epsilon     quadratic cost on trading speed, volume^-2 day^-1
struct MarketCurves {
    double horizon = 1.0;
    Curve beta{8.0};
    Curve lambda{0.2};
    double lambda_open = 0.2;
    Curve epsilon{0.01};

    MarketCurves() = default;
    MarketCurves(Curve b, Curve l, double l_open, Curve e, double T = 1.0)
        : horizon{T}, beta{std::move(b)}, lambda{l.with_interp(Curve::Interp::log_linear)},
          lambda_open{l_open}, epsilon{std::move(e)} {
        check();
    }

    /// Constant liquidity with lambda_open = lambda.
    static MarketCurves constant(double b, double l, double e) {
        return MarketCurves{Curve{b}, Curve{l}, l, Curve{e}};
    }

    bool is_constant() const {
        return beta.is_constant() && lambda.is_constant() && epsilon.is_constant() &&
               lambda_open == lambda(0.0);
    }

    void check() const {
        if (!(horizon > 0.0)) {
            throw std::invalid_argument("MarketCurves: horizon must be positive");
        }
        if (!(beta.min_value() > 0.0)) {
            throw std::invalid_argument("MarketCurves: beta must be positive");
        }
        if (!(lambda.min_value() > 0.0)) {
            throw std::invalid_argument("MarketCurves: lambda must be positive");
        }
        if (!(epsilon.min_value() > 0.0)) {
            throw std::invalid_argument("MarketCurves: epsilon must be positive");
        }
        if (!(lambda_open > 0.0) || !std::isfinite(lambda_open)) {
            throw std::invalid_argument("MarketCurves: lambda_open must be positive");
        }
    }
};

/// Martingale driving the in-flow.
struct DriverSpec {
    enum class Kind { brownian, gaussian_shocks };

    Kind kind = Kind::gaussian_shocks;
    std::size_t n_shocks = 20;
    /// Total shock variance over [0, T]; negative means "derive from sigma^2 T".
    double total_variance = -1.0;

    void check() const {
        if (kind == Kind::gaussian_shocks && n_shocks < 1) {
            throw std::invalid_argument("DriverSpec: n_shocks must be >= 1");
        }
    }
};

inline const char* to_string(DriverSpec::Kind k) {
    return k == DriverSpec::Kind::brownian ? "brownian" : "gaussian_shocks";
}

/// In-flow dZ = -theta Z dt + dM, Z_0 = z0.
struct InflowParams {
    Curve theta{0.0};
    Curve sigma{0.1};
    double z0 = 0.1;
    DriverSpec driver{};

    void check() const {
        if (sigma.min_value() < 0.0) {
            throw std::invalid_argument("InflowParams: sigma must be non-negative");
        }
        if (!std::isfinite(z0)) {
            throw std::invalid_argument("InflowParams: z0 is not finite");
        }
        driver.check();
        if (driver.kind == DriverSpec::Kind::gaussian_shocks && driver.total_variance >= 0.0 &&
            !std::isfinite(driver.total_variance)) {
            throw std::invalid_argument("InflowParams: total_variance is not finite");
        }
    }

    /// Variance of all shocks together: the explicit value, or int sigma^2 dt.
    double shock_total_variance(double horizon) const {
        if (driver.total_variance >= 0.0) {
            return driver.total_variance;
        }
        if (sigma.is_constant()) {
            return sigma(0.0) * sigma(0.0) * horizon;
        }
        const int n = 4096;
        double acc = 0.0;
        for (int k = 0; k <= n; ++k) {
            const double s = sigma(horizon * k / n);
            acc += ((k == 0 || k == n) ? 0.5 : 1.0) * s * s;
        }
        return acc * horizon / n;
    }
};

/// State before the opening auction.
struct InitialState {
    double x0 = -0.1;  ///< inventory, -z0 when starting from pure in-flow
    double y0 = 0.0;   ///< impact state Y_{0-}

    static InitialState from_inflow(const InflowParams& inflow, double y0 = 0.0) {
        return {-inflow.z0, y0};
    }
};

struct Violation {
    std::string condition;
    double time = 0.0;   ///< time of the worst value
    double value = 0.0;  ///< worst value of the tested quantity
};

struct ValidationReport {
    bool ok = true;
    std::vector<Violation> violations;
    std::vector<Violation> warnings;
};

/// d/dt log lambda_t, piecewise constant for gridded lambda.
inline double gamma_dot(const MarketCurves& curves, double t) {
    if (!(t >= 0.0 && t <= curves.horizon)) {
        throw std::domain_error("gamma_dot: t outside [0, T]");
    }
    return curves.lambda.log_slope(t);
}

namespace detail {

/// Points at which piecewise quantities attain their extrema: every knot of
/// every gridded curve plus a fine uniform sweep.
inline std::vector<double> probe_times(const MarketCurves& c) {
    std::vector<double> ts;
    const int n = 2000;
    for (int k = 0; k <= n; ++k) {
        ts.push_back(c.horizon * k / n);
    }
    for (const Curve* cv : {&c.beta, &c.lambda}) {
        for (double t : cv->knots()) {
            ts.push_back(t);
            if (t > 0.0) {
                ts.push_back(t * (1.0 - 1e-12));  // left limit of the previous cell
            }
        }
    }
    return ts;
}

}  // namespace detail

/// Checks the no-arbitrage conditions lambda_{0-} <= lambda_0 and
/// 2 beta + gamma_dot > 0; reports beta + gamma_dot <= 0 as a warning.
inline ValidationReport validate(const MarketCurves& curves) {
    ValidationReport rep;
    const double lam0 = curves.lambda(0.0);
    if (curves.lambda_open > lam0) {
        rep.violations.push_back({"lambda_open_exceeds", 0.0, curves.lambda_open - lam0});
    }

    double worst_strong = std::numeric_limits<double>::infinity();
    double worst_strong_t = 0.0;
    double worst_weak = std::numeric_limits<double>::infinity();
    double worst_weak_t = 0.0;
    for (double t : detail::probe_times(curves)) {
        const double gd = gamma_dot(curves, t);
        const double b = curves.beta(t);
        if (2.0 * b + gd < worst_strong) {
            worst_strong = 2.0 * b + gd;
            worst_strong_t = t;
        }
        if (b + gd < worst_weak) {
            worst_weak = b + gd;
            worst_weak_t = t;
        }
    }
    if (!(worst_strong > 0.0)) {
        rep.violations.push_back({"resilience_liquidity_2beta", worst_strong_t, worst_strong});
    }
    if (!(worst_weak > 0.0)) {
        rep.warnings.push_back({"transaction_triggered_beta", worst_weak_t, worst_weak});
    }
    rep.ok = rep.violations.empty();
    return rep;
}

/// True when beta_t + gamma_dot_t > 0 everywhere.
inline bool strict_resilience(const MarketCurves& curves) {
    for (double t : detail::probe_times(curves)) {
        if (!(curves.beta(t) + gamma_dot(curves, t) > 0.0)) {
            return false;
        }
    }
    return true;
}

}  // namespace unwind
