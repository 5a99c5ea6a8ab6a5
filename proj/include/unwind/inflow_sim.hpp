#pragma once

#include "unwind/curve.hpp"
#include "unwind/params.hpp"
#include "unwind/policy.hpp"
#include "unwind/riccati.hpp"
#include "unwind/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <thread>
#include <vector>

namespace unwind {

/// One in-flow realisation on a grid.
struct InflowPath {
    std::vector<double> Z;             ///< Z at grid points
    std::vector<double> shock_times;   ///< empty for the Brownian driver
    std::vector<double> shock_sizes;
    double tv = 0.0;  ///< |z0| + total variation over [0, T]
    double qv = 0.0;  ///< sum of squared martingale increments
};

namespace detail {

/// exp(-int_a^b theta)
inline double ou_decay(const Curve& theta, double a, double b) {
    if (theta.is_constant()) {
        return std::exp(-theta(0.0) * (b - a));
    }
    return std::exp(-theta.integral(a, b));
}

}  // namespace detail

/// Precomputed per-step quantities for in-flow generation on a fixed grid.
class InflowGenerator {
public:
    InflowGenerator(const InflowParams& inflow, const TimeGrid& grid) : inflow_{inflow}, grid_{grid} {
        inflow_.check();
        const std::size_t n = grid_.n_steps;
        decay_.resize(n);
        noise_sd_.resize(n, 0.0);
        for (std::size_t k = 0; k < n; ++k) {
            const double a = grid_.at(k);
            const double b = grid_.at(k + 1);
            decay_[k] = detail::ou_decay(inflow_.theta, a, b);
            if (inflow_.driver.kind == DriverSpec::Kind::brownian) {
                // exact OU variance over the step with coefficients frozen at t_k
                const double th = inflow_.theta(a);
                const double sg = inflow_.sigma(a);
                const double dt = b - a;
                const double var = std::fabs(th) * dt < 1e-12
                                       ? sg * sg * dt
                                       : sg * sg * (1.0 - std::exp(-2.0 * th * dt)) / (2.0 * th);
                noise_sd_[k] = std::sqrt(var);
            }
        }
        if (inflow_.driver.kind == DriverSpec::Kind::gaussian_shocks) {
            shock_times_ = shock_schedule(inflow_.driver.n_shocks, grid_.horizon);
            const double total = inflow_.shock_total_variance(grid_.horizon);
            shock_sd_ = std::sqrt(total / static_cast<double>(inflow_.driver.n_shocks));
            // step index whose interval (t_k, t_{k+1}] holds each shock
            shock_step_.resize(shock_times_.size());
            for (std::size_t i = 0; i < shock_times_.size(); ++i) {
                auto k = static_cast<std::size_t>(std::ceil(shock_times_[i] / grid_.dt() - 1e-9));
                shock_step_[i] = std::clamp<std::size_t>(k, 1, n) - 1;
            }
        }
    }

    const TimeGrid& grid() const { return grid_; }
    const InflowParams& params() const { return inflow_; }
    const std::vector<double>& shock_times() const { return shock_times_; }
    double shock_sd() const { return shock_sd_; }

    InflowPath generate(PathRng& rng) const {
        InflowPath p;
        const std::size_t n = grid_.n_steps;
        p.Z.resize(n + 1);
        double z = inflow_.z0;
        p.Z[0] = z;
        p.tv = std::fabs(z);

        if (inflow_.driver.kind == DriverSpec::Kind::brownian) {
            for (std::size_t k = 0; k < n; ++k) {
                const double noise = noise_sd_[k] * rng.normal();
                const double next = z * decay_[k] + noise;
                p.tv += std::fabs(next - z);
                p.qv += noise * noise;
                z = next;
                p.Z[k + 1] = z;
            }
            return p;
        }

        // Gaussian shocks: draw all unit normals first so a path's shocks
        // depend only on its stream, not on the grid.
        p.shock_times = shock_times_;
        p.shock_sizes.resize(shock_times_.size());
        for (double& s : p.shock_sizes) {
            s = shock_sd_ * rng.normal();
        }
        std::size_t next_shock = 0;
        for (std::size_t k = 0; k < n; ++k) {
            if (next_shock < shock_step_.size() && shock_step_[next_shock] == k) {
                double cur_t = grid_.at(k);
                while (next_shock < shock_step_.size() && shock_step_[next_shock] == k) {
                    const double ts = shock_times_[next_shock];
                    const double decayed = z * detail::ou_decay(inflow_.theta, cur_t, ts);
                    p.tv += std::fabs(decayed - z);
                    const double xi = p.shock_sizes[next_shock];
                    z = decayed + xi;
                    p.tv += std::fabs(xi);
                    p.qv += xi * xi;
                    cur_t = ts;
                    ++next_shock;
                }
                const double decayed = z * detail::ou_decay(inflow_.theta, cur_t, grid_.at(k + 1));
                p.tv += std::fabs(decayed - z);
                z = decayed;
            } else {
                const double next = z * decay_[k];
                p.tv += std::fabs(next - z);
                z = next;
            }
            p.Z[k + 1] = z;
        }
        return p;
    }

private:
    InflowParams inflow_;
    TimeGrid grid_;
    std::vector<double> decay_;
    std::vector<double> noise_sd_;
    std::vector<double> shock_times_;
    std::vector<std::size_t> shock_step_;
    double shock_sd_ = 0.0;
};

inline InflowPath simulate_inflow(const InflowParams& inflow, const TimeGrid& grid, PathRng& rng) {
    return InflowGenerator{inflow, grid}.generate(rng);
}

/// One simulated day under a feedback policy.
struct PathResult {
    std::uint64_t path_id = 0;
    double j0 = 0.0;
    double jt = 0.0;
    double continuous_volume = 0.0;  ///< sum q dt
    double impact_cost = 0.0;
    double spread_cost = 0.0;
    double tv_inflow = 0.0;
    double tv_outflow = 0.0;
    double qv_inflow = 0.0;
    double z_terminal = 0.0;
    double net_outflow = 0.0;  ///< Q_T, equals Z_T when starting from x0 = -z0
    bool outflow_monotone = true;
    double y_initial = 0.0;

    // Filled only when the trajectory is kept. X and Y are the pre-close
    // states, so X.back() = X_{T-} = -jt.
    std::vector<double> t, Z, X, Y, q;

    bool has_trajectory() const { return !t.empty(); }
};

/// Feedback coefficients and liquidity sampled on the simulation grid.
struct SimSchedule {
    TimeGrid grid;
    std::vector<double> f, g, h;
    std::vector<double> lambda, epsilon, y_decay;
    double f_open = 0, g_open = 0, h_open = 0, eta_open = 0, r = 0;
    double lambda_open = 0.0;
    double lambda_close = 0.0;

    SimSchedule(const PolicyCoefficients& c, const MarketCurves& m, const TimeGrid& g_)
        : grid{g_} {
        const std::size_t n = grid.size();
        f.resize(n);
        g.resize(n);
        h.resize(n);
        lambda.resize(n);
        epsilon.resize(n);
        y_decay.resize(n);
        const bool same = c.grid == grid;
        for (std::size_t k = 0; k < n; ++k) {
            const double t = grid.at(k);
            f[k] = same ? c.f[k] : RiccatiSolution::interp(c.grid, c.f, t);
            g[k] = same ? c.g[k] : RiccatiSolution::interp(c.grid, c.g, t);
            h[k] = same ? c.h[k] : RiccatiSolution::interp(c.grid, c.h, t);
            lambda[k] = m.lambda(t);
            epsilon[k] = m.epsilon(t);
            y_decay[k] = std::exp(-m.beta(t) * grid.dt());
        }
        f_open = c.f_open;
        g_open = c.g_open;
        h_open = c.h_open;
        eta_open = c.eta_open;
        r = c.r;
        lambda_open = m.lambda_open;
        lambda_close = m.lambda(m.horizon);
    }

    double opening_block(double y0, double z0, double x0) const {
        return (f_open * x0 + (g_open + eta_open) * y0 + h_open * z0) / r;
    }
};

namespace detail {

inline void track_sign(double v, int& sign, bool& monotone) {
    if (v > 0.0) {
        if (sign < 0) monotone = false;
        sign = 1;
    } else if (v < 0.0) {
        if (sign > 0) monotone = false;
        sign = -1;
    }
}

}  // namespace detail

/// Runs the controlled state (X, Y) along a given in-flow path.
///
/// Per step: q_k = f_k X_k + g_k Y_k + h_k Z_k, X += q dt - dZ,
/// Y = Y e^{-beta dt} + lambda q dt. The closing block makes Q_T match the
/// required net out-flow. Costs:
///   impact = y J0 + lambda_{0-} J0^2/2 + sum Y_k q_k dt + Y_{N-1} JT + lambda_T JT^2/2
///   spread = sum eps_k q_k^2 dt / 2
inline PathResult simulate_path(const SimSchedule& s, const InitialState& init,
                                const InflowPath& inflow, bool keep_trajectory = false) {
    const std::size_t n = s.grid.n_steps;
    if (inflow.Z.size() != n + 1) {
        throw std::invalid_argument("simulate_path: in-flow grid does not match the schedule");
    }
    const double dt = s.grid.dt();
    const double z0 = inflow.Z[0];

    PathResult r;
    r.y_initial = init.y0;
    r.tv_inflow = inflow.tv;
    r.qv_inflow = inflow.qv;
    r.z_terminal = inflow.Z[n];

    const double j0 = s.opening_block(init.y0, z0, init.x0);
    double x = init.x0 + j0;
    double y = init.y0 + s.lambda_open * j0;
    r.j0 = j0;

    int sign = 0;
    bool monotone = true;
    detail::track_sign(j0, sign, monotone);

    double impact = init.y0 * j0 + 0.5 * s.lambda_open * j0 * j0;
    double spread = 0.0;
    double qsum = 0.0;
    double qabs = 0.0;
    double y_before_last = y;

    if (keep_trajectory) {
        r.t.resize(n + 1);
        r.Z = inflow.Z;
        r.X.resize(n + 1);
        r.Y.resize(n + 1);
        r.q.resize(n + 1);
    }

    for (std::size_t k = 0; k < n; ++k) {
        const double z = inflow.Z[k];
        const double q = s.f[k] * x + s.g[k] * y + s.h[k] * z;
        if (keep_trajectory) {
            r.t[k] = s.grid.at(k);
            r.X[k] = x;
            r.Y[k] = y;
            r.q[k] = q;
        }
        impact += y * q * dt;
        spread += 0.5 * s.epsilon[k] * q * q * dt;
        qsum += q * dt;
        qabs += std::fabs(q) * dt;
        detail::track_sign(q, sign, monotone);

        y_before_last = y;
        x += q * dt - (inflow.Z[k + 1] - z);
        y = y * s.y_decay[k] + s.lambda[k] * q * dt;
    }

    // Q_T = Z_T - z0 - x0 closes the book
    r.net_outflow = inflow.Z[n] - z0 - init.x0;
    const double jt = r.net_outflow - j0 - qsum;
    r.jt = jt;
    r.continuous_volume = qsum;
    detail::track_sign(jt, sign, monotone);

    impact += y_before_last * jt + 0.5 * s.lambda_close * jt * jt;
    r.impact_cost = impact;
    r.spread_cost = spread;
    r.tv_outflow = std::fabs(j0) + qabs + std::fabs(jt);
    r.outflow_monotone = monotone;

    if (keep_trajectory) {
        r.t[n] = s.grid.horizon;
        r.X[n] = x;
        r.Y[n] = y;
        r.q[n] = 0.0;
    }
    return r;
}

inline PathResult simulate_path(const PolicyCoefficients& coeffs, const MarketCurves& curves,
                                const InitialState& init, const InflowPath& inflow,
                                bool keep_trajectory = false) {
    if (inflow.Z.size() < 3) {
        throw std::invalid_argument("simulate_path: in-flow path too short");
    }
    const TimeGrid grid{curves.horizon, inflow.Z.size() - 1};
    return simulate_path(SimSchedule{coeffs, curves, grid}, init, inflow, keep_trajectory);
}

struct Costs {
    double impact = 0.0;
    double spread = 0.0;
};

/// Recomputes the realised costs of a path from its stored trajectory.
inline Costs realized_costs(const PathResult& p, const MarketCurves& curves) {
    if (!p.has_trajectory()) {
        throw std::invalid_argument("realized_costs: path has no stored trajectory");
    }
    const std::size_t n = p.t.size() - 1;
    const double dt = p.t[n] / static_cast<double>(n);
    const double lo = curves.lambda_open;
    const double lt = curves.lambda(curves.horizon);
    Costs c;
    c.impact = p.y_initial * p.j0 + 0.5 * lo * p.j0 * p.j0;
    for (std::size_t k = 0; k < n; ++k) {
        c.impact += p.Y[k] * p.q[k] * dt;
        c.spread += 0.5 * curves.epsilon(p.t[k]) * p.q[k] * p.q[k] * dt;
    }
    c.impact += p.Y[n - 1] * p.jt + 0.5 * lt * p.jt * p.jt;
    return c;
}

/// Runs `fn(i)` for i in [0, n) on `threads` workers (0 = hardware count).
/// Work is split into contiguous blocks; callers write results by index.
template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
    if (threads == 0) {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }
    std::vector<std::thread> pool;
    const std::size_t block = (n + threads - 1) / threads;
    for (unsigned w = 0; w < threads; ++w) {
        const std::size_t lo = w * block;
        const std::size_t hi = std::min(n, lo + block);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (std::size_t i = lo; i < hi; ++i) {
                fn(i);
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
}

/// A policy together with the in-flow it is run against. The policy may be
/// built from different in-flow parameters than those simulated
/// (misspecification studies).
class Simulator {
public:
    Simulator(const PolicyCoefficients& policy, const MarketCurves& curves,
              const InflowParams& inflow, const InitialState& init, const TimeGrid& grid)
        : schedule_{policy, curves, grid}, generator_{inflow, grid}, init_{init} {}

    PathResult run(std::uint64_t base_seed, std::uint64_t path_index,
                   bool keep_trajectory = false) const {
        PathRng rng{base_seed, path_index};
        const InflowPath z = generator_.generate(rng);
        PathResult r = simulate_path(schedule_, init_, z, keep_trajectory);
        r.path_id = path_index;
        return r;
    }

    std::vector<PathResult> run_batch(std::size_t n_paths, std::uint64_t base_seed,
                                      unsigned threads = 0) const {
        std::vector<PathResult> out(n_paths);
        parallel_for(n_paths, threads, [&](std::size_t i) { out[i] = run(base_seed, i); });
        return out;
    }

    const SimSchedule& schedule() const { return schedule_; }
    const InflowGenerator& generator() const { return generator_; }

private:
    SimSchedule schedule_;
    InflowGenerator generator_;
    InitialState init_;
};

}  // namespace unwind
