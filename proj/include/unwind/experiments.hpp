#pragma once

#include "unwind/closed_form.hpp"
#include "unwind/config.hpp"
#include "unwind/inflow_sim.hpp"
#include "unwind/metrics.hpp"
#include "unwind/params.hpp"
#include "unwind/policy.hpp"
#include "unwind/riccati.hpp"

#include <cmath>
#include <filesystem>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

namespace unwind {

/// Everything derived from one configuration before simulation.
struct Model {
    MarketCurves market;
    InflowParams inflow;
    InitialState initial;
    RiccatiSolution riccati;
    PolicyCoefficients policy;
    double k0 = 0.0;             ///< K_0 matching the configured driver
    double expected_cost = 0.0;  ///< impact + spread, absolute
    double j0 = 0.0;
};

/// True when the in-flow has no randomness, so a single path is exact.
inline bool deterministic_inflow(const InflowParams& in, double horizon) {
    if (in.driver.kind == DriverSpec::Kind::gaussian_shocks) {
        return in.shock_total_variance(horizon) == 0.0;
    }
    return in.sigma.max_value() == 0.0;
}

inline double driver_k0(const RiccatiSolution& sol, const InflowParams& in, double horizon) {
    if (in.driver.kind == DriverSpec::Kind::brownian) {
        return sol.K.front();
    }
    const auto times = shock_schedule(in.driver.n_shocks, horizon);
    const double var = in.shock_total_variance(horizon) / static_cast<double>(in.driver.n_shocks);
    return k_for_jump_driver(sol, times, std::vector<double>(times.size(), var)).front();
}

inline Model build_model(const RunConfig& cfg) {
    Model m;
    m.market = cfg.market;
    m.inflow = cfg.inflow;
    m.initial = cfg.initial;
    m.riccati = solve_riccati(cfg.market, cfg.inflow, cfg.sim.n_steps);
    m.policy = feedback_coefficients(m.riccati, cfg.market);
    m.k0 = driver_k0(m.riccati, cfg.inflow, cfg.market.horizon);
    m.expected_cost = expected_cost(m.riccati, m.policy, cfg.market, cfg.initial, cfg.inflow.z0, &m.k0);
    m.j0 = opening_block(m.policy, cfg.initial.y0, cfg.inflow.z0, cfg.initial.x0);
    return m;
}

/// Monte Carlo output of one configuration.
struct CellResult {
    double value = 0.0;  ///< scan value (or NaN when not scanning)
    std::size_t n_paths = 0;
    AggregateReport summary;
    double mean_cost = 0.0;  ///< impact + spread, absolute
    double se_cost = 0.0;
    double expected_cost = 0.0;
    double j0 = 0.0;
    std::vector<PathResult> paths;
    std::vector<MetricsReport> metrics;
};

/// Simulates `policy` against the in-flow of `truth`. Paths use streams
/// (seed, 0..n-1) so any two calls with the same seed see the same in-flow.
inline std::vector<PathResult> run_paths(const PolicyCoefficients& policy, const RunConfig& truth,
                                         std::size_t n_paths, std::uint64_t seed) {
    const TimeGrid grid{truth.market.horizon, truth.sim.n_steps};
    const Simulator sim{policy, truth.market, truth.inflow, truth.initial, grid};
    return sim.run_batch(n_paths, seed, truth.sim.threads);
}

inline std::size_t effective_paths(const RunConfig& cfg) {
    return deterministic_inflow(cfg.inflow, cfg.market.horizon) ? 1 : cfg.sim.n_paths;
}

inline CellResult summarize_cell(std::vector<PathResult> paths) {
    CellResult c;
    c.value = std::numeric_limits<double>::quiet_NaN();
    c.n_paths = paths.size();
    c.metrics.reserve(paths.size());
    std::vector<double> costs;
    costs.reserve(paths.size());
    for (const auto& p : paths) {
        c.metrics.push_back(path_metrics(p));
        costs.push_back(p.impact_cost + p.spread_cost);
    }
    c.summary = aggregate(c.metrics);
    const FieldSummary cs = summarize("cost", costs);
    c.mean_cost = cs.mean;
    c.se_cost = cs.se;
    c.paths = std::move(paths);
    return c;
}

inline CellResult run_cell(const RunConfig& cfg) {
    const Model m = build_model(cfg);
    CellResult c = summarize_cell(run_paths(m.policy, cfg, effective_paths(cfg), cfg.sim.seed));
    c.expected_cost = m.expected_cost;
    c.j0 = m.j0;
    return c;
}

inline RunConfig with_scan_value(RunConfig cfg, ScanVariable var, double v) {
    switch (var) {
        case ScanVariable::theta:
            cfg.inflow.theta = Curve{v};
            break;
        case ScanVariable::sigma:
            if (v < 0.0) throw ConfigError("sigma scan values must be non-negative");
            cfg.inflow.sigma = Curve{v};
            break;
        case ScanVariable::epsilon:
            if (!(v > 0.0)) throw ConfigError("epsilon scan values must be positive");
            cfg.market.epsilon = Curve{v};
            break;
        case ScanVariable::n_shocks:
            if (!(v >= 1.0)) throw ConfigError("n_shocks scan values must be >= 1");
            cfg.inflow.driver.n_shocks = static_cast<std::size_t>(std::llround(v));
            break;
        case ScanVariable::y0:
            cfg.initial.y0 = v;
            break;
    }
    return cfg;
}

/// Minimiser of a sampled function: the grid argmin, refined by the vertex
/// of the parabola through it and its neighbours when it is interior.
struct Argmin {
    std::size_t index = 0;
    double grid_value = 0.0;
    double refined = 0.0;
};

inline Argmin argmin_sampled(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.empty() || x.size() != y.size()) {
        throw std::invalid_argument("argmin_sampled: bad input");
    }
    Argmin a;
    for (std::size_t i = 1; i < y.size(); ++i) {
        if (y[i] < y[a.index]) a.index = i;
    }
    a.grid_value = x[a.index];
    a.refined = a.grid_value;
    if (a.index > 0 && a.index + 1 < x.size()) {
        const double x0 = x[a.index - 1], x1 = x[a.index], x2 = x[a.index + 1];
        const double y0 = y[a.index - 1], y1 = y[a.index], y2 = y[a.index + 1];
        const double den = (x0 - x1) * (x0 - x2) * (x1 - x2);
        const double aa = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / den;
        const double bb = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / den;
        if (aa > 0.0) {
            a.refined = std::clamp(-bb / (2.0 * aa), x0, x2);
        }
    }
    return a;
}

struct ScanResult {
    ScanSpec spec;
    std::vector<CellResult> cells;
    std::optional<Argmin> sigma_argmin;  ///< of mean total_bps, sigma scans only
};

inline ScanResult run_scan(const RunConfig& cfg, const ScanSpec& spec) {
    ScanResult r;
    r.spec = spec;
    for (double v : spec.values) {
        CellResult c = run_cell(with_scan_value(cfg, spec.variable, v));
        c.value = v;
        c.paths.clear();  // keep memory flat across long scans
        c.paths.shrink_to_fit();
        r.cells.push_back(std::move(c));
    }
    if (spec.variable == ScanVariable::sigma) {
        std::vector<double> y;
        for (const auto& c : r.cells) y.push_back(c.summary.field("total_bps").mean);
        r.sigma_argmin = argmin_sampled(spec.values, y);
    }
    return r;
}

/// One (theta_true, theta_hat) cell of the misspecification matrix.
struct MisspecCell {
    double theta_true = 0.0;
    double theta_hat = 0.0;
    double mean_bps = 0.0;     ///< mean total cost per in-flow, bps
    double se_bps = 0.0;
    double diff_vs_diag = 0.0;  ///< mean_bps - diagonal mean_bps
    double se_diff = 0.0;       ///< paired when random numbers are common
    double internalization = 0.0;
    double impact_bps = 0.0;
    double mean_cost = 0.0;  ///< absolute impact + spread
};

struct MisspecRow {
    double theta_true = 0.0;
    MisspecCell diagonal;
    std::vector<MisspecCell> cells;  ///< one per theta_hat
    bool diagonal_is_min = true;     ///< no cell below the diagonal by > 2 se_diff
};

struct MisspecResult {
    std::vector<MisspecRow> rows;
    std::vector<double> sigma_hat;
    bool sigma_trajectories_identical = true;
    std::size_t sigma_paths_checked = 0;
};

namespace detail {

inline PolicyCoefficients policy_for_theta(const RunConfig& cfg, double theta_hat) {
    InflowParams assumed = cfg.inflow;
    assumed.theta = Curve{theta_hat};
    return feedback_coefficients(solve_riccati(cfg.market, assumed, cfg.sim.n_steps), cfg.market);
}

inline bool same_trajectory(const PathResult& a, const PathResult& b) {
    return a.j0 == b.j0 && a.jt == b.jt && a.impact_cost == b.impact_cost &&
           a.spread_cost == b.spread_cost && a.tv_outflow == b.tv_outflow && a.t == b.t &&
           a.Z == b.Z && a.X == b.X && a.Y == b.Y && a.q == b.q;
}

}  // namespace detail

inline MisspecResult run_misspec(const RunConfig& base, const MisspecSpec& spec) {
    MisspecResult out;
    const std::size_t n = effective_paths(base);
    std::uint64_t cell_seed = base.sim.seed;
    auto next_seed = [&]() {
        // fresh streams per cell unless random numbers are shared
        return spec.common_random_numbers ? base.sim.seed : cell_seed++;
    };
    auto per_path_bps = [](const std::vector<PathResult>& ps) {
        std::vector<double> v;
        v.reserve(ps.size());
        for (const auto& p : ps) {
            v.push_back(path_metrics(p).total_bps);
        }
        return v;
    };

    for (double th_true : spec.theta_true) {
        RunConfig truth = base;
        truth.inflow.theta = Curve{th_true};
        MisspecRow row;
        row.theta_true = th_true;

        auto run = [&](double th_hat, std::vector<double>& bps_out) {
            const auto paths = run_paths(detail::policy_for_theta(base, th_hat), truth, n, next_seed());
            CellResult c = summarize_cell(paths);
            bps_out = per_path_bps(c.paths);
            MisspecCell cell;
            cell.theta_true = th_true;
            cell.theta_hat = th_hat;
            cell.mean_bps = c.summary.field("total_bps").mean;
            cell.se_bps = c.summary.field("total_bps").se;
            cell.internalization = c.summary.field("internalization").mean;
            cell.impact_bps = c.summary.field("impact_bps").mean;
            cell.mean_cost = c.mean_cost;
            return cell;
        };

        std::vector<double> diag_bps;
        row.diagonal = run(th_true, diag_bps);
        for (double th_hat : spec.theta_hat) {
            std::vector<double> bps;
            MisspecCell cell = run(th_hat, bps);
            cell.diff_vs_diag = cell.mean_bps - row.diagonal.mean_bps;
            if (spec.common_random_numbers) {
                std::vector<double> d(bps.size());
                for (std::size_t i = 0; i < d.size(); ++i) d[i] = bps[i] - diag_bps[i];
                cell.se_diff = summarize("diff", d).se;
            } else {
                cell.se_diff = std::hypot(cell.se_bps, row.diagonal.se_bps);
            }
            if (cell.diff_vs_diag < -2.0 * cell.se_diff) {
                row.diagonal_is_min = false;
            }
            row.cells.push_back(cell);
        }
        out.rows.push_back(std::move(row));
    }

    // The policy does not depend on sigma, so a wrong sigma must leave every
    // trade unchanged.
    out.sigma_hat = spec.sigma_hat;
    if (!spec.sigma_hat.empty()) {
        const TimeGrid grid{base.market.horizon, base.sim.n_steps};
        const auto correct = feedback_coefficients(
            solve_riccati(base.market, base.inflow, base.sim.n_steps), base.market);
        const Simulator ref{correct, base.market, base.inflow, base.initial, grid};
        const std::size_t m = std::min(spec.sigma_check_paths, base.sim.n_paths);
        for (double s_hat : spec.sigma_hat) {
            InflowParams assumed = base.inflow;
            assumed.sigma = Curve{s_hat};
            const auto wrong = feedback_coefficients(
                solve_riccati(base.market, assumed, base.sim.n_steps), base.market);
            const Simulator alt{wrong, base.market, base.inflow, base.initial, grid};
            for (std::size_t i = 0; i < m; ++i) {
                if (!detail::same_trajectory(ref.run(base.sim.seed, i, true),
                                             alt.run(base.sim.seed, i, true))) {
                    out.sigma_trajectories_identical = false;
                }
            }
            out.sigma_paths_checked += m;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Output writers and commands

namespace detail {

inline json field_json(const FieldSummary& f) {
    json h = json::array();
    for (auto c : f.histogram) h.push_back(c);
    return {{"mean", f.mean},
            {"std", f.std},
            {"se", f.se},
            {"min", f.min},
            {"max", f.max},
            {"q05", f.quantiles[0]},
            {"q25", f.quantiles[1]},
            {"q50", f.quantiles[2]},
            {"q75", f.quantiles[3]},
            {"q95", f.quantiles[4]},
            {"histogram", h}};
}

inline json aggregate_json(const AggregateReport& a) {
    json j = {{"n_paths", a.n_paths}, {"n_undefined", a.n_undefined}};
    json fields = json::object();
    for (const auto& f : a.fields) fields[f.name] = field_json(f);
    j["metrics"] = fields;
    return j;
}

inline json report_json(const ValidationReport& r) {
    auto list = [](const std::vector<Violation>& vs) {
        json a = json::array();
        for (const auto& v : vs) {
            a.push_back({{"condition", v.condition}, {"time", v.time}, {"value", v.value}});
        }
        return a;
    };
    return {{"ok", r.ok}, {"violations", list(r.violations)}, {"warnings", list(r.warnings)}};
}

inline void write_paths_csv(const std::vector<PathResult>& paths,
                            const std::vector<MetricsReport>& metrics, const std::string& file) {
    std::vector<std::string> header{"path_id",     "j0",          "jt",        "continuous_volume",
                                    "impact_cost", "spread_cost", "tv_inflow", "tv_outflow",
                                    "qv_inflow",   "z_terminal",  "net_outflow", "outflow_monotone"};
    for (const auto& f : metric_fields()) header.emplace_back(f.name);
    io::CsvWriter w(file, header);
    for (std::size_t i = 0; i < paths.size(); ++i) {
        const auto& p = paths[i];
        std::vector<std::string> cells{std::to_string(p.path_id), io::fmt(p.j0), io::fmt(p.jt),
                                       io::fmt(p.continuous_volume), io::fmt(p.impact_cost),
                                       io::fmt(p.spread_cost), io::fmt(p.tv_inflow),
                                       io::fmt(p.tv_outflow), io::fmt(p.qv_inflow),
                                       io::fmt(p.z_terminal), io::fmt(p.net_outflow),
                                       p.outflow_monotone ? "1" : "0"};
        for (const auto& f : metric_fields()) cells.push_back(io::fmt(metrics[i].*f.member));
        w.raw_row(cells);
    }
}

inline void write_trajectories_csv(const std::vector<PathResult>& paths, const std::string& file) {
    io::CsvWriter w(file, {"path_id", "t", "Z", "X", "Y", "q"});
    for (const auto& p : paths) {
        for (std::size_t k = 0; k < p.t.size(); ++k) {
            w.raw_row({std::to_string(p.path_id), io::fmt(p.t[k]), io::fmt(p.Z[k]), io::fmt(p.X[k]),
                       io::fmt(p.Y[k]), io::fmt(p.q[k])});
        }
    }
}

inline void prepare_out_dir(const std::string& dir, const RunConfig& cfg) {
    std::filesystem::create_directories(dir);
    io::write_json(cfg.snapshot(), dir + "/config.json");
}

}  // namespace detail

/// Validates the market curves. Returns the process exit code.
inline int cmd_validate(const RunConfig& cfg, const std::string& out_dir, std::ostream& log) {
    const ValidationReport r = validate(cfg.market);
    detail::prepare_out_dir(out_dir, cfg);
    io::write_json({{"command", "validate"}, {"validation", detail::report_json(r)}},
                   out_dir + "/summary.json");
    for (const auto& v : r.violations) {
        log << "violation: " << v.condition << " at t=" << io::fmt(v.time)
            << " (value " << io::fmt(v.value) << ")\n";
    }
    for (const auto& v : r.warnings) {
        log << "warning: " << v.condition << " at t=" << io::fmt(v.time) << " (value "
            << io::fmt(v.value) << "); the strategy may buy and sell within the day\n";
    }
    if (r.ok) {
        log << "ok\n";
    }
    return r.ok ? 0 : 1;
}

inline int cmd_coeffs(const RunConfig& cfg, const std::string& out_dir, std::ostream& log) {
    detail::prepare_out_dir(out_dir, cfg);
    const Model m = build_model(cfg);
    write_riccati_csv(m.riccati, out_dir + "/riccati.csv");
    write_policy_csv(m.policy, out_dir + "/policy.csv");

    const auto& p = m.policy;
    json s = {{"command", "coeffs"},
              {"validation", detail::report_json(validate(cfg.market))},
              {"n_steps", cfg.sim.n_steps},
              {"eta_open", p.eta_open},
              {"r", p.r},
              {"f_open", p.f_open},
              {"g_open", p.g_open},
              {"h_open", p.h_open},
              {"j0_per_unit_y", (p.g_open + p.eta_open) / p.r},
              {"j0_per_unit_z", (-p.f_open + p.h_open) / p.r},
              {"j0", m.j0},
              {"k0", m.k0},
              {"expected_cost", m.expected_cost}};
    const auto inv = riccati_invariant_violations(m.riccati, cfg.market);
    s["riccati_invariant_violations"] = inv.size();

    const bool constant = cfg.market.beta.is_constant() && cfg.market.lambda.is_constant() &&
                          cfg.market.epsilon.is_constant();
    if (constant) {
        const auto cf = closed_form(cfg.market.beta(0.0), cfg.market.lambda(0.0),
                                    cfg.market.epsilon(0.0), cfg.inflow.theta, m.policy.grid);
        write_closed_form_csv(cf, out_dir + "/closed_form.csv");
        const CrossCheck cc = cross_check(cf, m.policy);
        s["closed_form"] = {{"eps_tilde", cf.eps_tilde},
                            {"kappa", cf.kappa},
                            {"cross_check", {{"f", cc.f}, {"g", cc.g}, {"h", cc.h}, {"max", cc.max()}}},
                            {"within_1e-6", cc.max() <= 1e-6}};
        log << "closed-form cross-check: max relative error " << io::fmt(cc.max()) << "\n";
    } else {
        s["closed_form"] = "omitted: liquidity parameters are time-dependent";
        log << "note: closed form omitted (time-dependent liquidity)\n";
    }
    io::write_json(s, out_dir + "/summary.json");
    log << "J0 = " << io::fmt(m.j0) << ", expected cost = " << io::fmt(m.expected_cost) << "\n";
    return 0;
}

inline json cell_json(const CellResult& c) {
    return {{"n_paths", c.n_paths},
            {"expected_cost", c.expected_cost},
            {"mean_cost", c.mean_cost},
            {"se_cost", c.se_cost},
            {"j0", c.j0},
            {"summary", detail::aggregate_json(c.summary)}};
}

inline int cmd_simulate(const RunConfig& cfg, const std::string& out_dir, std::ostream& log) {
    detail::prepare_out_dir(out_dir, cfg);
    const CellResult c = run_cell(cfg);
    detail::write_paths_csv(c.paths, c.metrics, out_dir + "/paths.csv");

    const Model m = build_model(cfg);
    const TimeGrid grid{cfg.market.horizon, cfg.sim.n_steps};
    const Simulator sim{m.policy, cfg.market, cfg.inflow, cfg.initial, grid};
    std::vector<PathResult> kept;
    for (std::size_t id : cfg.sim.trajectory_paths) {
        kept.push_back(sim.run(cfg.sim.seed, id, true));
    }
    detail::write_trajectories_csv(kept, out_dir + "/trajectories.csv");

    json s = cell_json(c);
    s["command"] = "simulate";
    io::write_json(s, out_dir + "/summary.json");
    log << "paths " << c.n_paths << ": mean cost " << io::fmt(c.mean_cost) << " (se "
        << io::fmt(c.se_cost) << "), expected " << io::fmt(c.expected_cost) << "\n";
    return 0;
}

inline int cmd_scan(const RunConfig& cfg, const std::string& out_dir, std::ostream& log) {
    if (!cfg.scan) {
        throw ConfigError("scan command needs a 'scan' section");
    }
    detail::prepare_out_dir(out_dir, cfg);
    const ScanResult r = run_scan(cfg, *cfg.scan);

    std::vector<std::string> header{to_string(r.spec.variable), "n_paths", "expected_cost",
                                    "mean_cost", "se_cost", "j0"};
    for (const auto& f : metric_fields()) {
        header.push_back(std::string(f.name));
        header.push_back(std::string(f.name) + "_se");
    }
    io::CsvWriter w(out_dir + "/scan.csv", header);
    json rows = json::array();
    for (const auto& c : r.cells) {
        std::vector<double> v{c.value, static_cast<double>(c.n_paths), c.expected_cost,
                              c.mean_cost, c.se_cost, c.j0};
        for (const auto& f : c.summary.fields) {
            v.push_back(f.mean);
            v.push_back(f.se);
        }
        w.row(v);
        json cj = cell_json(c);
        cj["value"] = c.value;
        rows.push_back(cj);
        log << to_string(r.spec.variable) << "=" << io::fmt(c.value) << ": total "
            << io::fmt(c.summary.field("total_bps").mean) << " bps, internalization "
            << io::fmt(c.summary.field("internalization").mean) << "\n";
    }
    json s = {{"command", "scan"}, {"variable", to_string(r.spec.variable)}, {"rows", rows}};
    if (r.sigma_argmin) {
        const double z = std::fabs(cfg.inflow.z0);
        const auto& a = *r.sigma_argmin;
        s["sigma_argmin"] = {
            {"sigma", a.grid_value},
            {"sigma_refined", a.refined},
            {"sigma_over_z", z > 0 ? a.grid_value / z : std::numeric_limits<double>::infinity()},
            {"sigma_over_z_refined", z > 0 ? a.refined / z : std::numeric_limits<double>::infinity()},
            {"internalization_at_argmin",
             r.cells[a.index].summary.field("internalization").mean}};
        log << "argmin sigma/z = " << io::fmt(a.grid_value / z) << " (refined "
            << io::fmt(a.refined / z) << ")\n";
    }
    io::write_json(s, out_dir + "/summary.json");
    return 0;
}

inline int cmd_misspec(const RunConfig& cfg, const std::string& out_dir, std::ostream& log) {
    if (!cfg.misspec) {
        throw ConfigError("misspec command needs a 'misspec' section");
    }
    detail::prepare_out_dir(out_dir, cfg);
    const MisspecResult r = run_misspec(cfg, *cfg.misspec);

    io::CsvWriter w(out_dir + "/misspec.csv",
                    {"theta_true", "theta_hat", "mean_bps", "se_bps", "diff_vs_diag", "se_diff",
                     "internalization", "impact_bps", "mean_cost"});
    json rows = json::array();
    for (const auto& row : r.rows) {
        json cells = json::array();
        for (const auto& c : row.cells) {
            w.row({c.theta_true, c.theta_hat, c.mean_bps, c.se_bps, c.diff_vs_diag, c.se_diff,
                   c.internalization, c.impact_bps, c.mean_cost});
            cells.push_back({{"theta_hat", c.theta_hat},
                             {"mean_bps", c.mean_bps},
                             {"se_bps", c.se_bps},
                             {"ratio_to_diagonal", c.mean_bps / row.diagonal.mean_bps},
                             {"diff_vs_diag", c.diff_vs_diag},
                             {"se_diff", c.se_diff},
                             {"internalization", c.internalization},
                             {"impact_bps", c.impact_bps}});
        }
        rows.push_back({{"theta_true", row.theta_true},
                        {"diagonal_bps", row.diagonal.mean_bps},
                        {"diagonal_se", row.diagonal.se_bps},
                        {"diagonal_is_min", row.diagonal_is_min},
                        {"cells", cells}});
        log << "theta*=" << io::fmt(row.theta_true) << ": diagonal "
            << io::fmt(row.diagonal.mean_bps) << " bps, row minimum "
            << (row.diagonal_is_min ? "yes" : "NO") << "\n";
    }
    json s = {{"command", "misspec"},
              {"common_random_numbers", cfg.misspec->common_random_numbers},
              {"rows", rows}};
    if (!r.sigma_hat.empty()) {
        s["sigma_misspec"] = {{"sigma_hat", r.sigma_hat},
                              {"paths_checked", r.sigma_paths_checked},
                              {"trajectories_identical", r.sigma_trajectories_identical}};
        log << "sigma misspecification: trajectories "
            << (r.sigma_trajectories_identical ? "identical" : "DIFFER") << "\n";
    }
    io::write_json(s, out_dir + "/summary.json");
    return 0;
}

}  // namespace unwind
