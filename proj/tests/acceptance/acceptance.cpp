// Acceptance checks. Prints one PASS/FAIL line per criterion (detail lines
// are indented) and exits nonzero if any criterion fails.

#include "unwind/unwind.hpp"

#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

using namespace unwind;

namespace {

// ---- pinned tolerances ------------------------------------------------------
constexpr double kCrossCheckTol = 1e-6;
constexpr double kCrossCheckSeconds = 1.0;

constexpr double kEpsBpsTol = 0.2;
constexpr double kEpsAdvTol = 0.1;
constexpr double kEpsSeconds = 5.0;

constexpr double kOwEpsilon = 1e-6;
constexpr std::size_t kOwSteps = 20000;  // stiff: kappa ~ 1.8e3
constexpr double kOwBpsTol = 0.5;
constexpr double kOwBlockTol = 0.05;  // ADV%

constexpr std::size_t kAcPaths = 100000;
constexpr double kAcInternalizationTol = 2.0;  // pp
constexpr double kAcCostRelTol = 0.10;
constexpr double kAcClosingTol = 2.0;  // pp
constexpr double kAcTvTol = 2.0;       // ADV%
constexpr double kAcSeconds = 120.0;

constexpr std::size_t kVolPaths = 20000;
constexpr std::size_t kVolSteps = 500;
constexpr double kVolArgminTol = 10.0;  // pp of sigma/z
constexpr double kVolInternalizationTol = 3.0;

constexpr std::size_t kMisPaths = 20000;
constexpr double kMisRatio = 2.0;
constexpr double kMisSe = 2.0;

constexpr int kPropRiccatiSets = 50;
constexpr int kPropThetaPairs = 20;
constexpr std::size_t kPropPerturbPaths = 10000;
constexpr double kPropPerturbSe = 2.0;
constexpr double kPropDiffusionDrift = 0.10;
constexpr std::size_t kPropDiffusionPaths = 20000;

constexpr std::uint64_t kSeed = 20240101;

// ---- reporting ----------------------------------------------------------------
int g_failed = 0;

void note(const char* fmt, ...) __attribute__((format(printf, 1, 2)));
void note(const char* fmt, ...) {
    std::printf("    ");
    va_list ap;
    va_start(ap, fmt);
    std::vprintf(fmt, ap);
    va_end(ap);
    std::printf("\n");
}

void verdict(int id, const char* name, bool ok) {
    std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", id, name);
    std::fflush(stdout);
    if (!ok) ++g_failed;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool within(double value, double target, double tol) { return std::fabs(value - target) <= tol; }

RunConfig defaults() { return config_from_json(json::object()); }

RunConfig with_theta(RunConfig c, double theta) {
    c.inflow.theta = Curve{theta};
    return c;
}

RunConfig deterministic(double epsilon, std::size_t n_steps) {
    RunConfig c = defaults();
    c.market.epsilon = Curve{epsilon};
    c.inflow.sigma = Curve{0.0};
    c.inflow.theta = Curve{0.0};
    c.sim.n_steps = n_steps;
    return c;
}

// ---- criteria -------------------------------------------------------------------

void criterion_1() {
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    const auto m = MarketCurves::constant(8.0, 0.2, 0.01);
    for (double theta : {-1.0, 0.0, 1.0}) {
        InflowParams in;
        in.theta = Curve{theta};
        const auto pol = feedback_coefficients(solve_riccati(m, in, 2000), m);
        const auto cf = closed_form(8.0, 0.2, 0.01, in.theta, pol.grid);
        const auto cc = cross_check(cf, pol);
        note("theta=%+.1f  max rel err f=%.2e g=%.2e h=%.2e", theta, cc.f, cc.g, cc.h);
        ok = ok && cc.max() <= kCrossCheckTol;
    }
    const double secs = seconds_since(t0);
    note("runtime %.3f s (limit %.1f s)", secs, kCrossCheckSeconds);
    verdict(1, "closed form vs Riccati feedback, sup relative error <= 1e-6", ok && secs < kCrossCheckSeconds);
}

void criterion_2() {
    const auto t0 = std::chrono::steady_clock::now();
    const double eps[] = {1e-4, 1e-3, 1e-2, 1e-1};
    const double spread_ref[] = {0.0, 0.3, 2.4, 7.5};
    const double impact_ref[] = {21.1, 21.3, 22.8, 36.9};
    const double closing_ref[] = {1.0, 1.1, 1.6, 3.2};
    bool ok = true;
    for (int i = 0; i < 4; ++i) {
        const CellResult c = run_cell(deterministic(eps[i], 2000));
        const double spread = c.summary.field("spread_bps").mean;
        const double impact = c.summary.field("impact_bps").mean;
        const double closing = c.summary.field("closing_adv").mean;
        const bool row_ok = within(spread, spread_ref[i], kEpsBpsTol) &&
                            within(impact, impact_ref[i], kEpsBpsTol) &&
                            within(closing, closing_ref[i], kEpsAdvTol);
        note("eps=%.0e  spread %.2f (ref %.1f)  impact %.2f (ref %.1f)  closing %.3f%% (ref %.1f)%s",
               eps[i], spread, spread_ref[i], impact, impact_ref[i], closing, closing_ref[i],
               row_ok ? "" : "  <-- outside tolerance");
        ok = ok && row_ok;
    }
    const double secs = seconds_since(t0);
    note("runtime %.2f s (limit %.0f s)", secs, kEpsSeconds);
    verdict(2, "deterministic epsilon-sensitivity table", ok && secs < kEpsSeconds);
}

void criterion_3() {
    const RunConfig c = deterministic(kOwEpsilon, kOwSteps);
    const CellResult r = run_cell(c);
    const double bps = r.summary.field("total_bps").mean;
    const PathResult p = run_paths(build_model(c).policy, c, 1, kSeed).front();
    const double oracle_bps = 0.2 * 0.1 / (8.0 + 2.0) * 1e4;
    const double oracle_block = 100.0 * 0.1 / (8.0 + 2.0);
    const double j0 = 100.0 * p.j0;
    const double jt = 100.0 * p.jt;
    note("cost %.3f bps (oracle %.1f)  J0 %.4f%%  JT %.4f%% (oracle %.2f%%)", bps, oracle_bps, j0,
           jt, oracle_block);
    verdict(3, "Obizhaeva-Wang limit at epsilon = 1e-6",
            within(bps, oracle_bps, kOwBpsTol) && within(j0, oracle_block, kOwBlockTol) &&
                within(jt, oracle_block, kOwBlockTol));
}

void criterion_4() {
    const auto t0 = std::chrono::steady_clock::now();
    const double thetas[] = {-1.0, 0.0, 1.0};
    const double int_ref[] = {51, 68, 84};
    const double spread_ref[] = {4.9, 1.7, 0.5};
    const double impact_ref[] = {42.6, 14.5, 4.8};
    const double closing_ref[] = {17, 21, 27};
    const double tv_ref[] = {61, 46, 52};
    bool ok = true;
    for (int i = 0; i < 3; ++i) {
        RunConfig c = with_theta(defaults(), thetas[i]);
        c.sim.n_paths = kAcPaths;
        c.sim.seed = kSeed;
        const CellResult r = run_cell(c);
        const auto& s = r.summary;
        const double in = 100.0 * s.field("internalization").mean;
        const double sp = s.field("spread_bps").mean;
        const double im = s.field("impact_bps").mean;
        const double cl = 100.0 * s.field("closing_frac").mean;
        const double tv = s.field("inflow_tv").mean;
        const bool b_in = within(in, int_ref[i], kAcInternalizationTol);
        const bool b_sp = within(sp, spread_ref[i], kAcCostRelTol * spread_ref[i]);
        const bool b_im = within(im, impact_ref[i], kAcCostRelTol * impact_ref[i]);
        const bool b_cl = within(cl, closing_ref[i], kAcClosingTol);
        const bool b_tv = within(tv, tv_ref[i], kAcTvTol);
        auto mark = [](bool b) { return b ? "" : "*"; };
        note("theta=%+.0f  internalization %.1f%s (%.0f)  spread %.2f%s (%.1f)  impact %.2f%s (%.1f)  "
               "closing %.1f%s (%.0f)  TV in %.1f%s (%.0f)",
               thetas[i], in, mark(b_in), int_ref[i], sp, mark(b_sp), spread_ref[i], im, mark(b_im),
               impact_ref[i], cl, mark(b_cl), closing_ref[i], tv, mark(b_tv), tv_ref[i]);
        ok = ok && b_in && b_sp && b_im && b_cl && b_tv;
    }
    const double secs = seconds_since(t0);
    note("(* = outside tolerance)  runtime %.1f s (limit %.0f s)", secs, kAcSeconds);
    verdict(4, "autocorrelation table, 100k paths", ok && secs < kAcSeconds);
}

void criterion_5() {
    const double thetas[] = {-1.0, -0.5, 0.0, 0.5, 1.0};
    const double argmin_ref[] = {99, 79, 55, 35, 17};
    const double int_ref[] = {55, 65, 72, 77, 82};
    const double z = 0.03;
    ScanSpec spec;
    spec.variable = ScanVariable::sigma;
    for (double r = 0.025; r <= 1.6 + 1e-9; r += 0.025) spec.values.push_back(r * z);
    bool ok = true;
    for (int i = 0; i < 5; ++i) {
        RunConfig c = with_theta(defaults(), thetas[i]);
        c.inflow.z0 = z;
        c.initial.x0 = -z;
        c.sim.n_paths = kVolPaths;
        c.sim.n_steps = kVolSteps;
        c.sim.seed = kSeed;
        const ScanResult r = run_scan(c, spec);
        const Argmin& a = *r.sigma_argmin;
        const double ratio = 100.0 * a.refined / z;
        const double intern = 100.0 * r.cells[a.index].summary.field("internalization").mean;
        const bool b_a = within(ratio, argmin_ref[i], kVolArgminTol);
        const bool b_i = within(intern, int_ref[i], kVolInternalizationTol);
        note("theta=%+.1f  argmin sigma/z %.1f%%%s (ref %.0f)  internalization %.1f%%%s (ref %.0f)  "
               "min cost %.2f bps",
               thetas[i], ratio, b_a ? "" : "*", argmin_ref[i], intern, b_i ? "" : "*", int_ref[i],
               r.cells[a.index].summary.field("total_bps").mean);
        ok = ok && b_a && b_i;
    }
    note("(* = outside tolerance; %zu paths x %zu steps per cell, common random numbers)", kVolPaths,
           kVolSteps);
    verdict(5, "volatility scan at z = 3% ADV", ok);
}

void criterion_6() {
    RunConfig c = with_theta(defaults(), -1.0);
    c.sim.n_paths = kMisPaths;
    c.sim.seed = kSeed;
    MisspecSpec spec;
    spec.theta_true = {-1.0};
    spec.theta_hat = {-2.0, -1.5, -1.0, -0.5, 0.0};
    spec.sigma_hat = {0.05, 0.2};
    spec.sigma_check_paths = 500;
    const MisspecResult r = run_misspec(c, spec);
    const auto& row = r.rows.front();
    double under = 0.0, over = 0.0;
    for (const auto& cell : row.cells) {
        const double ratio = cell.mean_bps / row.diagonal.mean_bps;
        // the ratio of mean absolute costs is shown for reference only
        note("theta_hat=%+.1f  cost %.2f bps  ratio to diagonal %.2f  diff %.2f (se %.3f)  "
             "[abs-cost ratio %.2f]",
             cell.theta_hat, cell.mean_bps, ratio, cell.diff_vs_diag, cell.se_diff,
             cell.mean_cost / row.diagonal.mean_cost);
        if (cell.theta_hat == -2.0) under = ratio;
        if (cell.theta_hat == 0.0) over = ratio;
    }
    bool diag_min = true;
    for (const auto& cell : row.cells) {
        diag_min = diag_min && cell.diff_vs_diag >= -kMisSe * cell.se_diff;
    }
    note("100%% error: underestimate (theta_hat=-2) x%.2f, overestimate (theta_hat=0) x%.2f", under, over);
    note("diagonal is row minimum within %.0f se: %s; sigma-misspecified trajectories identical "
           "(%zu paths): %s",
           kMisSe, diag_min ? "yes" : "no", r.sigma_paths_checked,
           r.sigma_trajectories_identical ? "yes" : "no");
    verdict(6, "misspecification costs",
            std::max(under, over) > kMisRatio && diag_min && r.sigma_trajectories_identical);
}

// --- criterion 7 sub-suites --------------------------------------------------------

MarketCurves random_market(std::mt19937_64& rng, bool strict) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double beta = 1.0 + 20.0 * u(rng);
    const double lam0 = 0.05 + 0.5 * u(rng);
    const double cap = strict ? std::min(beta, 4.0) : std::min(1.9 * beta, 4.0);
    const double slope = (2.0 * u(rng) - 1.0) * cap;
    const double curvature = 0.3 * (2.0 * u(rng) - 1.0);
    const Curve lam = Curve::sampled(
        [&](double t) { return lam0 * std::exp(slope * t + curvature * std::sin(6.0 * t)); }, 41, 1.0);
    const Curve eps = Curve::sampled([&, e = 2e-3 + 0.1 * u(rng)](double t) { return e * (1.0 + 0.5 * t); },
                                     11, 1.0);
    return MarketCurves{Curve{beta}, lam, lam0 * (0.2 + 0.8 * u(rng)), eps};
}

bool prop_riccati() {
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int bad = 0, tried = 0;
    while (tried < kPropRiccatiSets) {
        const MarketCurves m = random_market(rng, u(rng) < 0.7);
        if (!validate(m).ok) continue;
        ++tried;
        InflowParams in;
        in.theta = Curve::sampled([a = 4.0 * (u(rng) - 0.5), b = u(rng)](double t) { return a + b * t; }, 5, 1.0);
        in.sigma = Curve{0.2 * u(rng)};
        const auto s = solve_riccati(m, in, 2000);
        auto v = riccati_invariant_violations(s, m);
        const auto pol = feedback_coefficients(s, m);
        for (std::size_t k = 0; k + 1 < pol.grid.size(); ++k) {
            if (!(pol.g[k] < 0.0)) v.push_back("g_nonnegative");
            if (strict_resilience(m) && !(pol.f[k] < 0.0)) v.push_back("f_nonnegative");
        }
        if (!v.empty()) {
            ++bad;
            note("  riccati set %d: %s", tried, v.front().c_str());
        }
    }
    note("Riccati PSD/sign invariants: %d of %d random sets clean", kPropRiccatiSets - bad, kPropRiccatiSets);
    return bad == 0;
}

bool prop_theta_monotone() {
    std::mt19937_64 rng(202);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int bad = 0, tried = 0;
    while (tried < kPropThetaPairs) {
        const MarketCurves m = random_market(rng, true);
        if (!validate(m).ok || !strict_resilience(m)) continue;
        ++tried;
        const double a = 4.0 * (u(rng) - 0.5);
        const double shift = 2.0 * u(rng);
        InflowParams lo, hi;
        lo.theta = Curve::sampled([&](double t) { return a + std::sin(3.0 * t); }, 9, 1.0);
        hi.theta = Curve::sampled([&](double t) { return a + shift * (0.5 + t) + std::sin(3.0 * t); }, 9, 1.0);
        const auto plo = feedback_coefficients(solve_riccati(m, lo, 2000), m);
        const auto phi = feedback_coefficients(solve_riccati(m, hi, 2000), m);
        for (std::size_t k = 0; k < plo.grid.size(); ++k) {
            if (plo.h[k] < phi.h[k] - 1e-9 * std::max(1.0, std::fabs(plo.h[k]))) {
                ++bad;
                note("  theta pair %d violates at t=%.4f", tried, plo.grid.at(k));
                break;
            }
        }
    }
    note("h monotone in theta: %d of %d random pairs", kPropThetaPairs - bad, kPropThetaPairs);
    return bad == 0;
}

bool prop_liquidation_and_determinism() {
    bool ok = true;
    std::size_t checked = 0;
    double worst = 0.0;
    for (double theta : {-1.0, 0.0, 1.0}) {
        for (auto kind : {DriverSpec::Kind::gaussian_shocks, DriverSpec::Kind::brownian}) {
            RunConfig c = with_theta(defaults(), theta);
            c.inflow.driver.kind = kind;
            const Model m = build_model(c);
            const Simulator sim{m.policy, c.market, c.inflow, c.initial, m.policy.grid};
            for (std::uint64_t i = 0; i < 2000; ++i) {
                const PathResult p = sim.run(kSeed, i, true);
                // inventory after the close and the out-flow/in-flow balance
                const double post_close = p.X.back() + p.jt;
                const double balance = p.j0 + p.continuous_volume + p.jt - p.Z.back();
                worst = std::max({worst, std::fabs(post_close), std::fabs(balance)});
                ++checked;
            }
        }
    }
    ok = worst <= 1e-12;
    note("liquidation identity on %zu paths: worst residual %.1e", checked, worst);

    RunConfig c = with_theta(defaults(), -1.0);
    const Model m = build_model(c);
    const Simulator sim{m.policy, c.market, c.inflow, c.initial, m.policy.grid};
    const auto one = sim.run_batch(2000, kSeed, 1);
    const auto many = sim.run_batch(2000, kSeed, 8);
    bool same = true;
    for (std::size_t i = 0; i < one.size(); ++i) {
        same = same && one[i].impact_cost == many[i].impact_cost &&
               one[i].spread_cost == many[i].spread_cost && one[i].jt == many[i].jt &&
               one[i].tv_outflow == many[i].tv_outflow;
    }
    note("1 vs 8 threads, 2000 paths: %s", same ? "bit-identical" : "DIFFERENT");
    return ok && same;
}

bool prop_perturbation() {
    bool ok = true;
    for (double theta : {-1.0, 0.0, 1.0}) {
        RunConfig c = with_theta(defaults(), theta);
        const Model m = build_model(c);
        const auto base = run_paths(m.policy, c, kPropPerturbPaths, kSeed);
        for (double factor : {0.95, 1.05}) {
            const auto alt = run_paths(m.policy.scaled(factor), c, kPropPerturbPaths, kSeed);
            std::vector<double> diff(base.size());
            for (std::size_t i = 0; i < diff.size(); ++i) {
                diff[i] = (alt[i].impact_cost + alt[i].spread_cost) -
                          (base[i].impact_cost + base[i].spread_cost);
            }
            const auto s = summarize("diff", diff);
            const bool dominated = s.mean >= -kPropPerturbSe * s.se;
            note("theta=%+.0f scale %.2f: cost change %+.3e (se %.1e)%s", theta, factor, s.mean, s.se,
                   dominated ? "" : "  <-- cheaper than optimum");
            ok = ok && dominated;
        }
    }
    return ok;
}

bool prop_diffusion_limit() {
    std::vector<double> impact, spread, regret;
    for (std::size_t n : {20u, 100u, 1000u}) {
        RunConfig c = defaults();
        c.inflow.driver.n_shocks = n;
        c.sim.n_paths = kPropDiffusionPaths;
        c.sim.seed = kSeed;
        const CellResult r = run_cell(c);
        double im = 0.0, sp = 0.0;
        for (const auto& p : r.paths) {
            im += p.impact_cost;
            sp += p.spread_cost;
        }
        impact.push_back(im / r.paths.size());
        spread.push_back(sp / r.paths.size());
        regret.push_back(r.summary.field("regret").mean);
        note("n_shocks=%4zu  impact %.4e  spread %.4e  regret %.4f  internalization %.3f", n,
               impact.back(), spread.back(), regret.back(), r.summary.field("internalization").mean);
    }
    bool ok = true;
    for (const auto* v : {&impact, &spread, &regret}) {
        for (std::size_t i = 1; i < v->size(); ++i) {
            ok = ok && std::fabs((*v)[i] / (*v)[0] - 1.0) < kPropDiffusionDrift;
        }
    }
    return ok;
}

void criterion_7() {
    const bool a = prop_riccati();
    const bool b = prop_theta_monotone();
    const bool c = prop_liquidation_and_determinism();
    const bool d = prop_perturbation();
    const bool e = prop_diffusion_limit();
    note("riccati %s, theta-monotone %s, liquidation/determinism %s, perturbation %s, diffusion %s",
           a ? "ok" : "FAIL", b ? "ok" : "FAIL", c ? "ok" : "FAIL", d ? "ok" : "FAIL", e ? "ok" : "FAIL");
    verdict(7, "property suites", a && b && c && d && e);
}

}  // namespace

int main() {
    const std::vector<std::function<void()>> criteria{criterion_1, criterion_2, criterion_3, criterion_4,
                                                      criterion_5, criterion_6, criterion_7};
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        try {
            criteria[i]();
        } catch (const std::exception& e) {
            note("exception: %s", e.what());
            verdict(static_cast<int>(i + 1), "raised an exception", false);
        }
    }
    std::printf("%d of %zu criteria failed\n", g_failed, criteria.size());
    return g_failed == 0 ? 0 : 1;
}
