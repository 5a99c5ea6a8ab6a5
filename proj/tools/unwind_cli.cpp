// Command-line front end: validate, coeffs, simulate, scan, misspec.

#include "unwind/unwind.hpp"

#include <CLI11.hpp>

#include <exception>
#include <iostream>
#include <optional>
#include <string>

int main(int argc, char** argv) {
    CLI::App app{"Optimal unwinding of stochastic order flow under transient impact"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> paths;
    std::optional<std::size_t> steps;
    std::optional<unsigned> threads;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config file (defaults when omitted)");
        sub->add_option("--out", out_dir, "output directory")->capture_default_str();
        sub->add_option("--seed", seed, "base seed for the per-path random streams");
        sub->add_option("--paths", paths, "number of Monte Carlo paths")->check(CLI::PositiveNumber);
        sub->add_option("--steps", steps, "time steps on [0, T]")->check(CLI::Range(2, 100000000));
        sub->add_option("--threads", threads, "worker threads (0 = all cores)");
    };

    auto* validate = app.add_subcommand("validate", "check the no-arbitrage conditions");
    auto* coeffs = app.add_subcommand("coeffs", "solve the Riccati system, write f, g, h");
    auto* simulate = app.add_subcommand("simulate", "simulate the optimal strategy");
    auto* scan = app.add_subcommand("scan", "scan one parameter and tabulate metrics");
    auto* misspec = app.add_subcommand("misspec", "cost of trading with a wrong theta");
    for (auto* s : {validate, coeffs, simulate, scan, misspec}) {
        add_common(s);
    }

    CLI11_PARSE(app, argc, argv);

    try {
        unwind::RunConfig cfg = config_path.empty() ? unwind::config_from_json(unwind::json::object())
                                                    : unwind::load_config(config_path);
        if (seed) cfg.sim.seed = *seed;
        if (paths) cfg.sim.n_paths = *paths;
        if (steps) cfg.sim.n_steps = *steps;
        if (threads) cfg.sim.threads = *threads;

        if (*validate) return unwind::cmd_validate(cfg, out_dir, std::cout);

        // the solvers refuse invalid curves; report them the same way
        if (!unwind::validate(cfg.market).ok) {
            return unwind::cmd_validate(cfg, out_dir, std::cerr);
        }
        if (*coeffs) return unwind::cmd_coeffs(cfg, out_dir, std::cout);
        if (*simulate) return unwind::cmd_simulate(cfg, out_dir, std::cout);
        if (*scan) return unwind::cmd_scan(cfg, out_dir, std::cout);
        if (*misspec) return unwind::cmd_misspec(cfg, out_dir, std::cout);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
