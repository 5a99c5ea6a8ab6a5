#pragma once

#include "unwind/io.hpp"
#include "unwind/params.hpp"

#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace unwind {

using json = nlohmann::json;

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SimulationSettings {
    std::size_t n_steps = 2000;
    std::size_t n_paths = 100000;
    std::uint64_t seed = 20240101;
    unsigned threads = 0;  ///< 0 = all hardware threads
    std::vector<std::size_t> trajectory_paths{0};
};

enum class ScanVariable { theta, sigma, epsilon, n_shocks, y0 };

inline const char* to_string(ScanVariable v) {
    switch (v) {
        case ScanVariable::theta: return "theta";
        case ScanVariable::sigma: return "sigma";
        case ScanVariable::epsilon: return "epsilon";
        case ScanVariable::n_shocks: return "n_shocks";
        case ScanVariable::y0: return "y0";
    }
    return "?";
}

struct ScanSpec {
    ScanVariable variable = ScanVariable::theta;
    std::vector<double> values;
};

struct MisspecSpec {
    std::vector<double> theta_true;
    std::vector<double> theta_hat;
    bool common_random_numbers = true;
    /// Volatilities assumed by the policy in the sigma-misspecification check.
    std::vector<double> sigma_hat;
    std::size_t sigma_check_paths = 200;
};

struct RunConfig {
    MarketCurves market;
    InflowParams inflow;
    InitialState initial;
    bool x0_explicit = false;  ///< otherwise x0 follows -z0
    SimulationSettings sim;
    std::optional<ScanSpec> scan;
    std::optional<MisspecSpec> misspec;

    /// Resolved settings as JSON (written next to every run's outputs).
    json snapshot() const;
};

namespace detail {

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key) || j.at(key).is_null()) {
        return fallback;
    }
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config key '") + key + "': " + e.what());
    }
}

/// A number is a constant curve; an array is a uniform sample grid over [0, T].
inline Curve curve_from_json(const json& j, const char* key, double horizon, Curve fallback) {
    if (!j.contains(key)) {
        return fallback;
    }
    const json& v = j.at(key);
    if (v.is_number()) {
        return Curve{v.get<double>()};
    }
    if (v.is_array()) {
        std::vector<double> s;
        for (const auto& e : v) {
            if (!e.is_number()) {
                throw ConfigError(std::string("config key '") + key + "': array must hold numbers");
            }
            s.push_back(e.get<double>());
        }
        try {
            return Curve{std::move(s), horizon};
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("config key '") + key + "': " + e.what());
        }
    }
    throw ConfigError(std::string("config key '") + key + "' must be a number or an array");
}

inline json curve_to_json(const Curve& c) {
    if (c.is_constant()) {
        return c(0.0);
    }
    json a = json::array();
    const auto knots = c.knots();
    for (double t : knots) {
        a.push_back(c(t));
    }
    return a;
}

inline std::vector<double> number_list(const json& j, const char* key) {
    std::vector<double> out;
    if (!j.contains(key)) {
        return out;
    }
    if (!j.at(key).is_array()) {
        throw ConfigError(std::string("config key '") + key + "' must be an array");
    }
    for (const auto& e : j.at(key)) {
        if (!e.is_number()) {
            throw ConfigError(std::string("config key '") + key + "': array must hold numbers");
        }
        const double v = e.get<double>();
        if (!std::isfinite(v)) {
            throw ConfigError(std::string("config key '") + key + "': non-finite value");
        }
        out.push_back(v);
    }
    return out;
}

inline ScanVariable scan_variable_from(const std::string& s) {
    if (s == "theta") return ScanVariable::theta;
    if (s == "sigma") return ScanVariable::sigma;
    if (s == "epsilon") return ScanVariable::epsilon;
    if (s == "n_shocks") return ScanVariable::n_shocks;
    if (s == "y0") return ScanVariable::y0;
    throw ConfigError("unknown scan variable '" + s + "'");
}

}  // namespace detail

/// Builds a RunConfig from JSON. Missing keys keep their defaults.
inline RunConfig config_from_json(const json& root) {
    if (!root.is_object()) {
        throw ConfigError("config root must be an object");
    }
    RunConfig c;
    const json empty = json::object();
    const json& m = root.contains("market") ? root.at("market") : empty;
    const json& in = root.contains("inflow") ? root.at("inflow") : empty;
    const json& ini = root.contains("initial") ? root.at("initial") : empty;
    const json& sim = root.contains("simulation") ? root.at("simulation") : empty;

    const double T = detail::get_or(m, "horizon", 1.0);
    if (!(T > 0.0)) {
        throw ConfigError("market.horizon must be positive");
    }
    try {
        const Curve beta = detail::curve_from_json(m, "beta", T, Curve{8.0});
        const Curve lambda = detail::curve_from_json(m, "lambda", T, Curve{0.2});
        const Curve eps = detail::curve_from_json(m, "epsilon", T, Curve{0.01});
        if (lambda.min_value() <= 0.0) {
            throw ConfigError("market.lambda must be positive");
        }
        const double lam_open = detail::get_or(m, "lambda_open", lambda(0.0));
        c.market = MarketCurves{beta, lambda, lam_open, eps, T};

        c.inflow.theta = detail::curve_from_json(in, "theta", T, Curve{0.0});
        c.inflow.sigma = detail::curve_from_json(in, "sigma", T, Curve{0.1});
        c.inflow.z0 = detail::get_or(in, "z0", 0.1);
        if (in.contains("driver")) {
            const json& d = in.at("driver");
            const std::string kind = detail::get_or<std::string>(d, "kind", "gaussian_shocks");
            if (kind == "brownian") {
                c.inflow.driver.kind = DriverSpec::Kind::brownian;
            } else if (kind == "gaussian_shocks") {
                c.inflow.driver.kind = DriverSpec::Kind::gaussian_shocks;
            } else {
                throw ConfigError("inflow.driver.kind must be 'brownian' or 'gaussian_shocks'");
            }
            c.inflow.driver.n_shocks = detail::get_or<std::size_t>(d, "n_shocks", 20);
            c.inflow.driver.total_variance = detail::get_or(d, "total_variance", -1.0);
        }
        c.inflow.check();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }

    c.x0_explicit = ini.contains("x0");
    c.initial.x0 = c.x0_explicit ? detail::get_or(ini, "x0", 0.0) : -c.inflow.z0;
    c.initial.y0 = detail::get_or(ini, "y0", 0.0);

    c.sim.n_steps = detail::get_or<std::size_t>(sim, "n_steps", c.sim.n_steps);
    c.sim.n_paths = detail::get_or<std::size_t>(sim, "n_paths", c.sim.n_paths);
    c.sim.seed = detail::get_or<std::uint64_t>(sim, "seed", c.sim.seed);
    c.sim.threads = detail::get_or<unsigned>(sim, "threads", c.sim.threads);
    if (sim.contains("trajectory_paths")) {
        c.sim.trajectory_paths = sim.at("trajectory_paths").get<std::vector<std::size_t>>();
    }
    if (c.sim.n_steps < 2) {
        throw ConfigError("simulation.n_steps must be >= 2");
    }
    if (c.sim.n_paths < 1) {
        throw ConfigError("simulation.n_paths must be >= 1");
    }

    if (root.contains("scan")) {
        const json& s = root.at("scan");
        ScanSpec spec;
        spec.variable = detail::scan_variable_from(detail::get_or<std::string>(s, "variable", "theta"));
        spec.values = detail::number_list(s, "values");
        if (spec.values.empty()) {
            throw ConfigError("scan.values must be a nonempty array");
        }
        c.scan = spec;
    }
    if (root.contains("misspec")) {
        const json& s = root.at("misspec");
        MisspecSpec spec;
        spec.theta_true = detail::number_list(s, "theta_true");
        spec.theta_hat = detail::number_list(s, "theta_hat");
        spec.sigma_hat = detail::number_list(s, "sigma_hat");
        spec.common_random_numbers = detail::get_or(s, "common_random_numbers", true);
        spec.sigma_check_paths = detail::get_or<std::size_t>(s, "sigma_check_paths", 200);
        if (spec.theta_true.empty() || spec.theta_hat.empty()) {
            throw ConfigError("misspec.theta_true and misspec.theta_hat must be nonempty");
        }
        c.misspec = spec;
    }
    return c;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) {
        throw ConfigError("cannot open config " + path);
    }
    json root;
    try {
        root = json::parse(f, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        throw ConfigError("config " + path + ": " + e.what());
    }
    return config_from_json(root);
}

inline json RunConfig::snapshot() const {
    json j;
    j["market"] = {{"horizon", market.horizon},
                   {"beta", detail::curve_to_json(market.beta)},
                   {"lambda", detail::curve_to_json(market.lambda)},
                   {"lambda_open", market.lambda_open},
                   {"epsilon", detail::curve_to_json(market.epsilon)}};
    json driver = {{"kind", to_string(inflow.driver.kind)}, {"n_shocks", inflow.driver.n_shocks}};
    if (inflow.driver.total_variance >= 0.0) {
        driver["total_variance"] = inflow.driver.total_variance;
    }
    j["inflow"] = {{"theta", detail::curve_to_json(inflow.theta)},
                   {"sigma", detail::curve_to_json(inflow.sigma)},
                   {"z0", inflow.z0},
                   {"driver", driver}};
    j["initial"] = {{"x0", initial.x0}, {"y0", initial.y0}};
    j["simulation"] = {{"n_steps", sim.n_steps},
                       {"n_paths", sim.n_paths},
                       {"seed", sim.seed},
                       {"threads", sim.threads},
                       {"trajectory_paths", sim.trajectory_paths}};
    if (scan) {
        j["scan"] = {{"variable", to_string(scan->variable)}, {"values", scan->values}};
    }
    if (misspec) {
        j["misspec"] = {{"theta_true", misspec->theta_true},
                        {"theta_hat", misspec->theta_hat},
                        {"sigma_hat", misspec->sigma_hat},
                        {"common_random_numbers", misspec->common_random_numbers},
                        {"sigma_check_paths", misspec->sigma_check_paths}};
    }
    return j;
}

namespace io {

namespace detail {

inline void dump_json(const json& j, std::ostream& out, int indent, int depth) {
    const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
    const std::string close_pad(static_cast<std::size_t>(indent * depth), ' ');
    switch (j.type()) {
        case json::value_t::object: {
            if (j.empty()) {
                out << "{}";
                return;
            }
            out << "{\n";
            std::size_t i = 0;
            for (auto it = j.begin(); it != j.end(); ++it, ++i) {
                out << pad << json(it.key()).dump() << ": ";
                dump_json(it.value(), out, indent, depth + 1);
                out << (i + 1 < j.size() ? ",\n" : "\n");
            }
            out << close_pad << '}';
            return;
        }
        case json::value_t::array: {
            if (j.empty()) {
                out << "[]";
                return;
            }
            out << "[\n";
            for (std::size_t i = 0; i < j.size(); ++i) {
                out << pad;
                dump_json(j[i], out, indent, depth + 1);
                out << (i + 1 < j.size() ? ",\n" : "\n");
            }
            out << close_pad << ']';
            return;
        }
        case json::value_t::number_float: {
            const double v = j.get<double>();
            // JSON has no inf/nan
            out << (std::isfinite(v) ? fmt(v) : "null");
            return;
        }
        default:
            out << j.dump();
    }
}

}  // namespace detail

/// Pretty JSON where every float is written by `fmt` (fixed decimal,
/// 10 significant digits). Integers, strings and booleans use the library.
inline std::string to_json_text(const json& j, int indent = 2) {
    std::ostringstream out;
    detail::dump_json(j, out, indent, 0);
    out << '\n';
    return out.str();
}

inline void write_json(const json& j, const std::string& path) {
    std::ofstream f(path);
    if (!f) {
        throw std::runtime_error("cannot open " + path + " for writing");
    }
    f << to_json_text(j);
}

}  // namespace io

}  // namespace unwind
