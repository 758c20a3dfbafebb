#pragma once

// JSON experiment configuration. Every key is optional; missing keys take the
// defaults below. Unknown keys are rejected, and every validation failure
// names the offending field by its dotted path.
//
// {
//   "params":       {"k1": 1, "k2": 4, "a": 1, "b": 1},
//   "epsilon":      0.3,
//   "epsilon_list": [],
//   "nonlinearity": {"terms": [{"i": 2, "j": 0, "coeff": 1}], "eps_power": 2},
//   "grid":         {"L": 30, "n": 1024},
//   "kdv_grid":     {"L": 40, "n": 512},
//   "time":         {"t_end": 1, "output_times": [], "output_count": 1, "dt": 0,
//                    "cfl": 0.5, "substeps_per_oscillation": 16},
//   "initial":      {"kind": "smooth", "profile": "gaussian", "amplitude": 1,
//                    "width": 1, "center": 0, "plateau": 0,
//                    "phi_profile": {"profile": "zero", "amplitude": 0, "width": 1,
//                                    "center": 0, "plateau": 0}},
//   "outputs":      {"csv_path": "output.csv", "svg_path": null, "precision": 17}
// }

#include <nlohmann/json.hpp>

#include <bit>
#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "kdva/core.hpp"
#include "kdva/errors.hpp"
#include "kdva/full_solver.hpp"

namespace kdva::cli {

using nlohmann::json;

struct GridConfig {
    double L = 30.0;
    std::size_t n = 1024;

    Grid1D grid() const { return Grid1D(L, n); }
};

struct TimeConfig {
    double t_end = 1.0;
    std::vector<double> output_times;  ///< empty: derived from output_count
    int output_count = 1;
    double dt = 0.0;
    double cfl = 0.5;
    double substeps_per_oscillation = 16.0;

    /// Explicit output times, or t_end * k / output_count for k = 1..output_count.
    std::vector<double> resolved_output_times() const {
        if (!output_times.empty()) return output_times;
        std::vector<double> times;
        for (int k = 1; k <= output_count; ++k) {
            times.push_back(k == output_count ? t_end : t_end * k / output_count);
        }
        return times;
    }

    SolverConfig solver() const { return SolverConfig{dt, t_end, cfl, substeps_per_oscillation}; }
};

struct OutputConfig {
    std::string csv_path = "output.csv";
    std::optional<std::string> svg_path;
    int precision = 17;
};

struct ExperimentConfig {
    PhysParams params;
    double epsilon = 0.3;
    std::vector<double> epsilon_list;
    NonlinearitySpec nonlinearity{{Term{2, 0, 1.0}}, 2};
    GridConfig grid;
    GridConfig kdv_grid{40.0, 512};
    TimeConfig time;
    InitialConditionSpec initial{IcKind::Smooth, Profile::gaussian(1.0, 1.0), Profile{}};
    OutputConfig outputs;
};

namespace detail {

inline void reject_unknown(const json& object, const std::set<std::string>& allowed, const std::string& path) {
    if (!object.is_object()) {
        fail(ErrorKind::ValidationError, (path.empty() ? "document" : path) + " must be an object", path);
    }
    for (const auto& item : object.items()) {
        if (!allowed.contains(item.key())) {
            const std::string field = path.empty() ? item.key() : path + "." + item.key();
            fail(ErrorKind::ValidationError, "unknown key " + field, field);
        }
    }
}

inline double number(const json& object, const char* key, double fallback, const std::string& path) {
    if (!object.contains(key)) return fallback;
    const auto& value = object.at(key);
    const std::string field = path + "." + key;
    if (!value.is_number()) fail(ErrorKind::ValidationError, field + " must be a number", field);
    const double x = value.get<double>();
    if (!std::isfinite(x)) fail(ErrorKind::ValidationError, field + " must be finite", field);
    return x;
}

inline long integer(const json& object, const char* key, long fallback, const std::string& path) {
    if (!object.contains(key)) return fallback;
    const auto& value = object.at(key);
    const std::string field = path + "." + key;
    if (!value.is_number_integer()) fail(ErrorKind::ValidationError, field + " must be an integer", field);
    return value.get<long>();
}

inline std::vector<double> number_list(const json& value, const std::string& field) {
    if (!value.is_array()) fail(ErrorKind::ValidationError, field + " must be an array of numbers", field);
    std::vector<double> out;
    for (std::size_t k = 0; k < value.size(); ++k) {
        if (!value[k].is_number()) {
            fail(ErrorKind::ValidationError, field + " must contain only numbers", field + "[" + std::to_string(k) + "]");
        }
        out.push_back(value[k].get<double>());
    }
    return out;
}

inline ProfileShape parse_shape(const json& value, const std::string& field) {
    if (!value.is_string()) fail(ErrorKind::ValidationError, field + " must be a string", field);
    const auto name = value.get<std::string>();
    if (name == "zero") return ProfileShape::Zero;
    if (name == "gaussian") return ProfileShape::Gaussian;
    if (name == "sech2") return ProfileShape::Sech2;
    if (name == "smoothed_step") return ProfileShape::SmoothedStep;
    fail(ErrorKind::ValidationError, field + ": unknown profile '" + name + "'", field);
}

/// Reads profile fields from `object` (which may carry other keys too).
inline Profile parse_profile(const json& object, const Profile& fallback, const std::string& path) {
    Profile p = fallback;
    if (object.contains("profile")) p.shape = parse_shape(object.at("profile"), path + ".profile");
    p.amplitude = number(object, "amplitude", p.amplitude, path);
    p.width = number(object, "width", p.width, path);
    p.center = number(object, "center", p.center, path);
    p.plateau = number(object, "plateau", p.plateau, path);
    p.validate(path);
    return p;
}

inline GridConfig parse_grid(const json& object, GridConfig fallback, const std::string& path) {
    reject_unknown(object, {"L", "n"}, path);
    fallback.L = number(object, "L", fallback.L, path);
    const long n = integer(object, "n", static_cast<long>(fallback.n), path);
    if (!(fallback.L > 0.0)) fail(ErrorKind::ValidationError, path + ".L must be > 0", path + ".L");
    if (n < 8 || !std::has_single_bit(static_cast<unsigned long>(n))) {
        fail(ErrorKind::ValidationError, path + ".n must be a power of two >= 8", path + ".n");
    }
    fallback.n = static_cast<std::size_t>(n);
    return fallback;
}

}  // namespace detail

inline ExperimentConfig parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        fail(ErrorKind::ParseError, std::string("malformed JSON: ") + e.what());
    }
    using namespace detail;
    reject_unknown(doc, {"params", "epsilon", "epsilon_list", "nonlinearity", "grid", "kdv_grid", "time", "initial",
                         "outputs"},
                   "");

    ExperimentConfig cfg;

    if (doc.contains("params")) {
        const auto& p = doc.at("params");
        reject_unknown(p, {"k1", "k2", "a", "b"}, "params");
        cfg.params.k1 = number(p, "k1", cfg.params.k1, "params");
        cfg.params.k2 = number(p, "k2", cfg.params.k2, "params");
        cfg.params.a = number(p, "a", cfg.params.a, "params");
        cfg.params.b = number(p, "b", cfg.params.b, "params");
    }
    cfg.params.validate();

    if (doc.contains("epsilon")) {
        if (!doc.at("epsilon").is_number()) fail(ErrorKind::ValidationError, "epsilon must be a number", "epsilon");
        cfg.epsilon = doc.at("epsilon").get<double>();
    }
    Epsilon{cfg.epsilon};

    if (doc.contains("epsilon_list")) cfg.epsilon_list = number_list(doc.at("epsilon_list"), "epsilon_list");
    for (std::size_t k = 0; k < cfg.epsilon_list.size(); ++k) {
        const std::string field = "epsilon_list[" + std::to_string(k) + "]";
        const double e = cfg.epsilon_list[k];
        if (!(e >= 0.05 && e <= 1.0)) fail(ErrorKind::ValidationError, field + " must lie in [0.05, 1]", field);
        if (k > 0 && !(e < cfg.epsilon_list[k - 1])) {
            fail(ErrorKind::ValidationError, "epsilon_list must be strictly decreasing", field);
        }
    }

    if (doc.contains("nonlinearity")) {
        const auto& nl = doc.at("nonlinearity");
        reject_unknown(nl, {"terms", "eps_power"}, "nonlinearity");
        if (nl.contains("terms")) {
            const auto& terms = nl.at("terms");
            if (!terms.is_array()) fail(ErrorKind::ValidationError, "nonlinearity.terms must be an array", "nonlinearity.terms");
            cfg.nonlinearity.terms.clear();
            for (std::size_t k = 0; k < terms.size(); ++k) {
                const std::string path = "nonlinearity.terms[" + std::to_string(k) + "]";
                reject_unknown(terms[k], {"i", "j", "coeff"}, path);
                cfg.nonlinearity.terms.push_back(Term{static_cast<int>(integer(terms[k], "i", 0, path)),
                                                      static_cast<int>(integer(terms[k], "j", 0, path)),
                                                      number(terms[k], "coeff", 0.0, path)});
            }
        }
        cfg.nonlinearity.eps_power =
            static_cast<int>(integer(nl, "eps_power", cfg.nonlinearity.eps_power, "nonlinearity"));
    }
    cfg.nonlinearity.validate();

    if (doc.contains("grid")) cfg.grid = parse_grid(doc.at("grid"), cfg.grid, "grid");
    if (doc.contains("kdv_grid")) cfg.kdv_grid = parse_grid(doc.at("kdv_grid"), cfg.kdv_grid, "kdv_grid");

    if (doc.contains("time")) {
        const auto& t = doc.at("time");
        reject_unknown(t, {"t_end", "output_times", "output_count", "dt", "cfl", "substeps_per_oscillation"}, "time");
        cfg.time.t_end = number(t, "t_end", cfg.time.t_end, "time");
        if (t.contains("output_times")) cfg.time.output_times = number_list(t.at("output_times"), "time.output_times");
        cfg.time.output_count = static_cast<int>(integer(t, "output_count", cfg.time.output_count, "time"));
        cfg.time.dt = number(t, "dt", cfg.time.dt, "time");
        cfg.time.cfl = number(t, "cfl", cfg.time.cfl, "time");
        cfg.time.substeps_per_oscillation =
            number(t, "substeps_per_oscillation", cfg.time.substeps_per_oscillation, "time");
    }
    if (!(cfg.time.t_end >= 0.0)) fail(ErrorKind::ValidationError, "time.t_end must be >= 0", "time.t_end");
    if (cfg.time.output_count < 1) {
        fail(ErrorKind::ValidationError, "time.output_count must be >= 1", "time.output_count");
    }
    if (!(cfg.time.dt >= 0.0)) fail(ErrorKind::ValidationError, "time.dt must be >= 0", "time.dt");
    if (!(cfg.time.cfl > 0.0 && cfg.time.cfl <= 1.0)) {
        fail(ErrorKind::ValidationError, "time.cfl must lie in (0, 1]", "time.cfl");
    }
    if (!(cfg.time.substeps_per_oscillation >= 8.0)) {
        fail(ErrorKind::ValidationError, "time.substeps_per_oscillation must be >= 8",
             "time.substeps_per_oscillation");
    }
    for (std::size_t k = 0; k < cfg.time.output_times.size(); ++k) {
        const double t = cfg.time.output_times[k];
        const std::string field = "time.output_times[" + std::to_string(k) + "]";
        if (!(t >= 0.0 && t <= cfg.time.t_end)) fail(ErrorKind::ValidationError, field + " must lie in [0, t_end]", field);
        if (k > 0 && !(t > cfg.time.output_times[k - 1])) {
            fail(ErrorKind::ValidationError, "time.output_times must be strictly increasing", field);
        }
    }

    if (doc.contains("initial")) {
        const auto& ini = doc.at("initial");
        reject_unknown(ini, {"kind", "profile", "amplitude", "width", "center", "plateau", "phi_profile"}, "initial");
        if (ini.contains("kind")) {
            const auto& kind = ini.at("kind");
            if (kind == "smooth") {
                cfg.initial.kind = IcKind::Smooth;
            } else if (kind == "burst") {
                cfg.initial.kind = IcKind::Burst;
            } else {
                fail(ErrorKind::ValidationError, "initial.kind must be \"smooth\" or \"burst\"", "initial.kind");
            }
        }
        cfg.initial.u0 = parse_profile(ini, cfg.initial.u0, "initial");
        if (ini.contains("phi_profile")) {
            const auto& phi = ini.at("phi_profile");
            reject_unknown(phi, {"profile", "amplitude", "width", "center", "plateau"}, "initial.phi_profile");
            cfg.initial.phi = parse_profile(phi, cfg.initial.phi, "initial.phi_profile");
        }
    }

    if (doc.contains("outputs")) {
        const auto& out = doc.at("outputs");
        reject_unknown(out, {"csv_path", "svg_path", "precision"}, "outputs");
        if (out.contains("csv_path")) {
            if (!out.at("csv_path").is_string() || out.at("csv_path").get<std::string>().empty()) {
                fail(ErrorKind::ValidationError, "outputs.csv_path must be a non-empty string", "outputs.csv_path");
            }
            cfg.outputs.csv_path = out.at("csv_path").get<std::string>();
        }
        if (out.contains("svg_path") && !out.at("svg_path").is_null()) {
            if (!out.at("svg_path").is_string()) {
                fail(ErrorKind::ValidationError, "outputs.svg_path must be a string or null", "outputs.svg_path");
            }
            cfg.outputs.svg_path = out.at("svg_path").get<std::string>();
        }
        cfg.outputs.precision = static_cast<int>(integer(out, "precision", cfg.outputs.precision, "outputs"));
        if (cfg.outputs.precision < 1 || cfg.outputs.precision > 17) {
            fail(ErrorKind::ValidationError, "outputs.precision must lie in [1, 17]", "outputs.precision");
        }
    }
    return cfg;
}

/// Canonical JSON form of a config (all fields explicit), recorded in output headers.
inline json to_json(const ExperimentConfig& cfg) {
    auto shape_name = [](ProfileShape s) {
        switch (s) {
            case ProfileShape::Zero: return "zero";
            case ProfileShape::Gaussian: return "gaussian";
            case ProfileShape::Sech2: return "sech2";
            case ProfileShape::SmoothedStep: return "smoothed_step";
        }
        return "zero";
    };
    json terms = json::array();
    for (const auto& t : cfg.nonlinearity.terms) terms.push_back({{"i", t.i}, {"j", t.j}, {"coeff", t.coeff}});
    const auto& u0 = cfg.initial.u0;
    const auto& phi = cfg.initial.phi;
    return json{
        {"params", {{"k1", cfg.params.k1}, {"k2", cfg.params.k2}, {"a", cfg.params.a}, {"b", cfg.params.b}}},
        {"epsilon", cfg.epsilon},
        {"epsilon_list", cfg.epsilon_list},
        {"nonlinearity", {{"terms", terms}, {"eps_power", cfg.nonlinearity.eps_power}}},
        {"grid", {{"L", cfg.grid.L}, {"n", cfg.grid.n}}},
        {"kdv_grid", {{"L", cfg.kdv_grid.L}, {"n", cfg.kdv_grid.n}}},
        {"time",
         {{"t_end", cfg.time.t_end},
          {"output_times", cfg.time.output_times},
          {"output_count", cfg.time.output_count},
          {"dt", cfg.time.dt},
          {"cfl", cfg.time.cfl},
          {"substeps_per_oscillation", cfg.time.substeps_per_oscillation}}},
        {"initial",
         {{"kind", cfg.initial.kind == IcKind::Smooth ? "smooth" : "burst"},
          {"profile", shape_name(u0.shape)},
          {"amplitude", u0.amplitude},
          {"width", u0.width},
          {"center", u0.center},
          {"plateau", u0.plateau},
          {"phi_profile",
           {{"profile", shape_name(phi.shape)},
            {"amplitude", phi.amplitude},
            {"width", phi.width},
            {"center", phi.center},
            {"plateau", phi.plateau}}}}},
        {"outputs",
         {{"csv_path", cfg.outputs.csv_path},
          {"svg_path", cfg.outputs.svg_path ? json(*cfg.outputs.svg_path) : json(nullptr)},
          {"precision", cfg.outputs.precision}}},
    };
}

}  // namespace kdva::cli
