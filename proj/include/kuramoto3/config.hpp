#pragma once

// JSON run configuration. Every section is optional; absent keys keep their
// defaults, unknown keys are rejected with their dotted path.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "classifier.hpp"
#include "continuation.hpp"
#include "errors.hpp"
#include "integrator.hpp"
#include "model.hpp"
#include "scan.hpp"

namespace kuramoto3 {

struct SimulateSection {
    std::optional<PhaseState> initial;  // random from the run seed when absent
};

struct ScanSection {
    double mu_min = -5.0, mu_max = 5.0;
    double gamma_min = -5.0, gamma_max = 5.0;
    int n_mu = 201, n_gamma = 201;
    int n_ics = 10;
};

/// Named or explicit start state for a sweep.
struct InitialSpec {
    std::string preset;  // "", "sync", "splay" or "antipodal"
    std::optional<PhaseState> state;
};

struct BifurcateSection {
    SweepAxis axis = SweepAxis::Mu;
    double start = -1.0;
    double end = 1.5;
    int n_steps = 200;
    InitialPolicy policy = InitialPolicy::Inherit;
    bool down = false;  // also run the reversed sweep and report hysteresis
    double kick = 1e-6;
    double t_transient = 1000.0;  // per step
    double t_measure = 1000.0;
    InitialSpec initial;
};

struct AnalyticSection {
    std::vector<std::string> equilibria{"sync", "splay", "antipodal"};
};

struct RunConfig {
    ModelParams model;
    IntegratorConfig integrator;
    ClassifierTolerances classifier;
    SimulateSection simulate;
    ScanSection scan;
    BifurcateSection bifurcate;
    AnalyticSection analytic;
    std::string output_dir = "out";
    std::uint64_t seed = 1;

    void validate() const {
        model.validate("model");
        integrator.validate("integrator");
        classifier.validate("classifier");
        scan_grid().validate("command.scan");
        sweep_spec().validate("command.bifurcate");
        for (const auto& name : analytic.equilibria)
            if (name != "sync" && name != "splay" && name != "antipodal")
                throw ValidationError("command.analytic.equilibria",
                                      "unknown equilibrium '" + name + "'");
        if (output_dir.empty()) throw ValidationError("output_dir", "must not be empty");
    }

    ScanGrid scan_grid() const {
        ScanGrid g;
        g.mu_min = scan.mu_min;
        g.mu_max = scan.mu_max;
        g.gamma_min = scan.gamma_min;
        g.gamma_max = scan.gamma_max;
        g.n_mu = scan.n_mu;
        g.n_gamma = scan.n_gamma;
        g.n_ics = scan.n_ics;
        g.alpha = model.alpha;
        g.seed = seed;
        return g;
    }

    SweepSpec sweep_spec() const {
        SweepSpec s;
        s.axis = bifurcate.axis;
        s.start = bifurcate.start;
        s.end = bifurcate.end;
        s.n_steps = bifurcate.n_steps;
        s.base = model;
        s.cfg = integrator;
        s.cfg.t_transient = bifurcate.t_transient;
        s.cfg.t_measure = bifurcate.t_measure;
        s.tol = classifier;
        s.policy = bifurcate.policy;
        s.seed = seed;
        s.kick = bifurcate.kick;
        const InitialSpec& init = bifurcate.initial;
        if (init.state) s.initial = init.state;
        else if (init.preset == "sync") s.initial = sync_equilibrium();
        else if (init.preset == "splay") s.initial = splay_equilibrium();
        else if (init.preset == "antipodal") s.initial = antipodal_equilibrium();
        return s;
    }
};

namespace detail {

using json = nlohmann::json;

inline std::string join_path(const std::string& base, const std::string& key) {
    return base.empty() ? key : base + "." + key;
}

inline double json_number(const json& v, const std::string& path) {
    if (!v.is_number()) throw ValidationError(path, "expected a number");
    return v.get<double>();
}

inline int json_int(const json& v, const std::string& path) {
    if (!v.is_number_integer()) throw ValidationError(path, "expected an integer");
    return v.get<int>();
}

inline bool json_bool(const json& v, const std::string& path) {
    if (!v.is_boolean()) throw ValidationError(path, "expected true or false");
    return v.get<bool>();
}

inline std::string json_string(const json& v, const std::string& path) {
    if (!v.is_string()) throw ValidationError(path, "expected a string");
    return v.get<std::string>();
}

inline std::array<double, 3> json_triple(const json& v, const std::string& path) {
    if (!v.is_array() || v.size() != 3) throw ValidationError(path, "expected 3 numbers");
    std::array<double, 3> out{};
    for (std::size_t i = 0; i < 3; ++i)
        out[i] = json_number(v[i], path + "[" + std::to_string(i) + "]");
    return out;
}

using Handlers = std::map<std::string, std::function<void(const json&, const std::string&)>>;

/// Dispatches every key of `obj` to its handler; unknown keys are errors.
inline void read_object(const json& obj, const std::string& path, const Handlers& handlers) {
    if (!obj.is_object()) throw ValidationError(path.empty() ? "<root>" : path, "expected an object");
    for (const auto& [key, value] : obj.items()) {
        const std::string sub = join_path(path, key);
        const auto it = handlers.find(key);
        if (it == handlers.end()) throw ValidationError(sub, "unknown key");
        it->second(value, sub);
    }
}

inline PhaseState read_state(const json& v, const std::string& path) {
    PhaseState s;
    bool have_theta = false;
    read_object(v, path,
                {{"theta", [&](const json& x, const std::string& p) {
                      s.theta = json_triple(x, p);
                      have_theta = true;
                  }},
                 {"omega", [&](const json& x, const std::string& p) { s.omega = json_triple(x, p); }}});
    if (!have_theta) throw ValidationError(path + ".theta", "required");
    return s;
}

}  // namespace detail

/// Builds a RunConfig from a parsed JSON document.
inline RunConfig config_from_json(const nlohmann::json& doc) {
    using detail::json;
    using namespace detail;
    RunConfig c;
    auto num = [](double& dst) {
        return [&dst](const json& v, const std::string& p) { dst = json_number(v, p); };
    };
    auto integer = [](int& dst) {
        return [&dst](const json& v, const std::string& p) { dst = json_int(v, p); };
    };

    Handlers model{
        {"m", num(c.model.m)},
        {"epsilon", num(c.model.epsilon)},
        {"mu", num(c.model.mu)},
        {"gamma", num(c.model.gamma)},
        {"alpha", num(c.model.alpha)},
        {"n", integer(c.model.n)},
        {"convention",
         [&](const json& v, const std::string& p) {
             const std::string s = json_string(v, p);
             if (s == "ExcludeSelf") c.model.convention = SumConvention::ExcludeSelf;
             else if (s == "Literal") c.model.convention = SumConvention::Literal;
             else throw ValidationError(p, "expected \"ExcludeSelf\" or \"Literal\"");
         }},
    };
    Handlers integrator{
        {"dt", num(c.integrator.dt)},
        {"t_transient", num(c.integrator.t_transient)},
        {"t_measure", num(c.integrator.t_measure)},
        {"record_stride", integer(c.integrator.record_stride)},
    };
    ClassifierTolerances& t = c.classifier;
    Handlers classifier{
        {"tol_velocity_zero", num(t.tol_velocity_zero)},
        {"tol_phase_equal", num(t.tol_phase_equal)},
        {"tol_freq_equal", num(t.tol_freq_equal)},
        {"min_freq_gap", num(t.min_freq_gap)},
        {"tol_splay_spacing", num(t.tol_splay_spacing)},
        {"switching_window", num(t.switching_window)},
        {"min_alternations", integer(t.min_alternations)},
    };
    Handlers simulate{
        {"initial", [&](const json& v, const std::string& p) { c.simulate.initial = read_state(v, p); }},
    };
    Handlers scan{
        {"mu_min", num(c.scan.mu_min)},       {"mu_max", num(c.scan.mu_max)},
        {"gamma_min", num(c.scan.gamma_min)}, {"gamma_max", num(c.scan.gamma_max)},
        {"n_mu", integer(c.scan.n_mu)},       {"n_gamma", integer(c.scan.n_gamma)},
        {"n_ics", integer(c.scan.n_ics)},
    };
    BifurcateSection& b = c.bifurcate;
    Handlers bifurcate{
        {"axis",
         [&](const json& v, const std::string& p) {
             const std::string s = json_string(v, p);
             if (s == "mu") b.axis = SweepAxis::Mu;
             else if (s == "alpha") b.axis = SweepAxis::Alpha;
             else throw ValidationError(p, "expected \"mu\" or \"alpha\"");
         }},
        {"start", num(b.start)},
        {"end", num(b.end)},
        {"n_steps", integer(b.n_steps)},
        {"policy",
         [&](const json& v, const std::string& p) {
             const std::string s = json_string(v, p);
             if (s == "Inherit") b.policy = InitialPolicy::Inherit;
             else if (s == "FreshRandom") b.policy = InitialPolicy::FreshRandom;
             else throw ValidationError(p, "expected \"Inherit\" or \"FreshRandom\"");
         }},
        {"down", [&](const json& v, const std::string& p) { b.down = json_bool(v, p); }},
        {"kick", num(b.kick)},
        {"t_transient", num(b.t_transient)},
        {"t_measure", num(b.t_measure)},
        {"initial",
         [&](const json& v, const std::string& p) {
             if (v.is_string()) {
                 const std::string s = v.get<std::string>();
                 if (s != "sync" && s != "splay" && s != "antipodal" && s != "random")
                     throw ValidationError(p, "expected sync, splay, antipodal, random or a state");
                 b.initial.preset = s == "random" ? "" : s;
             } else {
                 b.initial.state = read_state(v, p);
             }
         }},
    };
    Handlers analytic{
        {"equilibria",
         [&](const json& v, const std::string& p) {
             if (!v.is_array()) throw ValidationError(p, "expected an array of names");
             c.analytic.equilibria.clear();
             for (std::size_t i = 0; i < v.size(); ++i)
                 c.analytic.equilibria.push_back(json_string(v[i], p + "[" + std::to_string(i) + "]"));
         }},
    };
    Handlers command{
        {"simulate", [&](const json& v, const std::string& p) { read_object(v, p, simulate); }},
        {"scan", [&](const json& v, const std::string& p) { read_object(v, p, scan); }},
        {"bifurcate", [&](const json& v, const std::string& p) { read_object(v, p, bifurcate); }},
        {"analytic", [&](const json& v, const std::string& p) { read_object(v, p, analytic); }},
    };
    Handlers root{
        {"model", [&](const json& v, const std::string& p) { read_object(v, p, model); }},
        {"integrator", [&](const json& v, const std::string& p) { read_object(v, p, integrator); }},
        {"classifier", [&](const json& v, const std::string& p) { read_object(v, p, classifier); }},
        {"command", [&](const json& v, const std::string& p) { read_object(v, p, command); }},
        {"output_dir",
         [&](const json& v, const std::string& p) { c.output_dir = json_string(v, p); }},
        {"seed",
         [&](const json& v, const std::string& p) {
             if (!v.is_number_unsigned()) throw ValidationError(p, "expected a non-negative integer");
             c.seed = v.get<std::uint64_t>();
         }},
    };
    read_object(doc, "", root);
    c.validate();
    return c;
}

inline RunConfig parse_config(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("malformed JSON: ") + e.what());
    }
    return config_from_json(doc);
}

inline RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot read config file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

}  // namespace kuramoto3
