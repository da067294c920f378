#pragma once

// Command-line front end: simulate | scan | bifurcate | analytic | verify.

#include <filesystem>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "acceptance.hpp"
#include "config.hpp"
#include "continuation.hpp"
#include "errors.hpp"
#include "io.hpp"
#include "model.hpp"
#include "observe.hpp"
#include "scan.hpp"

namespace kuramoto3::cli {

enum ExitCode : int { kOk = 0, kInvalid = 1, kBlowup = 2, kAcceptanceFailed = 3 };

/// Options shared by every subcommand. Unset optionals leave the config alone.
struct CommonFlags {
    std::string config_path;
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    std::optional<int> jobs;
    bool force = false;
    std::optional<double> mu, gamma, alpha, dt, t_transient, t_measure;
};

inline void add_common_flags(CLI::App& cmd, CommonFlags& f) {
    cmd.add_option("--config", f.config_path, "JSON run configuration");
    cmd.add_option("--out", f.out, "output directory");
    cmd.add_option("--seed", f.seed, "random seed");
    cmd.add_option("--jobs", f.jobs, "worker threads (default: logical cores)");
    cmd.add_flag("--force", f.force, "overwrite existing output files");
    cmd.add_option("--mu", f.mu, "pairwise coupling");
    cmd.add_option("--gamma", f.gamma, "triadic coupling");
    cmd.add_option("--alpha", f.alpha, "phase lag");
    cmd.add_option("--dt", f.dt, "RK4 step");
    cmd.add_option("--t-transient", f.t_transient, "discarded time (per step for bifurcate)");
    cmd.add_option("--t-measure", f.t_measure, "recorded time (per step for bifurcate)");
}

inline RunConfig resolve_config(const CommonFlags& f) {
    RunConfig c = f.config_path.empty() ? RunConfig{} : load_config(f.config_path);
    if (f.out) c.output_dir = *f.out;
    if (f.seed) c.seed = *f.seed;
    if (f.mu) c.model.mu = *f.mu;
    if (f.gamma) c.model.gamma = *f.gamma;
    if (f.alpha) c.model.alpha = *f.alpha;
    if (f.dt) c.integrator.dt = *f.dt;
    if (f.t_transient) {
        c.integrator.t_transient = *f.t_transient;
        c.bifurcate.t_transient = *f.t_transient;
    }
    if (f.t_measure) {
        c.integrator.t_measure = *f.t_measure;
        c.bifurcate.t_measure = *f.t_measure;
    }
    if (f.jobs && *f.jobs < 1) throw ValidationError("jobs", "must be >= 1");
    c.validate();
    return c;
}

inline int jobs_of(const CommonFlags& f) { return f.jobs ? *f.jobs : default_jobs(); }

/// Signed zero prints as "-0.0" in JSON; analytic values are reported
/// without it.
inline double clean(double v) { return v + 0.0; }

inline nlohmann::json label_json(const StateLabel& l) {
    nlohmann::json j{{"tag", std::string(to_string(l.tag))}};
    if (l.velocity) j["velocity"] = clean(*l.velocity);
    if (l.delta) j["delta"] = clean(*l.delta);
    if (l.detached) j["detached"] = *l.detached;
    return j;
}

inline nlohmann::json summary_json(const ObservableSummary& s) {
    return {{"mean_freq", s.mean_freq},
            {"freq_spread", s.freq_spread},
            {"pair_diff_mean", s.pair_diff_mean},
            {"pair_diff_spread", s.pair_diff_spread},
            {"max_speed", s.max_speed}};
}

inline nlohmann::json analytic_report(const RunConfig& c) {
    const ModelParams& p = c.model;
    nlohmann::json out;
    out["params"] = {{"m", p.m},         {"epsilon", p.epsilon}, {"mu", p.mu},
                     {"gamma", p.gamma}, {"alpha", p.alpha},
                     {"convention", std::string(to_string(p.convention))}};
    out["sync_velocity"] = clean(sync_velocity(p));

    nlohmann::json lines = nlohmann::json::array();
    for (const BoundaryLine& b : stability_boundaries(p.alpha)) {
        lines.push_back({{"kind", std::string(to_string(b.kind))},
                         {"slope", b.slope},
                         {"applies_at_alpha", b.applies_at(p.alpha)},
                         {"gamma_at_mu", clean(b.gamma_at(p.mu))}});
    }
    out["boundaries"] = lines;

    if (p.alpha == 0.0 && p.convention == SumConvention::ExcludeSelf && p.gamma != 0.0) {
        if (const auto pl = phase_locked_offset(p))
            out["phase_locked"] = {{"delta", pl->delta}, {"omega", clean(pl->omega)}};
        else
            out["phase_locked"] = nullptr;
    } else {
        out["phase_locked"] = "not applicable (needs alpha=0, ExcludeSelf, gamma!=0)";
    }

    nlohmann::json eq = nlohmann::json::object();
    for (const std::string& name : c.analytic.equilibria) {
        const PhaseState s = name == "sync"    ? sync_equilibrium()
                             : name == "splay" ? splay_equilibrium()
                                               : antipodal_equilibrium();
        const Eigenvalues ev = jacobian_eigen(s, p);
        nlohmann::json vals = nlohmann::json::array();
        for (const auto& z : ev) vals.push_back({clean(z.real()), clean(z.imag())});
        const double lead = max_transverse_real_part(ev);
        eq[name] = {{"eigenvalues", vals},
                    {"max_transverse_real_part", clean(lead)},
                    {"linearly_stable", lead < 0.0}};
    }
    out["equilibria"] = eq;
    return out;
}

inline int cmd_simulate(const CommonFlags& f, std::ostream& out) {
    const RunConfig c = resolve_config(f);
    const PhaseState s0 = c.simulate.initial ? *c.simulate.initial
                                             : random_initial_state(mix_seed(c.seed, 0x51aULL));
    const Trajectory traj = integrate(s0, c.model, c.integrator);
    const auto path = std::filesystem::path(c.output_dir) / "trajectory.csv";
    write_output_file(path, trajectory_csv(traj), f.force);
    const ObservableSummary s = summarize(traj);
    nlohmann::json report{{"trajectory", path.string()},
                          {"summary", summary_json(s)},
                          {"label", label_json(classify(s, c.classifier))}};
    out << report.dump(2) << '\n';
    return kOk;
}

inline int cmd_scan(const CommonFlags& f, std::ostream& out, std::ostream& err) {
    const RunConfig c = resolve_config(f);
    const ScanResult r = scan_plane(c.scan_grid(), c.model, c.integrator, c.classifier, jobs_of(f));
    const RenderedMap map = render_map(r);
    const std::filesystem::path dir(c.output_dir);
    write_output_file(dir / "scan.csv", map.csv, f.force);
    write_output_file(dir / "scan.ppm", map.ppm, f.force);
    int blowups = 0;
    for (const auto& cell : r.cells) blowups += cell.blowup_count;
    if (blowups > 0) err << "warning: " << blowups << " runs diverged (counted as Unclassified)\n";
    out << "wrote " << (dir / "scan.csv").string() << " and " << (dir / "scan.ppm").string()
        << " (" << r.cells.size() << " cells)\n";
    return kOk;
}

inline int cmd_bifurcate(const CommonFlags& f, std::ostream& out, std::ostream& err) {
    const RunConfig c = resolve_config(f);
    const SweepSpec spec = c.sweep_spec();
    const std::filesystem::path dir(c.output_dir);
    const BifurcationBranch up = sweep(spec);
    write_output_file(dir / "branch_up.csv", branch_csv(up), f.force);
    int blowups = 0;
    for (const auto& r : up.records) blowups += r.blowup;

    nlohmann::json report{{"branch_up", (dir / "branch_up.csv").string()}};
    if (c.bifurcate.down) {
        const BifurcationBranch down = sweep(spec.reversed());
        for (const auto& r : down.records) blowups += r.blowup;
        write_output_file(dir / "branch_down.csv", branch_csv(down), f.force);
        nlohmann::json intervals = nlohmann::json::array();
        for (const ParamInterval& iv : detect_hysteresis(up, down, c.classifier))
            intervals.push_back({iv.lo, iv.hi});
        report["branch_down"] = (dir / "branch_down.csv").string();
        report["axis"] = std::string(to_string(spec.axis));
        report["hysteresis"] = intervals;
        write_output_file(dir / "hysteresis.json", report.dump(2) + "\n", f.force);
    }
    if (blowups > 0) err << "warning: " << blowups << " sweep steps diverged\n";
    out << report.dump(2) << '\n';
    return kOk;
}

inline int cmd_analytic(const CommonFlags& f, std::ostream& out) {
    out << analytic_report(resolve_config(f)).dump(2) << '\n';
    return kOk;
}

inline int cmd_verify(const CommonFlags& f, const std::vector<int>& only, std::ostream& out) {
    acceptance::Options opt;
    if (f.seed) opt.seed = *f.seed;
    opt.jobs = jobs_of(f);
    const auto& checks = acceptance::all_checks();
    bool all = true;
    for (std::size_t k = 0; k < checks.size(); ++k) {
        const int id = static_cast<int>(k) + 1;
        if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
        const acceptance::CriterionResult r = checks[k](opt);
        out << acceptance::format_line(r) << std::endl;
        all = all && r.passed;
    }
    return all ? kOk : kAcceptanceFailed;
}

/// Parses argv and runs one subcommand. Diagnostics go to `err`.
inline int run_command(int argc, const char* const* argv, std::ostream& out = std::cout,
                       std::ostream& err = std::cerr) {
    CLI::App app{"Three phase oscillators with inertia and triadic coupling", "kuramoto3"};
    app.require_subcommand(1);
    CommonFlags flags;
    std::vector<int> only;
    CLI::App* simulate = app.add_subcommand("simulate", "integrate one trajectory, write CSV");
    CLI::App* scan = app.add_subcommand("scan", "classify the (mu, gamma) plane, write CSV + PPM");
    CLI::App* bifurcate = app.add_subcommand("bifurcate", "one-parameter sweep(s) with warm starts");
    CLI::App* analytic = app.add_subcommand("analytic", "closed-form quantities as JSON");
    CLI::App* verify = app.add_subcommand("verify", "run the acceptance checks");
    for (CLI::App* cmd : {simulate, scan, bifurcate, analytic, verify}) add_common_flags(*cmd, flags);
    verify->add_option("--only", only, "criterion numbers to run")->check(CLI::Range(1, 11));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kInvalid;
    }

    try {
        if (simulate->parsed()) return cmd_simulate(flags, out);
        if (scan->parsed()) return cmd_scan(flags, out, err);
        if (bifurcate->parsed()) return cmd_bifurcate(flags, out, err);
        if (analytic->parsed()) return cmd_analytic(flags, out);
        return cmd_verify(flags, only, out);
    } catch (const NonFiniteError& e) {
        err << "error: integration diverged: " << e.what() << '\n';
        return kBlowup;
    } catch (const ValidationError& e) {
        err << "error: invalid value for " << e.what() << '\n';
        return kInvalid;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kInvalid;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kInvalid;
    }
}

}  // namespace kuramoto3::cli
