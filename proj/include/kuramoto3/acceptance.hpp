#pragma once

// End-to-end acceptance checks. Each check returns one pass/fail line;
// tolerances and run lengths are fixed here.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "classifier.hpp"
#include "continuation.hpp"
#include "integrator.hpp"
#include "model.hpp"
#include "observe.hpp"
#include "scan.hpp"

namespace kuramoto3::acceptance {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
};

struct Options {
    std::uint64_t seed = 1;
    int jobs = 1;
};

namespace detail {

/// Drops the separator left after the last list item.
inline std::string trimmed(std::string s) {
    while (!s.empty() && (s.back() == ' ' || s.back() == ';')) s.pop_back();
    return s;
}

inline std::string fmt(double v, int precision = 4) {
    std::ostringstream os;
    os.precision(precision);
    os << v;
    return os.str();
}

/// Synchronous state plus a bounded random perturbation.
inline PhaseState near_sync(std::mt19937_64& rng, double amplitude) {
    std::uniform_real_distribution<double> u(-amplitude, amplitude);
    PhaseState s;
    for (std::size_t i = 0; i < kOscillators; ++i) {
        s.theta[i] = u(rng);
        s.omega[i] = u(rng);
    }
    return s;
}

inline PhaseState mirrored(PhaseState s) {
    for (std::size_t i = 0; i < kOscillators; ++i) {
        s.theta[i] = -s.theta[i];
        s.omega[i] = -s.omega[i];
    }
    return s;
}

inline double max_abs_dev(const std::array<double, 3>& f, double target) {
    double d = 0.0;
    for (double x : f) d = std::max(d, std::abs(x - target));
    return d;
}

/// Root of f on [lo, hi] by bisection; requires a sign change.
inline std::optional<double> bisect(const std::function<double(double)>& f, double lo, double hi,
                                    double tol = 1e-7) {
    double flo = f(lo);
    const double fhi = f(hi);
    if ((flo > 0.0) == (fhi > 0.0)) return std::nullopt;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

inline bool synchronous(StateTag t) {
    return t == StateTag::SyncRotation || t == StateTag::SyncFixedPoint;
}

}  // namespace detail

/// Measured mean frequency on the synchronous branch against ω_s.
inline CriterionResult synchronous_velocity(const Options& opt) {
    constexpr int kSamples = 50;
    constexpr double kTol = 1e-3;
    const std::array<double, 3> alphas{0.1, 0.5, 1.0};
    std::mt19937_64 rng(mix_seed(opt.seed, 1));
    std::uniform_real_distribution<double> mu_dist(-3.0, 3.0), gamma_dist(-5.0, 5.0);
    const IntegratorConfig cfg{0.01, 500.0, 200.0, 10};

    double worst = 0.0;
    int passed = 0;
    for (int k = 0; k < kSamples; ++k) {
        ModelParams p;
        p.alpha = alphas[static_cast<std::size_t>(k) % alphas.size()];
        do {
            p.mu = mu_dist(rng);
            p.gamma = gamma_dist(rng);
        } while (3.0 * p.mu + p.gamma < 0.5);  // stable synchrony for alpha < pi/2
        const Trajectory traj = integrate(detail::near_sync(rng, 0.2), p, cfg);
        const double dev = detail::max_abs_dev(summarize(traj).mean_freq, sync_velocity(p));
        worst = std::max(worst, dev);
        if (dev < kTol) ++passed;
    }
    return {1, "synchronous velocity formula", passed == kSamples,
            std::to_string(passed) + "/" + std::to_string(kSamples) +
                " triples within 1e-3, worst |df|=" + detail::fmt(worst)};
}

/// Synchrony on γ = −6μ does not move.
inline CriterionResult zero_velocity_line(const Options& opt) {
    constexpr double kTol = 1e-3;
    std::mt19937_64 rng(mix_seed(opt.seed, 2));
    const IntegratorConfig cfg{0.01, 500.0, 200.0, 10};
    double worst = 0.0;
    int passed = 0;
    for (int k = 0; k < 10; ++k) {
        ModelParams p;
        p.alpha = 0.1;
        p.mu = -0.2 - 0.2 * k;  // 3μ+γ = −3μ > 0
        p.gamma = -6.0 * p.mu;
        const Trajectory traj = integrate(detail::near_sync(rng, 0.2), p, cfg);
        const ObservableSummary s = summarize(traj);
        const double m = detail::max_abs_dev(s.mean_freq, 0.0);
        worst = std::max(worst, m);
        if (m < kTol && detail::synchronous(classify(s).tag)) ++passed;
    }
    return {2, "zero-velocity line", passed == 10,
            std::to_string(passed) + "/10 points synchronous with max|f|<1e-3, worst=" +
                detail::fmt(worst)};
}

/// Sign change of the leading transverse eigenvalue across the analytic lines.
inline CriterionResult stability_boundaries_check(const Options&) {
    constexpr double kTol = 0.02;
    bool ok = true;
    std::string info;
    for (const auto& [name, equilibrium, slope] :
         {std::tuple{"sync", sync_equilibrium(), -3.0}, std::tuple{"splay", splay_equilibrium(), 1.5}}) {
        for (double mu : {-1.0, 1.0}) {
            ModelParams p;
            p.mu = mu;
            auto f = [&](double g) {
                p.gamma = g;
                return max_transverse_real_part(jacobian_eigen(equilibrium, p));
            };
            const double expected = slope * mu;
            const auto root = detail::bisect(f, expected - 1.0, expected + 1.0);
            const bool hit = root && std::abs(*root - expected) < kTol;
            ok = ok && hit;
            info += std::string(name) + "@mu=" + detail::fmt(mu) + ": " +
                      (root ? "gamma*=" + detail::fmt(*root, 6) : std::string("no sign change")) +
                      " (line " + detail::fmt(expected) + "); ";
        }
    }
    return {3, "stability boundaries at zero lag", ok, detail::trimmed(info)};
}

/// 2+1 phase-locked branch along μ at γ = −3.
inline CriterionResult phase_locked_branch(const Options& opt) {
    constexpr double kDeltaTol = 5e-3;
    constexpr double kEndTol = 0.02;
    SweepSpec spec;
    spec.axis = SweepAxis::Mu;
    spec.start = -1.0;
    spec.end = 1.5;
    spec.n_steps = 200;
    spec.base.gamma = -3.0;
    spec.cfg = {0.01, 300.0, 200.0, 10};
    spec.seed = mix_seed(opt.seed, 4);
    const BifurcationBranch branch = sweep(spec);

    double worst = 0.0;
    int first = -1, last = -1;
    const auto& rec = branch.records;
    for (int k = 0; k < static_cast<int>(rec.size()); ++k) {
        const BranchRecord& r = rec[static_cast<std::size_t>(k)];
        if (r.label.tag != StateTag::PhaseLocked21) continue;
        if (first < 0) first = k;
        last = k;
        const double expected = std::acos((9.0 * r.param - 3.0) / 6.0);
        worst = std::max(worst, std::abs(std::abs(*r.label.delta) - expected));
    }
    bool ok = first > 0 && last + 1 < static_cast<int>(rec.size());
    double mu_lo = 0.0, mu_hi = 0.0;
    if (ok) {
        mu_lo = 0.5 * (rec[static_cast<std::size_t>(first - 1)].param + rec[static_cast<std::size_t>(first)].param);
        mu_hi = 0.5 * (rec[static_cast<std::size_t>(last)].param + rec[static_cast<std::size_t>(last + 1)].param);
        for (int k = first; k <= last; ++k)
            ok = ok && rec[static_cast<std::size_t>(k)].label.tag == StateTag::PhaseLocked21;
        ok = ok && worst < kDeltaTol && std::abs(mu_lo + 1.0 / 3.0) < kEndTol &&
             std::abs(mu_hi - 1.0) < kEndTol;
    }

    // Both rotation directions from mirrored starts (no kick, so the two
    // sweeps are exact mirror images).
    SweepSpec mirror = spec;
    mirror.start = 0.0;
    mirror.end = 0.9;
    mirror.n_steps = 10;
    mirror.kick = 0.0;
    mirror.initial = fresh_sweep_state(spec.seed, 99);
    const BifurcationBranch a = sweep(mirror);
    mirror.initial = detail::mirrored(*mirror.initial);
    const BifurcationBranch b = sweep(mirror);
    bool both = true;
    for (std::size_t k = 0; k < a.records.size(); ++k) {
        const double va = a.records[k].label.velocity.value_or(0.0);
        const double vb = b.records[k].label.velocity.value_or(0.0);
        both = both && a.records[k].label.tag == StateTag::PhaseLocked21 &&
               b.records[k].label.tag == StateTag::PhaseLocked21 && va * vb < 0.0;
    }
    ok = ok && both;
    return {4, "2+1 phase-locked branch", ok,
            "max|ddelta|=" + detail::fmt(worst) + ", endpoints mu=" + detail::fmt(mu_lo) + ", " +
                detail::fmt(mu_hi) + ", +/-Omega branches " + (both ? "found" : "missing")};
}

/// Rotating-wave/chimera switching.
inline CriterionResult switching_state(const Options& opt) {
    ModelParams p;
    p.mu = -4.5;
    p.gamma = -3.0;
    p.alpha = 0.1;
    const IntegratorConfig cfg{0.01, 1000.0, 5000.0, 10};
    int hits = 0;
    std::string alternations;
    for (int ic = 0; ic < 10; ++ic) {
        const Trajectory traj =
            integrate(random_initial_state(mix_seed(opt.seed, 5, ic)), p, cfg);
        const auto report = detect_switching(traj);
        const int alt = report ? report->alternations : 0;
        if (report && alt >= 3) ++hits;
        alternations += std::to_string(alt) + (ic < 9 ? "," : "");
    }
    return {5, "switching rotating wave / chimera", hits >= 7,
            std::to_string(hits) + "/10 runs switching (alternations " + alternations + ")"};
}

/// Hysteresis of the rotating wave against the 2+1 phase-locked state in α.
inline CriterionResult hysteresis(const Options& opt) {
    constexpr double kLossTol = 0.05;
    SweepSpec up;
    up.axis = SweepAxis::Alpha;
    up.start = 0.0;
    up.end = 1.8;
    up.n_steps = 200;
    up.base.gamma = 3.0;
    up.cfg = {0.01, 300.0, 200.0, 10};
    up.seed = mix_seed(opt.seed, 6);
    up.initial = splay_equilibrium();
    const BifurcationBranch bu = sweep(up);
    const BifurcationBranch bd = sweep(up.reversed());
    const auto intervals = detect_hysteresis(bu, bd);

    std::optional<double> loss;
    for (std::size_t k = 1; k < bu.records.size(); ++k) {
        if (bu.records[k - 1].label.tag == StateTag::RotatingWave &&
            bu.records[k].label.tag != StateTag::RotatingWave) {
            loss = 0.5 * (bu.records[k - 1].param + bu.records[k].param);
            break;
        }
    }
    // The upper end of the coexistence interval is where the wave dies, so
    // it shares the tolerance of the loss point.
    bool inside = !intervals.empty();
    std::string list;
    for (const ParamInterval& iv : intervals) {
        inside = inside && iv.lo > 0.0 && iv.hi < kPi / 2.0 + kLossTol;
        list += "[" + detail::fmt(iv.lo) + "," + detail::fmt(iv.hi) + "]";
    }
    const bool loss_ok = loss && std::abs(*loss - kPi / 2.0) < kLossTol;
    return {6, "rotating wave hysteresis", inside && loss_ok,
            "intervals " + (list.empty() ? std::string("none") : list) + ", wave lost at alpha=" +
                (loss ? detail::fmt(*loss) : std::string("never"))};
}

/// Chimera → synchrony jump on decreasing α.
inline CriterionResult chimera_jump(const Options& opt) {
    bool ok = true;
    std::string info;
    for (const auto& [mu, gamma] : {std::pair{3.0, -2.0}, std::pair{2.0, 2.0}}) {
        SweepSpec spec;
        spec.axis = SweepAxis::Alpha;
        spec.start = 1.8;
        spec.end = 0.0;
        spec.n_steps = 181;
        spec.base.mu = mu;
        spec.base.gamma = gamma;
        spec.cfg = {0.01, 300.0, 200.0, 10};
        spec.seed = mix_seed(opt.seed, 7);
        const auto& rec = sweep(spec).records;

        // Last chimera step before the branch becomes synchronous for good.
        std::size_t first_sync = rec.size();
        for (std::size_t k = rec.size(); k-- > 0;) {
            if (!detail::synchronous(rec[k].label.tag)) break;
            first_sync = k;
        }
        std::optional<std::size_t> last_chimera;
        for (std::size_t k = 0; k < first_sync; ++k)
            if (is_chimera(rec[k].label.tag)) last_chimera = k;
        const bool jump = first_sync < rec.size() && last_chimera &&
                          first_sync - *last_chimera <= 2;
        ok = ok && jump;
        info += "(" + detail::fmt(mu) + "," + detail::fmt(gamma) + "): ";
        if (jump)
            info += "chimera at alpha=" + detail::fmt(rec[*last_chimera].param) +
                      " -> sync at alpha=" + detail::fmt(rec[first_sync].param) + "; ";
        else
            info += "no direct chimera->sync jump; ";
    }
    return {7, "chimera to synchrony jump", ok, detail::trimmed(info)};
}

/// Repulsive coupling at large lag synchronizes every run.
inline CriterionResult global_synchrony(const Options& opt) {
    constexpr double kTol = 1e-6;
    ModelParams p;
    p.mu = -0.01;
    p.gamma = -0.01;
    p.alpha = 1.6;
    const IntegratorConfig cfg{0.01, 9900.0, 100.0, 10};
    double worst = 0.0;
    for (int ic = 0; ic < 20; ++ic) {
        const PhaseState end = settle(random_initial_state(mix_seed(opt.seed, 8, ic)), p, cfg);
        worst = std::max({worst, std::abs(end.omega[0] - end.omega[1]),
                          std::abs(end.omega[1] - end.omega[2])});
    }
    // Linear check on both sides of γ = −3μ at the same lag.
    ModelParams other = p;
    other.mu = 0.01;
    const double here = max_transverse_real_part(jacobian_eigen(sync_equilibrium(), p));
    const double there = max_transverse_real_part(jacobian_eigen(sync_equilibrium(), other));
    return {8, "global synchrony under repulsive coupling", worst < kTol,
            "max velocity difference " + detail::fmt(worst) +
                " over 20 runs; point lies in gamma < -3mu; leading transverse eigenvalue " +
                detail::fmt(here) + " here vs " + detail::fmt(there) + " at (0.01,-0.01)"};
}

/// Coarse α = 1.6 scan: chimeras in most cells.
inline CriterionResult chimera_dominance(const Options& opt) {
    ScanGrid grid;
    grid.n_mu = grid.n_gamma = 41;
    grid.alpha = 1.6;
    grid.n_ics = 1;
    grid.seed = mix_seed(opt.seed, 9);
    const IntegratorConfig cfg{0.02, 250.0, 150.0, 5};
    const ScanResult r = scan_plane(grid, ModelParams{}, cfg, {}, opt.jobs);
    int eligible = 0, chimera = 0;
    for (const ScanCellResult& c : r.cells) {
        if (c.blowup_count == c.total()) continue;
        ++eligible;
        if (c.has_chimera()) ++chimera;
    }
    const double frac = eligible ? static_cast<double>(chimera) / eligible : 0.0;
    return {9, "chimera dominance at alpha=1.6", frac > 0.5,
            std::to_string(chimera) + "/" + std::to_string(eligible) + " cells carry a chimera (" +
                detail::fmt(100.0 * frac, 3) + "%)"};
}

/// Peak sequences tell the rotating wave from the anti-phase chimera.
inline CriterionResult peak_discrimination(const Options& opt) {
    const IntegratorConfig cfg{0.01, 3000.0, 3000.0, 10};
    constexpr std::size_t kSkip = 2;
    bool ok = true;
    std::string info;
    struct Point {
        double mu, gamma;
        StateTag tag;
        std::size_t period;
    };
    for (const Point& pt : {Point{0.02, -0.02, StateTag::RotatingWave, 3},
                            Point{0.04, 0.08, StateTag::ChimeraAntiPhase, 2}}) {
        ModelParams p;
        p.mu = pt.mu;
        p.gamma = pt.gamma;
        p.alpha = 1.6;
        int good = 0;
        for (int ic = 0; ic < 3; ++ic) {
            const Trajectory traj =
                integrate(random_initial_state(mix_seed(opt.seed, 10, ic)), p, cfg);
            const StateTag tag = classify(summarize(traj)).tag;
            std::vector<int> seq;
            try {
                seq = peak_sequence(traj);
            } catch (const NoPeaksError&) {
                continue;
            }
            const std::set<int> used(seq.begin() + static_cast<std::ptrdiff_t>(std::min(kSkip, seq.size())),
                                     seq.end());
            if (tag == pt.tag && sequence_period(seq, kSkip) == pt.period && used.size() == pt.period)
                ++good;
        }
        ok = ok && good == 3;
        info += std::string(to_string(pt.tag)) + " (" + detail::fmt(pt.mu) + "," +
                  detail::fmt(pt.gamma) + "): " + std::to_string(good) + "/3 period-" +
                  std::to_string(pt.period) + "; ";
    }
    return {10, "peak-sequence discrimination", ok, detail::trimmed(info)};
}

/// RK4 convergence order and scheduling-independent scans.
inline CriterionResult numerics(const Options& opt) {
    ModelParams p;
    p.mu = 1.0;
    p.gamma = 3.0;
    p.alpha = 0.5;
    const PhaseState s0{{0.3, -1.1, 2.0}, {0.5, -0.2, 0.1}};
    auto run = [&](double dt) {
        PhaseState s = s0;
        const auto steps = std::llround(20.0 / dt);
        for (long long k = 0; k < steps; ++k) s = rk4_step(s, p, dt);
        return s;
    };
    auto diff = [](const PhaseState& a, const PhaseState& b) {
        double d = 0.0;
        for (std::size_t i = 0; i < kOscillators; ++i)
            d = std::max({d, std::abs(a.theta[i] - b.theta[i]), std::abs(a.omega[i] - b.omega[i])});
        return d;
    };
    const PhaseState x1 = run(0.04), x2 = run(0.02), x3 = run(0.01);
    const double ratio = diff(x1, x2) / diff(x2, x3);

    ScanGrid grid;
    grid.n_mu = grid.n_gamma = 6;
    grid.alpha = 0.3;
    grid.n_ics = 2;
    grid.seed = mix_seed(opt.seed, 11);
    const IntegratorConfig cfg{0.01, 100.0, 100.0, 10};
    const std::string one = scan_csv(scan_plane(grid, ModelParams{}, cfg, {}, 1));
    const std::string four = scan_csv(scan_plane(grid, ModelParams{}, cfg, {}, 4));
    const bool same = one == four;
    return {11, "RK4 step halving and scan determinism", ratio >= 12.0 && ratio <= 20.0 && same,
            "error ratio " + detail::fmt(ratio) + ", jobs 1 vs 4 CSV " +
                (same ? "identical" : "DIFFERENT")};
}

using Check = CriterionResult (*)(const Options&);

inline const std::vector<Check>& all_checks() {
    static const std::vector<Check> checks{
        synchronous_velocity, zero_velocity_line, stability_boundaries_check,
        phase_locked_branch,  switching_state,    hysteresis,
        chimera_jump,         global_synchrony,   chimera_dominance,
        peak_discrimination,  numerics,
    };
    return checks;
}

inline std::string format_line(const CriterionResult& r) {
    return std::string(r.passed ? "PASS" : "FAIL") + " [" + std::to_string(r.id) + "] " + r.name +
           ": " + r.detail;
}

}  // namespace kuramoto3::acceptance
