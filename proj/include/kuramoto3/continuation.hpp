#pragma once

// One-parameter sweeps with warm starts, and hysteresis between sweep
// directions.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "classifier.hpp"
#include "errors.hpp"
#include "integrator.hpp"
#include "io.hpp"
#include "model.hpp"
#include "observe.hpp"

namespace kuramoto3 {

enum class SweepAxis { Mu, Alpha };
enum class InitialPolicy { Inherit, FreshRandom };

inline std::string_view to_string(SweepAxis a) { return a == SweepAxis::Mu ? "mu" : "alpha"; }
inline std::string_view to_string(InitialPolicy p) {
    return p == InitialPolicy::Inherit ? "Inherit" : "FreshRandom";
}

struct SweepSpec {
    SweepAxis axis = SweepAxis::Mu;
    double start = 0.0;
    double end = 1.0;
    int n_steps = 200;
    ModelParams base;
    IntegratorConfig cfg{0.01, 1000.0, 1000.0, 10};
    ClassifierTolerances tol;
    InitialPolicy policy = InitialPolicy::Inherit;
    std::uint64_t seed = 1;
    std::optional<PhaseState> initial;  // first step; random from (seed, 0) when absent
    double kick = 1e-6;  // phase perturbation amplitude applied to inherited states

    void validate(std::string_view prefix = "sweep") const {
        auto field = [&](std::string_view name) {
            return std::string(prefix) + "." + std::string(name);
        };
        if (!std::isfinite(start) || !std::isfinite(end) || start == end)
            throw ValidationError(field("end"), "must be finite and differ from start");
        if (n_steps < 2) throw ValidationError(field("n_steps"), "must be >= 2");
        if (axis == SweepAxis::Alpha) {
            for (double a : {start, end})
                if (!(a >= 0.0 && a < kPi))
                    throw ValidationError(field(a == start ? "start" : "end"),
                                          "alpha must lie in [0, pi)");
        }
        if (!(kick >= 0.0) || !std::isfinite(kick)) throw ValidationError(field("kick"), "must be >= 0");
        if (initial && !initial->finite()) throw ValidationError(field("initial"), "must be finite");
        ModelParams p = base;
        if (axis == SweepAxis::Mu) p.mu = start;
        else p.alpha = start;
        p.validate("model");
        cfg.validate("integrator");
        tol.validate("classifier");
    }

    double value_at(int k) const {
        return k == n_steps - 1 ? end : start + (end - start) * k / (n_steps - 1);
    }

    ModelParams params_at(int k) const {
        ModelParams p = base;
        (axis == SweepAxis::Mu ? p.mu : p.alpha) = value_at(k);
        return p;
    }

    /// Same sweep run in the opposite direction.
    SweepSpec reversed() const {
        SweepSpec r = *this;
        std::swap(r.start, r.end);
        r.initial.reset();
        return r;
    }
};

struct BranchRecord {
    double param = 0.0;
    ObservableSummary summary;
    StateLabel label;
    PhaseState state;  // last recorded state
    bool blowup = false;
};

struct BifurcationBranch {
    SweepAxis axis = SweepAxis::Mu;
    std::vector<BranchRecord> records;  // in sweep order
};

inline PhaseState fresh_sweep_state(std::uint64_t seed, int step) {
    return random_initial_state(mix_seed(seed, 0x5eedULL, step));
}

/// Inherited state with each phase nudged by up to ±amplitude, so that a
/// warm start sitting exactly on an invariant set that lost stability can
/// leave it.
inline PhaseState kicked(PhaseState s, double amplitude, std::uint64_t seed, int step) {
    if (amplitude == 0.0) return s;
    std::mt19937_64 rng(mix_seed(seed, 0x6b69636bULL, step));
    std::uniform_real_distribution<double> u(-amplitude, amplitude);
    for (double& th : s.theta) th += u(rng);
    return s;
}

/// Runs the sweep. With Inherit each step starts from the previous step's
/// final state (phases rewrapped, then kicked). A blow-up is recorded and the
/// next step restarts from a fresh random state.
inline BifurcationBranch sweep(const SweepSpec& spec) {
    spec.validate();
    BifurcationBranch branch;
    branch.axis = spec.axis;
    branch.records.reserve(static_cast<std::size_t>(spec.n_steps));

    PhaseState state = spec.initial ? *spec.initial : fresh_sweep_state(spec.seed, 0);
    for (int k = 0; k < spec.n_steps; ++k) {
        if (k > 0 && spec.policy == InitialPolicy::FreshRandom)
            state = fresh_sweep_state(spec.seed, k);
        else if (k > 0 && !branch.records.back().blowup)
            state = kicked(state, spec.kick, spec.seed, k);
        const Observation obs = observe(state, spec.params_at(k), spec.cfg, spec.tol);

        BranchRecord rec;
        rec.param = spec.value_at(k);
        rec.summary = obs.summary;
        rec.label = obs.label;
        rec.state = obs.final_state;
        rec.blowup = obs.blowup;
        branch.records.push_back(rec);

        state = obs.blowup ? fresh_sweep_state(spec.seed, k + 1) : rewrapped(obs.final_state);
    }
    return branch;
}

struct ParamInterval {
    double lo;
    double hi;
};

namespace detail {

inline bool records_differ(const BranchRecord& a, const BranchRecord& b,
                           const ClassifierTolerances& tol) {
    if (a.blowup || b.blowup) return a.blowup != b.blowup;
    if (a.label.tag != b.label.tag) return true;
    auto fa = a.summary.mean_freq;
    auto fb = b.summary.mean_freq;
    std::sort(fa.begin(), fa.end());
    std::sort(fb.begin(), fb.end());
    for (std::size_t i = 0; i < 3; ++i)
        if (std::abs(fa[i] - fb[i]) > tol.min_freq_gap) return true;
    return false;
}

}  // namespace detail

/// Maximal parameter intervals on which the up and down branches disagree in
/// tag or in (index-sorted) mean frequencies. `down` must visit the same
/// parameter values as `up` in reverse order.
inline std::vector<ParamInterval> detect_hysteresis(const BifurcationBranch& up,
                                                    const BifurcationBranch& down,
                                                    const ClassifierTolerances& tol = {}) {
    const std::size_t n = up.records.size();
    if (up.axis != down.axis || down.records.size() != n)
        throw MismatchedGridsError("branches differ in axis or step count");
    for (std::size_t k = 0; k < n; ++k) {
        const double a = up.records[k].param;
        const double b = down.records[n - 1 - k].param;
        if (std::abs(a - b) > 1e-9 * std::max(1.0, std::abs(a)))
            throw MismatchedGridsError("branches visit different parameter values");
    }

    std::vector<ParamInterval> out;
    std::optional<ParamInterval> open;
    for (std::size_t k = 0; k < n; ++k) {
        const double p = up.records[k].param;
        if (detail::records_differ(up.records[k], down.records[n - 1 - k], tol)) {
            if (open) {
                open->lo = std::min(open->lo, p);
                open->hi = std::max(open->hi, p);
            } else {
                open = ParamInterval{p, p};
            }
        } else if (open) {
            out.push_back(*open);
            open.reset();
        }
    }
    if (open) out.push_back(*open);
    return out;
}

/// First parameter (in sweep order) whose label is a chimera.
inline std::optional<double> chimera_onset(const BifurcationBranch& branch) {
    for (const BranchRecord& r : branch.records)
        if (!r.blowup && is_chimera(r.label.tag)) return r.param;
    return std::nullopt;
}

inline std::string branch_csv(const BifurcationBranch& branch) {
    std::string out =
        "param,label,mean_freq_1,mean_freq_2,mean_freq_3,pair_diff_12,pair_diff_23,pair_diff_13,delta\n";
    for (const BranchRecord& r : branch.records) {
        out += format_double(r.param);
        out += ',';
        out += to_string(r.label.tag);
        for (double v : r.summary.mean_freq) out += ',' + format_double(v);
        for (double v : r.summary.pair_diff_mean) out += ',' + format_double(v);
        out += ',';
        if (r.label.tag == StateTag::PhaseLocked21 && r.label.delta)
            out += format_double(*r.label.delta);
        out += '\n';
    }
    return out;
}

}  // namespace kuramoto3
