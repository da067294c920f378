#pragma once

// Shared plumbing for scans and sweeps: deterministic random initial
// conditions and "integrate, summarize, classify" in one call.

#include <cmath>
#include <cstdint>
#include <random>

#include "classifier.hpp"
#include "integrator.hpp"
#include "model.hpp"

namespace kuramoto3 {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Folds a list of words into one stream seed.
template <typename... Words>
constexpr std::uint64_t mix_seed(std::uint64_t seed, Words... words) {
    std::uint64_t h = splitmix64(seed);
    ((h = splitmix64(h ^ static_cast<std::uint64_t>(words))), ...);
    return h;
}

/// Parameter coordinate quantized to 1e-9 so that the same (μ,γ) reached
/// through different grid arithmetic keys the same random stream.
inline std::int64_t coordinate_key(double v) { return std::llround(v * 1e9); }

/// θ_i uniform on [0, 2π), ω_i uniform on [−1, 1].
inline PhaseState random_initial_state(std::uint64_t stream_seed) {
    std::mt19937_64 rng(stream_seed);
    std::uniform_real_distribution<double> phase(0.0, kTwoPi);
    std::uniform_real_distribution<double> velocity(-1.0, 1.0);
    PhaseState s;
    for (std::size_t i = 0; i < kOscillators; ++i) {
        s.theta[i] = phase(rng);
        s.omega[i] = velocity(rng);
    }
    return s;
}

/// Phases mapped to (−π, π]; keeps long inherited runs away from huge
/// arguments without changing the dynamics.
inline PhaseState rewrapped(PhaseState s) {
    for (double& th : s.theta) th = wrap_angle(th);
    return s;
}

struct Observation {
    ObservableSummary summary;
    StateLabel label;
    PhaseState final_state;
    bool blowup = false;
};

/// Integrates, summarizes the recorded window and classifies it. Windows
/// that come out Unclassified or as a modulated (non-rigid) rotating wave
/// get a switching analysis when long enough.
inline Observation observe(const PhaseState& state0, const ModelParams& params,
                           const IntegratorConfig& cfg, const ClassifierTolerances& tol) {
    Observation out;
    Trajectory traj;
    try {
        traj = integrate(state0, params, cfg);
    } catch (const NonFiniteError&) {
        out.blowup = true;
        out.final_state = state0;
        return out;
    }
    out.summary = summarize(traj);
    out.label = classify(out.summary, tol);
    out.final_state = traj.samples.back();

    bool modulated = out.label.tag == StateTag::Unclassified;
    if (out.label.tag == StateTag::RotatingWave) {
        for (double sp : out.summary.freq_spread) modulated = modulated || sp >= tol.tol_freq_equal;
    }
    if (modulated && traj.t_end() - traj.t0 >= 10.0 * tol.switching_window) {
        if (auto report = detect_switching(traj, tol)) out.label = report->label;
    }
    return out;
}

}  // namespace kuramoto3
