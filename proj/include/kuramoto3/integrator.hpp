#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "errors.hpp"
#include "model.hpp"

namespace kuramoto3 {

struct IntegratorConfig {
    double dt = 0.01;
    double t_transient = 2000.0;  // integrated, not recorded
    double t_measure = 2000.0;    // recorded
    int record_stride = 10;

    void validate(std::string_view prefix = "integrator") const {
        auto field = [&](std::string_view name) {
            return std::string(prefix) + "." + std::string(name);
        };
        if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError(field("dt"), "must be > 0");
        if (!(t_transient >= 0.0) || !std::isfinite(t_transient))
            throw ValidationError(field("t_transient"), "must be >= 0");
        if (!(t_measure >= 100.0 * dt) || !std::isfinite(t_measure))
            throw ValidationError(field("t_measure"), "must be >= 100*dt");
        if (record_stride < 1) throw ValidationError(field("record_stride"), "must be >= 1");
    }

    std::int64_t transient_steps() const { return std::llround(t_transient / dt); }
    std::int64_t measure_steps() const { return std::llround(t_measure / dt); }
};

/// Uniformly sampled, unwrapped trajectory.
struct Trajectory {
    double t0 = 0.0;
    double dt_rec = 0.0;
    std::vector<PhaseState> samples;

    double time(std::size_t i) const { return t0 + dt_rec * static_cast<double>(i); }
    double t_end() const { return samples.empty() ? t0 : time(samples.size() - 1); }
    std::size_t size() const { return samples.size(); }
};

/// One classic fourth-order Runge-Kutta step.
inline PhaseState rk4_step(const PhaseState& s, const ModelParams& p, double dt) {
    auto shifted = [](const PhaseState& base, const Derivative& d, double h) {
        PhaseState out;
        for (std::size_t i = 0; i < kOscillators; ++i) {
            out.theta[i] = base.theta[i] + h * d.dtheta[i];
            out.omega[i] = base.omega[i] + h * d.domega[i];
        }
        return out;
    };
    const Derivative k1 = rhs(s, p);
    const Derivative k2 = rhs(shifted(s, k1, 0.5 * dt), p);
    const Derivative k3 = rhs(shifted(s, k2, 0.5 * dt), p);
    const Derivative k4 = rhs(shifted(s, k3, dt), p);

    PhaseState out;
    const double w = dt / 6.0;
    for (std::size_t i = 0; i < kOscillators; ++i) {
        out.theta[i] = s.theta[i] +
                       w * (k1.dtheta[i] + 2.0 * k2.dtheta[i] + 2.0 * k3.dtheta[i] + k4.dtheta[i]);
        out.omega[i] = s.omega[i] +
                       w * (k1.domega[i] + 2.0 * k2.domega[i] + 2.0 * k3.domega[i] + k4.domega[i]);
    }
    return out;
}

namespace detail {

inline PhaseState advance(PhaseState s, const ModelParams& p, double dt, std::int64_t steps,
                          double t_start) {
    for (std::int64_t k = 0; k < steps; ++k) {
        s = rk4_step(s, p, dt);
        if (!s.finite()) throw NonFiniteError(t_start + dt * static_cast<double>(k + 1));
    }
    return s;
}

}  // namespace detail

/// Integrates for t_transient (discarded) then records t_measure, keeping
/// every record_stride-th step. The first sample is the state at the end of
/// the transient; time is measured from the start of the run.
inline Trajectory integrate(const PhaseState& state0, const ModelParams& params,
                            const IntegratorConfig& cfg) {
    params.validate();
    cfg.validate();
    const std::int64_t n_transient = cfg.transient_steps();
    PhaseState s = detail::advance(state0, params, cfg.dt, n_transient, 0.0);

    Trajectory traj;
    traj.t0 = cfg.dt * static_cast<double>(n_transient);
    traj.dt_rec = cfg.dt * cfg.record_stride;
    const std::int64_t n_records = cfg.measure_steps() / cfg.record_stride;
    traj.samples.reserve(static_cast<std::size_t>(n_records + 1));
    traj.samples.push_back(s);
    for (std::int64_t r = 0; r < n_records; ++r) {
        const double t = traj.t0 + traj.dt_rec * static_cast<double>(r);
        s = detail::advance(s, params, cfg.dt, cfg.record_stride, t);
        traj.samples.push_back(s);
    }
    return traj;
}

/// State after t_transient + t_measure, nothing recorded.
inline PhaseState settle(const PhaseState& state0, const ModelParams& params,
                         const IntegratorConfig& cfg) {
    params.validate();
    cfg.validate();
    return detail::advance(state0, params, cfg.dt, cfg.transient_steps() + cfg.measure_steps(),
                           0.0);
}

}  // namespace kuramoto3
