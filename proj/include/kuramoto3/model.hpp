#pragma once

// Three Kuramoto oscillators with inertia, coupled pairwise and through
// 2-simplex (triadic) terms:
//
//   m θ̈_i + ε θ̇_i = (μ/N) Σ_j sin(θ_j − θ_i − α)
//                  + (γ/2N²) Σ_j Σ_k sin(θ_j + θ_k − 2θ_i − α)
//
// By default the sums skip self-terms (j≠i, k≠i, j≠k). That is the only
// reading under which the synchronous manifold rotates at
// ω_s = −((6μ+γ)/(9ε)) sin α. The literal all-index reading is kept as a
// switch.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <cstddef>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"

namespace kuramoto3 {

inline constexpr std::size_t kOscillators = 3;
inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Maps an angle to (−π, π].
inline double wrap_angle(double x) {
    double y = std::remainder(x, kTwoPi);
    if (y <= -kPi) y += kTwoPi;
    return y;
}

enum class SumConvention { ExcludeSelf, Literal };

inline std::string_view to_string(SumConvention c) {
    return c == SumConvention::ExcludeSelf ? "ExcludeSelf" : "Literal";
}

struct ModelParams {
    double m = 1.0;
    double epsilon = 0.1;
    double mu = 0.0;
    double gamma = 0.0;
    double alpha = 0.0;
    int n = static_cast<int>(kOscillators);
    SumConvention convention = SumConvention::ExcludeSelf;

    /// Throws ValidationError naming the offending field.
    void validate(std::string_view prefix = "model") const {
        auto field = [&](std::string_view name) {
            return std::string(prefix) + "." + std::string(name);
        };
        if (!(m > 0.0) || !std::isfinite(m)) throw ValidationError(field("m"), "must be > 0");
        if (!(epsilon > 0.0) || !std::isfinite(epsilon))
            throw ValidationError(field("epsilon"), "must be > 0");
        if (!std::isfinite(mu)) throw ValidationError(field("mu"), "must be finite");
        if (!std::isfinite(gamma)) throw ValidationError(field("gamma"), "must be finite");
        if (!(alpha >= 0.0 && alpha < kPi))
            throw ValidationError(field("alpha"), "must lie in [0, pi)");
        if (n != static_cast<int>(kOscillators)) throw ValidationError(field("n"), "must be 3");
    }
};

struct PhaseState {
    std::array<double, kOscillators> theta{};  // unwrapped
    std::array<double, kOscillators> omega{};

    bool finite() const {
        for (std::size_t i = 0; i < kOscillators; ++i)
            if (!std::isfinite(theta[i]) || !std::isfinite(omega[i])) return false;
        return true;
    }

    friend bool operator==(const PhaseState&, const PhaseState&) = default;
};

struct Derivative {
    std::array<double, kOscillators> dtheta{};
    std::array<double, kOscillators> domega{};
};

/// Right-hand side of the first-order system (θ̇ = ω, ω̇ = …).
///
/// The sums are evaluated through z_j = e^{iθ_j}: the pairwise sum is
/// Im(e^{−iα} z̄_i Σ z_j) and the ordered-pair triadic sum over a set S is
/// Im(e^{−iα} z̄_i² ((Σ_S z)² − Σ_S z²)), so only three sincos calls are
/// needed per evaluation.
inline Derivative rhs(const PhaseState& s, const ModelParams& p) {
    using cplx = std::complex<double>;
    constexpr double n = static_cast<double>(kOscillators);

    std::array<cplx, kOscillators> z;
    cplx sum{0.0, 0.0};
    cplx sum_sq{0.0, 0.0};
    for (std::size_t i = 0; i < kOscillators; ++i) {
        z[i] = cplx(std::cos(s.theta[i]), std::sin(s.theta[i]));
        sum += z[i];
        sum_sq += z[i] * z[i];
    }
    const cplx lag(std::cos(p.alpha), -std::sin(p.alpha));
    const double pair_gain = p.mu / n;
    const double triad_gain = p.gamma / (2.0 * n * n);

    Derivative d;
    for (std::size_t i = 0; i < kOscillators; ++i) {
        const cplx zc = std::conj(z[i]);
        cplx pair_sum;
        cplx triad_sum;
        if (p.convention == SumConvention::ExcludeSelf) {
            pair_sum = sum - z[i];
            triad_sum = pair_sum * pair_sum - (sum_sq - z[i] * z[i]);
        } else {
            pair_sum = sum;
            triad_sum = sum * sum;
        }
        const double coupling = pair_gain * std::imag(lag * zc * pair_sum) +
                                triad_gain * std::imag(lag * zc * zc * triad_sum);
        d.dtheta[i] = s.omega[i];
        d.domega[i] = (coupling - p.epsilon * s.omega[i]) / p.m;
    }
    return d;
}

/// Angular velocity of the fully synchronized rotation,
/// ω_s = −((6μ+γ)/(9ε)) sin α. Sign is reported as-is.
inline double sync_velocity(const ModelParams& p) {
    return -((6.0 * p.mu + p.gamma) / (9.0 * p.epsilon)) * std::sin(p.alpha);
}

enum class BoundaryKind { Synchrony, Splay, ZeroVelocity };

enum class Applicability { AnyAlpha, ZeroLagOnly };

/// A reference line γ = slope·μ in the (μ,γ) plane.
struct BoundaryLine {
    BoundaryKind kind;
    double slope;
    Applicability applies;

    double gamma_at(double mu) const { return slope * mu; }

    bool applies_at(double alpha) const {
        return applies == Applicability::AnyAlpha || alpha == 0.0;
    }
};

inline std::string_view to_string(BoundaryKind k) {
    switch (k) {
        case BoundaryKind::Synchrony: return "synchrony";
        case BoundaryKind::Splay: return "splay";
        case BoundaryKind::ZeroVelocity: return "zero_velocity";
    }
    return "?";
}

/// The synchrony line γ = −3μ, the splay line γ = (3/2)μ (zero lag only)
/// and the zero-velocity line γ = −6μ. `alpha` is accepted for symmetry with
/// callers; the returned set is the same for every lag and carries its own
/// applicability tags.
inline std::vector<BoundaryLine> stability_boundaries(double /*alpha*/) {
    return {
        {BoundaryKind::Synchrony, -3.0, Applicability::AnyAlpha},
        {BoundaryKind::Splay, 1.5, Applicability::ZeroLagOnly},
        {BoundaryKind::ZeroVelocity, -6.0, Applicability::AnyAlpha},
    };
}

struct PhaseLockedOffset {
    double delta;  // offset of the detached oscillator, in [0, π]
    double omega;  // common rotation velocity Ω
};

/// Closed form of the 2+1 phase-locked rotation at zero lag, from the ansatz
/// θ1 = θ2 = Ωt, θ3 = Ωt + δ:
///   cos δ = −(9μ+γ)/(2γ),  Ω = ((3μ+γ)/(9ε)) sin δ.
/// (−δ, −Ω) is the mirrored, opposite-rotation branch. Empty when |cos δ| > 1.
inline std::optional<PhaseLockedOffset> phase_locked_offset(const ModelParams& p) {
    if (p.alpha != 0.0 || p.convention != SumConvention::ExcludeSelf || p.gamma == 0.0)
        throw std::invalid_argument(
            "phase_locked_offset requires alpha=0, ExcludeSelf and gamma!=0");
    const double c = -(9.0 * p.mu + p.gamma) / (2.0 * p.gamma);
    if (!(std::abs(c) <= 1.0)) return std::nullopt;
    const double delta = std::acos(c);
    return PhaseLockedOffset{delta, ((3.0 * p.mu + p.gamma) / (9.0 * p.epsilon)) * std::sin(delta)};
}

/// State on the rigidly rotating 2+1 ansatz at time t (oscillator 3 detached).
inline PhaseState phase_locked_state(const PhaseLockedOffset& pl, double t = 0.0) {
    const double base = pl.omega * t;
    return {{base, base, base + pl.delta}, {pl.omega, pl.omega, pl.omega}};
}

inline PhaseState sync_equilibrium(double phase = 0.0) {
    return {{phase, phase, phase}, {0.0, 0.0, 0.0}};
}

inline PhaseState splay_equilibrium(double phase = 0.0) {
    return {{phase, phase + kTwoPi / 3.0, phase + 2.0 * kTwoPi / 3.0}, {0.0, 0.0, 0.0}};
}

/// Oscillators 1 and 2 together, oscillator 3 opposite.
inline PhaseState antipodal_equilibrium(double phase = 0.0) {
    return {{phase, phase, phase + kPi}, {0.0, 0.0, 0.0}};
}

using Matrix6 = Eigen::Matrix<double, 6, 6>;
using Vector6 = Eigen::Matrix<double, 6, 1>;

inline Vector6 to_vector(const PhaseState& s) {
    Vector6 v;
    for (std::size_t i = 0; i < kOscillators; ++i) {
        v(static_cast<Eigen::Index>(i)) = s.theta[i];
        v(static_cast<Eigen::Index>(i + kOscillators)) = s.omega[i];
    }
    return v;
}

inline PhaseState from_vector(const Vector6& v) {
    PhaseState s;
    for (std::size_t i = 0; i < kOscillators; ++i) {
        s.theta[i] = v(static_cast<Eigen::Index>(i));
        s.omega[i] = v(static_cast<Eigen::Index>(i + kOscillators));
    }
    return s;
}

inline Vector6 flow(const Vector6& x, const ModelParams& p) {
    const Derivative d = rhs(from_vector(x), p);
    Vector6 out;
    for (std::size_t i = 0; i < kOscillators; ++i) {
        out(static_cast<Eigen::Index>(i)) = d.dtheta[i];
        out(static_cast<Eigen::Index>(i + kOscillators)) = d.domega[i];
    }
    return out;
}

inline constexpr double kJacobianStep = 1e-6;

/// Central-difference Jacobian of the 6-dimensional flow.
inline Matrix6 jacobian(const PhaseState& s, const ModelParams& p, double h = kJacobianStep) {
    const Vector6 x = to_vector(s);
    Matrix6 jac;
    for (Eigen::Index c = 0; c < 6; ++c) {
        Vector6 xp = x;
        Vector6 xm = x;
        xp(c) += h;
        xm(c) -= h;
        jac.col(c) = (flow(xp, p) - flow(xm, p)) / (2.0 * h);
    }
    return jac;
}

using Eigenvalues = std::array<std::complex<double>, 6>;

/// Eigenvalues of the finite-difference Jacobian, sorted by descending real
/// part (then descending imaginary part).
inline Eigenvalues jacobian_eigen(const PhaseState& s, const ModelParams& p,
                                  double h = kJacobianStep) {
    Eigen::EigenSolver<Matrix6> solver(jacobian(s, p, h), /*computeEigenvectors=*/false);
    Eigenvalues ev;
    for (Eigen::Index i = 0; i < 6; ++i) ev[static_cast<std::size_t>(i)] = solver.eigenvalues()(i);
    std::stable_sort(ev.begin(), ev.end(), [](const auto& a, const auto& b) {
        if (a.real() != b.real()) return a.real() > b.real();
        return a.imag() > b.imag();
    });
    return ev;
}

/// Index of the phase-shift symmetry mode: smallest |λ|, first index on ties.
inline std::size_t symmetry_mode_index(const Eigenvalues& ev) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < ev.size(); ++i)
        if (std::abs(ev[i]) < std::abs(ev[best])) best = i;
    return best;
}

/// Largest real part among the five eigenvalues left after removing the
/// symmetry mode. Negative means linearly stable.
inline double max_transverse_real_part(const Eigenvalues& ev) {
    const std::size_t skip = symmetry_mode_index(ev);
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < ev.size(); ++i)
        if (i != skip) best = std::max(best, ev[i].real());
    return best;
}

}  // namespace kuramoto3
