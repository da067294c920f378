#pragma once

// Trajectory observables and the collective-state taxonomy.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "integrator.hpp"
#include "model.hpp"

namespace kuramoto3 {

/// Oscillator pairs in reporting order: (1,2), (2,3), (1,3).
inline constexpr std::array<std::pair<std::size_t, std::size_t>, 3> kPairs{
    {{0, 1}, {1, 2}, {0, 2}}};

enum class StateTag {
    SyncFixedPoint,
    SyncRotation,
    Splay,
    RotatingWave,
    Antipodal21,
    PhaseLocked21,
    ChimeraInPhase,
    ChimeraAntiPhase,
    SwitchingRotChimera,
    Unclassified,
};

inline constexpr std::size_t kStateTagCount = 10;

inline constexpr std::array<StateTag, kStateTagCount> kAllTags{
    StateTag::SyncFixedPoint,   StateTag::SyncRotation,    StateTag::Splay,
    StateTag::RotatingWave,     StateTag::Antipodal21,     StateTag::PhaseLocked21,
    StateTag::ChimeraInPhase,   StateTag::ChimeraAntiPhase, StateTag::SwitchingRotChimera,
    StateTag::Unclassified,
};

inline std::string_view to_string(StateTag t) {
    switch (t) {
        case StateTag::SyncFixedPoint: return "SyncFixedPoint";
        case StateTag::SyncRotation: return "SyncRotation";
        case StateTag::Splay: return "Splay";
        case StateTag::RotatingWave: return "RotatingWave";
        case StateTag::Antipodal21: return "Antipodal21";
        case StateTag::PhaseLocked21: return "PhaseLocked21";
        case StateTag::ChimeraInPhase: return "ChimeraInPhase";
        case StateTag::ChimeraAntiPhase: return "ChimeraAntiPhase";
        case StateTag::SwitchingRotChimera: return "SwitchingRotChimera";
        case StateTag::Unclassified: return "Unclassified";
    }
    return "Unclassified";
}

inline std::optional<StateTag> tag_from_string(std::string_view s) {
    for (StateTag t : kAllTags)
        if (to_string(t) == s) return t;
    return std::nullopt;
}

inline bool is_chimera(StateTag t) {
    return t == StateTag::ChimeraInPhase || t == StateTag::ChimeraAntiPhase;
}

struct StateLabel {
    StateTag tag = StateTag::Unclassified;
    std::optional<double> velocity;  // signed mean velocity
    std::optional<double> delta;     // PhaseLocked21 offset of the detached oscillator
    std::optional<int> detached;     // 1-based index of the detached oscillator
};

struct ClassifierTolerances {
    double tol_velocity_zero = 1e-4;
    double tol_phase_equal = 1e-2;
    double tol_freq_equal = 1e-3;
    double min_freq_gap = 1e-2;
    double tol_splay_spacing = 5e-2;
    double switching_window = 100.0;
    int min_alternations = 3;

    void validate(std::string_view prefix = "classifier") const {
        auto field = [&](std::string_view name) {
            return std::string(prefix) + "." + std::string(name);
        };
        auto positive = [&](double v, std::string_view name) {
            if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError(field(name), "must be > 0");
        };
        positive(tol_velocity_zero, "tol_velocity_zero");
        positive(tol_phase_equal, "tol_phase_equal");
        positive(tol_freq_equal, "tol_freq_equal");
        positive(min_freq_gap, "min_freq_gap");
        positive(tol_splay_spacing, "tol_splay_spacing");
        positive(switching_window, "switching_window");
        if (min_alternations < 1) throw ValidationError(field("min_alternations"), "must be >= 1");
        if (!(min_freq_gap > tol_freq_equal))
            throw ValidationError(field("min_freq_gap"), "must exceed tol_freq_equal");
    }
};

struct ObservableSummary {
    std::array<double, 3> mean_freq{};
    std::array<double, 3> freq_spread{};
    std::array<double, 3> pair_diff_mean{};    // circular mean, (−π, π]
    std::array<double, 3> pair_diff_spread{};  // circular std
    double max_speed = 0.0;

    bool finite() const {
        for (std::size_t i = 0; i < 3; ++i)
            if (!std::isfinite(mean_freq[i]) || !std::isfinite(freq_spread[i]) ||
                !std::isfinite(pair_diff_mean[i]) || !std::isfinite(pair_diff_spread[i]))
                return false;
        return std::isfinite(max_speed);
    }
};

inline constexpr std::size_t kMinWindowSamples = 100;

namespace detail {

struct CircularStats {
    double mean;
    double spread;
};

inline CircularStats circular_stats(double sum_cos, double sum_sin, std::size_t count) {
    const double c = sum_cos / static_cast<double>(count);
    const double s = sum_sin / static_cast<double>(count);
    const double r = std::min(1.0, std::hypot(c, s));
    const double spread = r > 0.0 ? std::sqrt(-2.0 * std::log(r)) : kPi;
    return {wrap_angle(std::atan2(s, c)), spread};
}

/// Sample index range [first, last] covering the time window.
inline std::pair<std::size_t, std::size_t> window_indices(const Trajectory& traj, double t_begin,
                                                          double t_end) {
    if (traj.samples.empty() || !(t_end > t_begin))
        throw WindowTooShortError("empty summary window");
    const double slack = 1e-9 * std::max(1.0, std::abs(traj.t_end()));
    if (t_begin < traj.t0 - slack || t_end > traj.t_end() + slack)
        throw WindowTooShortError("summary window outside trajectory extent");
    const auto first =
        static_cast<std::size_t>(std::max(0.0, std::ceil((t_begin - traj.t0) / traj.dt_rec - 1e-9)));
    const auto last = std::min(
        traj.samples.size() - 1,
        static_cast<std::size_t>(std::floor((t_end - traj.t0) / traj.dt_rec + 1e-9)));
    if (last < first || last - first + 1 < kMinWindowSamples)
        throw WindowTooShortError("summary window holds fewer than 100 samples");
    return {first, last};
}

inline ObservableSummary summarize_range(const Trajectory& traj, std::size_t first,
                                         std::size_t last) {
    const std::size_t count = last - first + 1;
    const PhaseState& a = traj.samples[first];
    const PhaseState& b = traj.samples[last];
    const double span = traj.dt_rec * static_cast<double>(last - first);

    ObservableSummary out;
    std::array<double, 3> sum{}, sum_sq{}, pc{}, ps{};
    double max_speed = 0.0;
    for (std::size_t k = first; k <= last; ++k) {
        const PhaseState& s = traj.samples[k];
        for (std::size_t i = 0; i < 3; ++i) {
            sum[i] += s.omega[i];
            sum_sq[i] += s.omega[i] * s.omega[i];
            max_speed = std::max(max_speed, std::abs(s.omega[i]));
        }
        for (std::size_t q = 0; q < 3; ++q) {
            const double d = s.theta[kPairs[q].first] - s.theta[kPairs[q].second];
            pc[q] += std::cos(d);
            ps[q] += std::sin(d);
        }
    }
    for (std::size_t i = 0; i < 3; ++i) {
        out.mean_freq[i] = (b.theta[i] - a.theta[i]) / span;
        const double mean = sum[i] / static_cast<double>(count);
        out.freq_spread[i] =
            std::sqrt(std::max(0.0, sum_sq[i] / static_cast<double>(count) - mean * mean));
    }
    for (std::size_t q = 0; q < 3; ++q) {
        const CircularStats cs = circular_stats(pc[q], ps[q], count);
        out.pair_diff_mean[q] = cs.mean;
        out.pair_diff_spread[q] = cs.spread;
    }
    out.max_speed = max_speed;
    return out;
}

inline std::size_t pair_index(std::size_t i, std::size_t j) {
    if (i > j) std::swap(i, j);
    for (std::size_t q = 0; q < 3; ++q)
        if (kPairs[q].first == i && kPairs[q].second == j) return q;
    return 0;
}

inline double average(const std::array<double, 3>& v) { return (v[0] + v[1] + v[2]) / 3.0; }

}  // namespace detail

/// Observables over [t_begin, t_end]. mean_freq is the unwrapped phase
/// increment between the window endpoints divided by the window length.
inline ObservableSummary summarize(const Trajectory& traj, double t_begin, double t_end) {
    const auto [first, last] = detail::window_indices(traj, t_begin, t_end);
    return detail::summarize_range(traj, first, last);
}

/// Whole-trajectory summary.
inline ObservableSummary summarize(const Trajectory& traj) {
    return summarize(traj, traj.t0, traj.t_end());
}

namespace detail {

inline bool pair_in_phase(const ObservableSummary& s, std::size_t q,
                          const ClassifierTolerances& tol) {
    return std::abs(s.pair_diff_mean[q]) < tol.tol_phase_equal &&
           s.pair_diff_spread[q] < tol.tol_phase_equal;
}

inline bool splay_spaced(const ObservableSummary& s, const ClassifierTolerances& tol) {
    for (std::size_t q = 0; q < 3; ++q)
        if (std::abs(std::abs(s.pair_diff_mean[q]) - kTwoPi / 3.0) >= tol.tol_splay_spacing)
            return false;
    return true;
}

/// Index of the single in-phase pair, if exactly one pair is in phase.
inline std::optional<std::size_t> single_in_phase_pair(const ObservableSummary& s,
                                                       const ClassifierTolerances& tol) {
    std::optional<std::size_t> found;
    int count = 0;
    for (std::size_t q = 0; q < 3; ++q) {
        if (pair_in_phase(s, q, tol)) {
            found = q;
            ++count;
        }
    }
    return count == 1 ? found : std::nullopt;
}

inline std::size_t detached_of(std::size_t pair) {
    return 3 - kPairs[pair].first - kPairs[pair].second;
}

/// Circular-mean phase of the detached oscillator relative to the pair's
/// first member.
inline double detached_offset(const ObservableSummary& s, std::size_t pair) {
    const std::size_t k = detached_of(pair);
    const std::size_t i = kPairs[pair].first;
    const std::size_t q = pair_index(i, k);
    // pair_diff_mean[q] is θ_lo − θ_hi over the ordered pair.
    return i < k ? wrap_angle(-s.pair_diff_mean[q]) : s.pair_diff_mean[q];
}

}  // namespace detail

/// Assigns one state tag from window observables.
///
/// 1. No motion: SyncFixedPoint, Antipodal21 or Splay by phase arrangement.
/// 2. One common frequency. Rigid (all velocity spreads below
///    tol_freq_equal): SyncRotation, RotatingWave or PhaseLocked21. Non-rigid
///    with no phase-locked pair: RotatingWave (modulated wave).
/// 3. Exactly two equal frequencies and the third at least min_freq_gap
///    away: chimera, in-phase when the pair coincides in phase.
/// 4. Anything else is Unclassified.
inline StateLabel classify(const ObservableSummary& s, const ClassifierTolerances& tol = {}) {
    StateLabel label;
    if (!s.finite()) return label;
    label.velocity = detail::average(s.mean_freq);

    // (1) fixed points
    bool at_rest = s.max_speed < tol.tol_velocity_zero;
    for (double f : s.mean_freq) at_rest = at_rest && std::abs(f) < tol.tol_velocity_zero;
    if (at_rest) {
        bool all_in_phase = true;
        for (std::size_t q = 0; q < 3; ++q)
            all_in_phase = all_in_phase && detail::pair_in_phase(s, q, tol);
        if (all_in_phase) {
            label.tag = StateTag::SyncFixedPoint;
        } else if (const auto pair = detail::single_in_phase_pair(s, tol)) {
            const double offset = detail::detached_offset(s, *pair);
            if (kPi - std::abs(offset) < tol.tol_splay_spacing) {
                label.tag = StateTag::Antipodal21;
                label.detached = static_cast<int>(detail::detached_of(*pair)) + 1;
            }
        } else if (detail::splay_spaced(s, tol)) {
            label.tag = StateTag::Splay;
        }
        return label;
    }

    auto freq_equal = [&](std::size_t i, std::size_t j) {
        return std::abs(s.mean_freq[i] - s.mean_freq[j]) < tol.tol_freq_equal;
    };

    // (2) common frequency
    if (freq_equal(0, 1) && freq_equal(1, 2) && freq_equal(0, 2)) {
        bool rigid = true;
        for (double sp : s.freq_spread) rigid = rigid && sp < tol.tol_freq_equal;
        bool all_in_phase = true;
        for (std::size_t q = 0; q < 3; ++q)
            all_in_phase = all_in_phase && detail::pair_in_phase(s, q, tol);
        const auto pair = detail::single_in_phase_pair(s, tol);
        if (rigid) {
            if (all_in_phase) {
                label.tag = StateTag::SyncRotation;
            } else if (pair) {
                label.tag = StateTag::PhaseLocked21;
                label.delta = detail::detached_offset(s, *pair);
                label.detached = static_cast<int>(detail::detached_of(*pair)) + 1;
            } else if (detail::splay_spaced(s, tol)) {
                label.tag = StateTag::RotatingWave;
            }
        } else {
            bool any_locked = false;
            for (std::size_t q = 0; q < 3; ++q)
                any_locked = any_locked || s.pair_diff_spread[q] < tol.tol_phase_equal;
            if (!any_locked) label.tag = StateTag::RotatingWave;
        }
        return label;
    }

    // (3) chimera: exactly one equal-frequency pair, third detached
    std::optional<std::size_t> equal_pair;
    int equal_count = 0;
    for (std::size_t q = 0; q < 3; ++q) {
        if (freq_equal(kPairs[q].first, kPairs[q].second)) {
            equal_pair = q;
            ++equal_count;
        }
    }
    if (equal_count == 1) {
        const std::size_t q = *equal_pair;
        const std::size_t k = detail::detached_of(q);
        const double gap_a = std::abs(s.mean_freq[k] - s.mean_freq[kPairs[q].first]);
        const double gap_b = std::abs(s.mean_freq[k] - s.mean_freq[kPairs[q].second]);
        if (gap_a >= tol.min_freq_gap && gap_b >= tol.min_freq_gap) {
            label.tag = detail::pair_in_phase(s, q, tol) ? StateTag::ChimeraInPhase
                                                         : StateTag::ChimeraAntiPhase;
            label.detached = static_cast<int>(k) + 1;
        }
    }
    return label;
}

// ---------------------------------------------------------------------------
// Switching between rotating waves and chimera states

struct SwitchingEpoch {
    StateTag tag;  // RotatingWave, a chimera tag, or Unclassified for a desynchronized burst
    double start;
    double end;
};

struct SwitchingReport {
    StateLabel label;  // tag SwitchingRotChimera
    std::vector<SwitchingEpoch> epochs;
    int alternations = 0;
};

namespace detail {

enum class WindowKind { Rotating, Chimera, Other };

struct WindowVerdict {
    WindowKind kind = WindowKind::Other;
    StateTag tag = StateTag::Unclassified;
};

/// Short-window verdict. Frequencies come from phase averages over the first
/// and last tenth of the window, which suppresses the fast velocity
/// oscillation that dominates endpoint differences over ~100 time units.
/// Two frequencies are locked when closer than min_freq_gap.
///
/// All three locked (and not in-phase synchronized) is rotating-wave-like.
/// Any broken lock while moving is a departure from the wave: a chimera
/// window when exactly one pair stays locked, otherwise a desynchronized
/// burst (tag Unclassified) that still counts as the chimera side.
inline WindowVerdict judge_window(const Trajectory& traj, std::size_t first, std::size_t last,
                                  const ClassifierTolerances& tol) {
    const std::size_t n = last - first + 1;
    const std::size_t edge = std::max<std::size_t>(1, n / 10);
    std::array<double, 3> head{}, tail{};
    for (std::size_t k = 0; k < edge; ++k) {
        for (std::size_t i = 0; i < 3; ++i) {
            head[i] += traj.samples[first + k].theta[i];
            tail[i] += traj.samples[last - k].theta[i];
        }
    }
    const double span = traj.dt_rec * static_cast<double>(n - edge);
    std::array<double, 3> f{};
    for (std::size_t i = 0; i < 3; ++i)
        f[i] = (tail[i] - head[i]) / static_cast<double>(edge) / span;

    WindowVerdict v;
    bool moving = false;
    for (double x : f) moving = moving || std::abs(x) >= tol.tol_velocity_zero;
    if (!moving) return v;

    const ObservableSummary s = summarize_range(traj, first, last);
    int locked = 0;
    std::size_t locked_pair = 0;
    for (std::size_t q = 0; q < 3; ++q) {
        if (std::abs(f[kPairs[q].first] - f[kPairs[q].second]) < tol.min_freq_gap) {
            ++locked;
            locked_pair = q;
        }
    }
    if (locked == 3) {
        bool all_in_phase = true;
        for (std::size_t q = 0; q < 3; ++q) all_in_phase = all_in_phase && pair_in_phase(s, q, tol);
        if (!all_in_phase) v = {WindowKind::Rotating, StateTag::RotatingWave};
    } else if (locked == 1) {
        v = {WindowKind::Chimera, pair_in_phase(s, locked_pair, tol) ? StateTag::ChimeraInPhase
                                                                      : StateTag::ChimeraAntiPhase};
    } else {
        v = {WindowKind::Chimera, StateTag::Unclassified};
    }
    return v;
}

}  // namespace detail

/// Slides switching_window-long windows with 50% overlap and reports
/// alternation between rotating-wave-like and chimera-like epochs. Windows
/// that are neither are skipped. Empty when fewer than min_alternations
/// changes occur.
inline std::optional<SwitchingReport> detect_switching(const Trajectory& traj,
                                                       const ClassifierTolerances& tol = {}) {
    const double length = traj.t_end() - traj.t0;
    if (traj.samples.size() < 2 || length + 1e-9 < 10.0 * tol.switching_window)
        throw WindowTooShortError("switching analysis needs at least 10 windows of data");
    const auto per_window =
        static_cast<std::size_t>(std::llround(tol.switching_window / traj.dt_rec));
    const std::size_t stride = std::max<std::size_t>(1, per_window / 2);
    if (per_window < 10) throw WindowTooShortError("switching window holds too few samples");

    std::vector<SwitchingEpoch> epochs;
    int alternations = 0;
    for (std::size_t first = 0; first + per_window < traj.samples.size(); first += stride) {
        const std::size_t last = first + per_window;
        const detail::WindowVerdict v = detail::judge_window(traj, first, last, tol);
        if (v.kind == detail::WindowKind::Other) continue;
        const double t_a = traj.time(first);
        const double t_b = traj.time(last);
        if (!epochs.empty()) {
            const bool prev_rot = epochs.back().tag == StateTag::RotatingWave;
            const bool cur_rot = v.kind == detail::WindowKind::Rotating;
            if (prev_rot == cur_rot) {
                epochs.back().end = t_b;
                if (epochs.back().tag == StateTag::Unclassified) epochs.back().tag = v.tag;
                continue;
            }
            ++alternations;
        }
        epochs.push_back({v.tag, t_a, t_b});
    }
    if (alternations < tol.min_alternations) return std::nullopt;

    SwitchingReport report;
    report.label.tag = StateTag::SwitchingRotChimera;
    report.label.velocity =
        detail::average(detail::summarize_range(traj, 0, traj.samples.size() - 1).mean_freq);
    report.epochs = std::move(epochs);
    report.alternations = alternations;
    return report;
}

// ---------------------------------------------------------------------------
// Peak sequences

/// Which oscillator owns each successive dominant velocity peak (1-based).
/// A peak is a local maximum of ω_i above the median of all recorded
/// velocities at which ω_i is also the largest of the three velocities.
inline std::vector<int> peak_sequence(const Trajectory& traj) {
    const std::size_t n = traj.samples.size();
    if (n < 3) throw NoPeaksError("trajectory too short for peak detection");

    std::vector<double> pooled;
    pooled.reserve(3 * n);
    for (const PhaseState& s : traj.samples)
        for (double w : s.omega) pooled.push_back(w);
    auto mid = pooled.begin() + static_cast<std::ptrdiff_t>(pooled.size() / 2);
    std::nth_element(pooled.begin(), mid, pooled.end());
    const double threshold = *mid;

    std::vector<int> seq;
    for (std::size_t k = 1; k + 1 < n; ++k) {
        const auto& prev = traj.samples[k - 1].omega;
        const auto& cur = traj.samples[k].omega;
        const auto& next = traj.samples[k + 1].omega;
        for (std::size_t i = 0; i < 3; ++i) {
            if (!(cur[i] > prev[i] && cur[i] >= next[i] && cur[i] > threshold)) continue;
            bool dominant = true;
            for (std::size_t j = 0; j < 3; ++j)
                if (j != i && cur[j] >= cur[i]) dominant = false;
            if (dominant) seq.push_back(static_cast<int>(i) + 1);
        }
    }
    if (seq.empty()) throw NoPeaksError("no qualifying velocity maxima");
    return seq;
}

/// Smallest p such that seq[k] == seq[k+p] for every k past the first
/// `skip` entries; 0 when no period up to half the length fits.
inline std::size_t sequence_period(const std::vector<int>& seq, std::size_t skip = 0) {
    if (seq.size() <= skip + 1) return 0;
    const std::size_t len = seq.size() - skip;
    for (std::size_t p = 1; p <= len / 2; ++p) {
        bool ok = true;
        for (std::size_t k = skip; k + p < seq.size() && ok; ++k) ok = seq[k] == seq[k + p];
        if (ok) return p;
    }
    return 0;
}

}  // namespace kuramoto3
