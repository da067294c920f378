#pragma once

// (μ,γ)-plane classification over random initial conditions.

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "classifier.hpp"
#include "errors.hpp"
#include "integrator.hpp"
#include "io.hpp"
#include "model.hpp"
#include "observe.hpp"

namespace kuramoto3 {

struct ScanGrid {
    double mu_min = -5.0;
    double mu_max = 5.0;
    double gamma_min = -5.0;
    double gamma_max = 5.0;
    int n_mu = 201;
    int n_gamma = 201;
    double alpha = 0.0;
    int n_ics = 10;
    std::uint64_t seed = 1;

    void validate(std::string_view prefix = "scan") const {
        auto field = [&](std::string_view name) {
            return std::string(prefix) + "." + std::string(name);
        };
        if (!std::isfinite(mu_min) || !std::isfinite(mu_max) || !(mu_min < mu_max))
            throw ValidationError(field("mu_max"), "must exceed mu_min");
        if (!std::isfinite(gamma_min) || !std::isfinite(gamma_max) || !(gamma_min < gamma_max))
            throw ValidationError(field("gamma_max"), "must exceed gamma_min");
        if (n_mu < 2) throw ValidationError(field("n_mu"), "must be >= 2");
        if (n_gamma < 2) throw ValidationError(field("n_gamma"), "must be >= 2");
        if (n_ics < 1) throw ValidationError(field("n_ics"), "must be >= 1");
        if (!(alpha >= 0.0 && alpha < kPi)) throw ValidationError(field("alpha"), "must lie in [0, pi)");
    }

    /// Grid nodes include both endpoints.
    double mu_at(int i) const {
        return i == n_mu - 1 ? mu_max : mu_min + (mu_max - mu_min) * i / (n_mu - 1);
    }
    double gamma_at(int j) const {
        return j == n_gamma - 1 ? gamma_max
                                : gamma_min + (gamma_max - gamma_min) * j / (n_gamma - 1);
    }
};

struct ScanCellResult {
    double mu = 0.0;
    double gamma = 0.0;
    std::array<int, kStateTagCount> counts{};  // blow-ups are counted as Unclassified
    int blowup_count = 0;

    int count(StateTag t) const { return counts[static_cast<std::size_t>(t)]; }

    int total() const {
        int s = 0;
        for (int c : counts) s += c;
        return s;
    }

    /// Classified tags (Unclassified excluded) seen at least once.
    std::vector<StateTag> observed() const {
        std::vector<StateTag> out;
        for (StateTag t : kAllTags)
            if (t != StateTag::Unclassified && count(t) > 0) out.push_back(t);
        return out;
    }

    bool coexistence() const { return observed().size() >= 2; }

    bool has_chimera() const {
        return count(StateTag::ChimeraInPhase) > 0 || count(StateTag::ChimeraAntiPhase) > 0;
    }

    /// Most frequent tag; the lowest enumerator wins ties.
    StateTag dominant() const {
        std::size_t best = 0;
        for (std::size_t k = 1; k < kStateTagCount; ++k)
            if (counts[k] > counts[best]) best = k;
        return kAllTags[best];
    }
};

/// Cells in row-major order: index = j * n_mu + i with i along μ, j along γ.
struct ScanResult {
    ScanGrid grid;
    std::vector<ScanCellResult> cells;

    const ScanCellResult& at(int i, int j) const {
        return cells[static_cast<std::size_t>(j) * static_cast<std::size_t>(grid.n_mu) +
                     static_cast<std::size_t>(i)];
    }
};

/// Seed of the random stream for one initial condition. Keyed by the cell's
/// absolute coordinates, so a refined or cropped grid reuses the same
/// streams at coincident nodes.
inline std::uint64_t scan_stream_seed(std::uint64_t seed, double mu, double gamma, int ic) {
    return mix_seed(seed, coordinate_key(mu), coordinate_key(gamma), ic);
}

inline ScanCellResult scan_cell(const ScanGrid& grid, double mu, double gamma,
                                const ModelParams& params_base, const IntegratorConfig& cfg,
                                const ClassifierTolerances& tol) {
    ModelParams p = params_base;
    p.mu = mu;
    p.gamma = gamma;
    p.alpha = grid.alpha;

    ScanCellResult cell;
    cell.mu = mu;
    cell.gamma = gamma;
    for (int ic = 0; ic < grid.n_ics; ++ic) {
        const PhaseState s0 = random_initial_state(scan_stream_seed(grid.seed, mu, gamma, ic));
        const Observation obs = observe(s0, p, cfg, tol);
        if (obs.blowup) ++cell.blowup_count;
        ++cell.counts[static_cast<std::size_t>(obs.label.tag)];
    }
    return cell;
}

inline int default_jobs() {
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

/// Classifies every grid node. `jobs` worker threads pull cells from a shared
/// counter; each cell writes only its own slot, so the result does not
/// depend on scheduling.
inline ScanResult scan_plane(const ScanGrid& grid, const ModelParams& params_base,
                             const IntegratorConfig& cfg, const ClassifierTolerances& tol = {},
                             int jobs = 1) {
    grid.validate();
    ModelParams probe = params_base;
    probe.alpha = grid.alpha;
    probe.validate();
    cfg.validate();
    tol.validate();

    ScanResult result;
    result.grid = grid;
    const std::size_t n_cells =
        static_cast<std::size_t>(grid.n_mu) * static_cast<std::size_t>(grid.n_gamma);
    result.cells.resize(n_cells);

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t idx = next.fetch_add(1);
            if (idx >= n_cells) return;
            const int i = static_cast<int>(idx % static_cast<std::size_t>(grid.n_mu));
            const int j = static_cast<int>(idx / static_cast<std::size_t>(grid.n_mu));
            try {
                result.cells[idx] =
                    scan_cell(grid, grid.mu_at(i), grid.gamma_at(j), params_base, cfg, tol);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(n_cells);
                return;
            }
        }
    };

    const int n_workers = std::clamp(jobs, 1, static_cast<int>(std::min<std::size_t>(n_cells, 256)));
    if (n_workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_workers));
        for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);
    return result;
}

// ---------------------------------------------------------------------------
// Rendering

struct Rgb {
    int r, g, b;
    friend bool operator==(const Rgb&, const Rgb&) = default;
};

struct ColorTable {
    std::array<Rgb, kStateTagCount> tag{{
        {255, 255, 255},  // SyncFixedPoint
        {250, 240, 200},  // SyncRotation
        {255, 182, 193},  // Splay
        {219, 80, 160},   // RotatingWave
        {60, 110, 200},   // Antipodal21
        {190, 190, 190},  // PhaseLocked21
        {0, 110, 50},     // ChimeraInPhase
        {130, 220, 130},  // ChimeraAntiPhase
        {250, 210, 0},    // SwitchingRotChimera
        {0, 0, 0},        // Unclassified
    }};
    Rgb coexistence{140, 60, 170};
    Rgb blowup{220, 30, 30};

    Rgb of(StateTag t) const { return tag[static_cast<std::size_t>(t)]; }
};

/// Pixel colour: coexistence when two or more classified tags occur, the
/// blow-up colour when every run diverged, else the dominant tag.
inline Rgb cell_color(const ScanCellResult& cell, const ColorTable& colors = {}) {
    if (cell.coexistence()) return colors.coexistence;
    if (cell.blowup_count > 0 && cell.blowup_count == cell.total()) return colors.blowup;
    return colors.of(cell.dominant());
}

inline std::string scan_csv(const ScanResult& result) {
    std::string out = "mu,gamma";
    for (StateTag t : kAllTags) {
        out += ',';
        out += to_string(t);
    }
    out += ",blowup_count\n";
    for (const ScanCellResult& c : result.cells) {
        out += format_double(c.mu);
        out += ',';
        out += format_double(c.gamma);
        for (int n : c.counts) {
            out += ',';
            out += std::to_string(n);
        }
        out += ',';
        out += std::to_string(c.blowup_count);
        out += '\n';
    }
    return out;
}

/// Plain PPM, γ increasing upward (first row is gamma_max).
inline std::string scan_ppm(const ScanResult& result, const ColorTable& colors = {}) {
    const ScanGrid& g = result.grid;
    std::string out = "P3\n" + std::to_string(g.n_mu) + " " + std::to_string(g.n_gamma) + "\n255\n";
    for (int j = g.n_gamma - 1; j >= 0; --j) {
        for (int i = 0; i < g.n_mu; ++i) {
            const Rgb c = cell_color(result.at(i, j), colors);
            if (i > 0) out += ' ';
            out += std::to_string(c.r) + ' ' + std::to_string(c.g) + ' ' + std::to_string(c.b);
        }
        out += '\n';
    }
    return out;
}

struct RenderedMap {
    std::string csv;
    std::string ppm;
};

inline RenderedMap render_map(const ScanResult& result, const ColorTable& colors = {}) {
    if (result.cells.empty()) throw Error("render_map needs a non-empty grid");
    return {scan_csv(result), scan_ppm(result, colors)};
}

}  // namespace kuramoto3
