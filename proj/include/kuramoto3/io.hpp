#pragma once

// CSV encoding helpers and guarded file output.

#include <charconv>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "errors.hpp"
#include "integrator.hpp"

namespace kuramoto3 {

/// Shortest decimal form that parses back to the same double.
inline std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view text) {
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
        throw ParseError("not a number: '" + std::string(text) + "'");
    return v;
}

/// Comma-separated fields of one line (no quoting; none of our fields need it).
inline std::vector<std::string_view> split_csv_line(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

/// Non-empty lines of a LF-terminated document.
inline std::vector<std::string_view> csv_lines(std::string_view doc) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (start < doc.size()) {
        std::size_t end = doc.find('\n', start);
        if (end == std::string_view::npos) end = doc.size();
        if (end > start) out.push_back(doc.substr(start, end - start));
        start = end + 1;
    }
    return out;
}

inline constexpr std::string_view kTrajectoryHeader = "t,theta1,theta2,theta3,omega1,omega2,omega3";

inline std::string trajectory_csv(const Trajectory& traj) {
    std::string out(kTrajectoryHeader);
    out += '\n';
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const PhaseState& s = traj.samples[k];
        out += format_double(traj.time(k));
        for (double v : s.theta) out += ',' + format_double(v);
        for (double v : s.omega) out += ',' + format_double(v);
        out += '\n';
    }
    return out;
}

struct TrajectoryRow {
    double t;
    PhaseState state;
};

inline std::vector<TrajectoryRow> parse_trajectory_csv(std::string_view doc) {
    const auto lines = csv_lines(doc);
    if (lines.empty() || lines.front() != kTrajectoryHeader)
        throw ParseError("trajectory CSV header mismatch");
    std::vector<TrajectoryRow> rows;
    rows.reserve(lines.size() - 1);
    for (std::size_t k = 1; k < lines.size(); ++k) {
        const auto f = split_csv_line(lines[k]);
        if (f.size() != 7) throw ParseError("trajectory CSV row " + std::to_string(k) + ": expected 7 fields");
        TrajectoryRow r{parse_double(f[0]), {}};
        for (std::size_t i = 0; i < 3; ++i) {
            r.state.theta[i] = parse_double(f[1 + i]);
            r.state.omega[i] = parse_double(f[4 + i]);
        }
        rows.push_back(r);
    }
    return rows;
}

/// Writes `content` to `path`, creating parent directories. An existing file
/// is replaced only when `force` is set.
inline void write_output_file(const std::filesystem::path& path, std::string_view content,
                              bool force) {
    namespace fs = std::filesystem;
    if (fs::exists(path) && !force)
        throw Error("refusing to overwrite " + path.string() + " (use --force)");
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error("write failed for " + path.string());
}

}  // namespace kuramoto3
