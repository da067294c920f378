#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include <kuramoto3/config.hpp>
#include <kuramoto3/io.hpp>

using namespace kuramoto3;
namespace fs = std::filesystem;

namespace {

std::string validation_field(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ValidationError& e) {
        return e.field();
    }
    return "<no error>";
}

fs::path scratch_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("kuramoto3_test_" + name);
    fs::remove_all(dir);
    return dir;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST(Config, MinimalDocumentUsesDefaults) {
    const RunConfig c = parse_config(R"({"model": {"mu": 1.0, "gamma": -2.0, "alpha": 0.1}})");
    EXPECT_EQ(c.model.m, 1.0);
    EXPECT_EQ(c.model.epsilon, 0.1);
    EXPECT_EQ(c.model.n, 3);
    EXPECT_EQ(c.model.mu, 1.0);
    EXPECT_EQ(c.model.gamma, -2.0);
    EXPECT_EQ(c.model.alpha, 0.1);
    EXPECT_EQ(c.model.convention, SumConvention::ExcludeSelf);
    EXPECT_EQ(c.integrator.dt, 0.01);
    EXPECT_EQ(c.integrator.t_transient, 2000.0);
    EXPECT_EQ(c.integrator.t_measure, 2000.0);
    EXPECT_EQ(c.integrator.record_stride, 10);
    EXPECT_EQ(c.classifier.tol_freq_equal, 1e-3);
    EXPECT_EQ(c.scan.n_mu, 201);
    EXPECT_EQ(c.seed, 1u);
}

TEST(Config, EmptyDocument) {
    const RunConfig c = parse_config("{}");
    EXPECT_EQ(c.model.mu, 0.0);
    EXPECT_EQ(c.output_dir, "out");
}

TEST(Config, FullDocument) {
    const RunConfig c = parse_config(R"({
        "model": {"m": 2.0, "epsilon": 0.5, "mu": -1, "gamma": 0.5, "alpha": 1.2, "convention": "Literal"},
        "integrator": {"dt": 0.005, "t_transient": 10, "t_measure": 20, "record_stride": 4},
        "classifier": {"tol_phase_equal": 0.02, "min_alternations": 4},
        "command": {
            "simulate": {"initial": {"theta": [0, 1, 2], "omega": [0.1, 0.2, 0.3]}},
            "scan": {"mu_min": -1, "mu_max": 1, "n_mu": 5, "n_gamma": 7, "n_ics": 3},
            "bifurcate": {"axis": "alpha", "start": 0.0, "end": 1.8, "n_steps": 50, "policy": "FreshRandom",
                          "down": true, "kick": 0, "t_transient": 30, "t_measure": 40, "initial": "splay"},
            "analytic": {"equilibria": ["sync"]}
        },
        "output_dir": "results",
        "seed": 77
    })");
    EXPECT_EQ(c.model.m, 2.0);
    EXPECT_EQ(c.model.convention, SumConvention::Literal);
    EXPECT_EQ(c.integrator.record_stride, 4);
    EXPECT_EQ(c.classifier.min_alternations, 4);
    ASSERT_TRUE(c.simulate.initial);
    EXPECT_EQ(c.simulate.initial->omega[2], 0.3);
    const ScanGrid g = c.scan_grid();
    EXPECT_EQ(g.n_gamma, 7);
    EXPECT_EQ(g.alpha, 1.2);
    EXPECT_EQ(g.seed, 77u);
    const SweepSpec s = c.sweep_spec();
    EXPECT_EQ(s.axis, SweepAxis::Alpha);
    EXPECT_EQ(s.policy, InitialPolicy::FreshRandom);
    EXPECT_EQ(s.cfg.dt, 0.005);
    EXPECT_EQ(s.cfg.t_transient, 30.0);
    EXPECT_EQ(s.cfg.t_measure, 40.0);
    EXPECT_EQ(s.kick, 0.0);
    ASSERT_TRUE(s.initial);
    EXPECT_EQ(*s.initial, splay_equilibrium());
    EXPECT_TRUE(c.bifurcate.down);
    EXPECT_EQ(c.analytic.equilibria, std::vector<std::string>{"sync"});
    EXPECT_EQ(c.output_dir, "results");
}

TEST(Config, ValidationPaths) {
    EXPECT_EQ(validation_field(R"({"model": {"m": -1}})"), "model.m");
    EXPECT_EQ(validation_field(R"({"model": {"epsilon": 0}})"), "model.epsilon");
    EXPECT_EQ(validation_field(R"({"model": {"n": 4}})"), "model.n");
    EXPECT_EQ(validation_field(R"({"model": {"mu": "big"}})"), "model.mu");
    EXPECT_EQ(validation_field(R"({"model": {"convention": "Both"}})"), "model.convention");
    EXPECT_EQ(validation_field(R"({"integrator": {"dt": -0.1}})"), "integrator.dt");
    EXPECT_EQ(validation_field(R"({"integrator": {"record_stride": 1.5}})"), "integrator.record_stride");
    EXPECT_EQ(validation_field(R"({"command": {"scan": {"n_mu": 1}}})"), "command.scan.n_mu");
    EXPECT_EQ(validation_field(R"({"command": {"bifurcate": {"axis": "gamma"}}})"), "command.bifurcate.axis");
    EXPECT_EQ(validation_field(R"({"command": {"simulate": {"initial": {"omega": [0, 0, 0]}}}})"),
              "command.simulate.initial.theta");
    EXPECT_EQ(validation_field(R"({"command": {"simulate": {"initial": {"theta": [0, 0]}}}})"),
              "command.simulate.initial.theta");
    EXPECT_EQ(validation_field(R"({"seed": -3})"), "seed");
}

TEST(Config, UnknownKeysRejected) {
    EXPECT_EQ(validation_field(R"({"model": {"beta": 1}})"), "model.beta");
    EXPECT_EQ(validation_field(R"({"modle": {}})"), "modle");
    EXPECT_EQ(validation_field(R"({"command": {"scan": {"resolution": 3}}})"), "command.scan.resolution");
}

TEST(Config, MalformedDocument) {
    EXPECT_THROW(parse_config(R"({"model": {"mu": 1.0,}})"), ParseError);
    EXPECT_THROW(parse_config("not json"), ParseError);
    EXPECT_THROW(load_config("/nonexistent/path/config.json"), ParseError);
}

TEST(Config, LiteralConventionChangesDrift) {
    const RunConfig c =
        parse_config(R"({"model": {"mu": 1.0, "gamma": 2.0, "alpha": 0.4, "convention": "Literal"}})");
    ASSERT_EQ(c.model.convention, SumConvention::Literal);
    // With self terms the synchronous drift is −(2μ+γ)/(2ε)·sin α.
    const double literal = -(2.0 * 1.0 + 2.0) / (2.0 * 0.1) * std::sin(0.4);
    const PhaseState end = settle(sync_equilibrium(), c.model, {0.01, 400.0, 10.0, 10});
    EXPECT_NEAR(end.omega[0], literal, 1e-8);
    EXPECT_GT(std::abs(end.omega[0] - sync_velocity(c.model)), 0.1);
}

TEST(Config, LoadFromFile) {
    const fs::path dir = scratch_dir("load");
    fs::create_directories(dir);
    {
        std::ofstream out(dir / "c.json");
        out << R"({"model": {"mu": 0.5}})";
    }
    EXPECT_EQ(load_config(dir / "c.json").model.mu, 0.5);
    fs::remove_all(dir);
}

// ---------------------------------------------------------------------------

TEST(Io, DoubleRoundTrip) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1e3, 1e3);
    for (int k = 0; k < 1000; ++k) {
        const double v = u(rng) * std::pow(10.0, k % 20 - 10);
        EXPECT_EQ(parse_double(format_double(v)), v);
    }
    EXPECT_EQ(format_double(0.5), "0.5");
    EXPECT_THROW(parse_double("1.5x"), ParseError);
    EXPECT_THROW(parse_double(""), ParseError);
}

TEST(Io, TrajectoryRoundTrip) {
    ModelParams p;
    p.mu = -4.5;
    p.gamma = -3.0;
    p.alpha = 0.1;
    const Trajectory traj = integrate(random_initial_state(8), p, {0.01, 5.0, 5.0, 10});
    const std::string csv = trajectory_csv(traj);
    EXPECT_EQ(csv_lines(csv)[0], kTrajectoryHeader);
    const auto rows = parse_trajectory_csv(csv);
    ASSERT_EQ(rows.size(), traj.size());
    for (std::size_t k = 0; k < rows.size(); ++k) {
        EXPECT_EQ(rows[k].t, traj.time(k));
        EXPECT_EQ(rows[k].state, traj.samples[k]);
    }
}

TEST(Io, TrajectoryParseErrors) {
    EXPECT_THROW(parse_trajectory_csv("t,x\n1,2\n"), ParseError);
    EXPECT_THROW(parse_trajectory_csv(std::string(kTrajectoryHeader) + "\n0,1,2\n"), ParseError);
    EXPECT_THROW(parse_trajectory_csv(std::string(kTrajectoryHeader) + "\n0,1,2,3,4,5,abc\n"), ParseError);
}

TEST(Io, WriteRespectsForce) {
    const fs::path dir = scratch_dir("write");
    const fs::path file = dir / "nested" / "a.txt";
    write_output_file(file, "first", false);
    EXPECT_EQ(read_file(file), "first");
    EXPECT_THROW(write_output_file(file, "second", false), Error);
    EXPECT_EQ(read_file(file), "first");
    write_output_file(file, "second", true);
    EXPECT_EQ(read_file(file), "second");
    fs::remove_all(dir);
}

TEST(Io, CsvSplitting) {
    const auto f = split_csv_line("a,,b,");
    ASSERT_EQ(f.size(), 4u);
    EXPECT_EQ(f[1], "");
    EXPECT_EQ(f[3], "");
    EXPECT_EQ(csv_lines("x\n\ny\n").size(), 2u);
}
