#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include <kuramoto3/io.hpp>
#include <kuramoto3/scan.hpp>

using namespace kuramoto3;

namespace {

const IntegratorConfig kShort{0.01, 300.0, 200.0, 10};

ScanGrid small_grid(double mu_min, double mu_max, double g_min, double g_max, int n, int n_ics = 2) {
    ScanGrid g;
    g.mu_min = mu_min;
    g.mu_max = mu_max;
    g.gamma_min = g_min;
    g.gamma_max = g_max;
    g.n_mu = n;
    g.n_gamma = n;
    g.n_ics = n_ics;
    return g;
}

ScanResult uniform_result(StateTag tag, int n = 2) {
    ScanResult r;
    r.grid = small_grid(0.0, 1.0, 0.0, 1.0, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            ScanCellResult c;
            c.mu = r.grid.mu_at(i);
            c.gamma = r.grid.gamma_at(j);
            c.counts[static_cast<std::size_t>(tag)] = 3;
            r.cells.push_back(c);
        }
    return r;
}

std::vector<std::array<int, 3>> ppm_pixels(const std::string& ppm, int& w, int& h) {
    std::istringstream in(ppm);
    std::string magic;
    int maxval = 0;
    in >> magic >> w >> h >> maxval;
    EXPECT_EQ(magic, "P3");
    EXPECT_EQ(maxval, 255);
    std::vector<std::array<int, 3>> px(static_cast<std::size_t>(w * h));
    for (auto& p : px) in >> p[0] >> p[1] >> p[2];
    return px;
}

}  // namespace

TEST(ScanGrid, NodesIncludeEndpoints) {
    const ScanGrid g = small_grid(-5.0, 5.0, -2.0, 3.0, 201);
    EXPECT_EQ(g.mu_at(0), -5.0);
    EXPECT_EQ(g.mu_at(200), 5.0);
    EXPECT_NEAR(g.mu_at(100), 0.0, 1e-15);
    EXPECT_EQ(g.gamma_at(200), 3.0);
    EXPECT_NEAR(g.mu_at(1) - g.mu_at(0), 0.05, 1e-12);
}

TEST(ScanGrid, Validation) {
    ScanGrid g;
    EXPECT_NO_THROW(g.validate());
    g.n_mu = 1;
    try {
        g.validate();
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_EQ(e.field(), "scan.n_mu");
    }
    g = {};
    g.mu_max = g.mu_min;
    EXPECT_THROW(g.validate(), ValidationError);
    g = {};
    g.n_ics = 0;
    EXPECT_THROW(g.validate(), ValidationError);
    g = {};
    g.alpha = 4.0;
    EXPECT_THROW(g.validate(), ValidationError);
}

TEST(ScanCell, AttractiveZeroLagContainsSync) {
    const ScanGrid g = small_grid(0.0, 1.0, 0.0, 1.0, 2, 4);
    const ScanCellResult c = scan_cell(g, 1.0, 0.0, {}, kShort, {});
    EXPECT_GT(c.count(StateTag::SyncFixedPoint), 0);
    EXPECT_EQ(c.total(), g.n_ics);
}

TEST(ScanCell, SyncAndSplayCoexist) {
    // Above both the sync line and the splay line every random start lands on
    // one of the two fixed points.
    const ScanGrid g = small_grid(0.0, 1.0, 0.0, 4.0, 2, 10);
    const ScanCellResult c = scan_cell(g, 1.0, 4.0, {}, kShort, {});
    EXPECT_GT(c.count(StateTag::SyncFixedPoint), 0);
    EXPECT_GT(c.count(StateTag::Splay), 0);
    EXPECT_EQ(c.count(StateTag::SyncFixedPoint) + c.count(StateTag::Splay), g.n_ics);
    EXPECT_TRUE(c.coexistence());
}

TEST(ScanCell, UncoupledPointDecays) {
    const ScanGrid g = small_grid(-1.0, 1.0, -1.0, 1.0, 3, 3);
    const ScanResult r = scan_plane(g, {}, kShort, {}, 1);
    const ScanCellResult& c = r.at(1, 1);
    EXPECT_EQ(c.mu, 0.0);
    EXPECT_EQ(c.gamma, 0.0);
    EXPECT_EQ(c.total(), 3);
    // Every oscillator stops; the resting phases are arbitrary.
    for (int ic = 0; ic < 3; ++ic) {
        ModelParams p;
        const PhaseState s0 = random_initial_state(scan_stream_seed(g.seed, 0.0, 0.0, ic));
        const PhaseState end = settle(s0, p, kShort);
        for (double w : end.omega) EXPECT_LT(std::abs(w), 1e-20);
    }
}

TEST(ScanCell, ZeroVelocityLine) {
    // γ = −6μ cancels the drift at any lag: synchrony, when reached, is at rest.
    ScanGrid g = small_grid(-1.0, 0.0, 0.0, 6.0, 2, 4);
    g.alpha = 0.1;
    for (double mu : {-0.3, -0.6}) {
        ModelParams p;
        p.mu = mu;
        p.gamma = -6.0 * mu;
        p.alpha = g.alpha;
        const ScanCellResult c = scan_cell(g, mu, p.gamma, {}, kShort, {});
        EXPECT_EQ(c.count(StateTag::SyncRotation), 0) << "mu=" << mu;
        const PhaseState near{{0.05, -0.03, 0.0}, {0.01, 0.0, -0.01}};
        EXPECT_EQ(classify(summarize(integrate(near, p, kShort))).tag, StateTag::SyncFixedPoint) << "mu=" << mu;
    }
}

TEST(ScanPlane, CountsSumToInitialConditions) {
    ScanGrid g = small_grid(-2.0, 2.0, -2.0, 2.0, 4, 2);
    g.alpha = 0.3;
    const ScanResult r = scan_plane(g, {}, kShort, {}, 2);
    ASSERT_EQ(r.cells.size(), 16u);
    for (const auto& c : r.cells) {
        EXPECT_EQ(c.total(), g.n_ics);
        EXPECT_LE(c.blowup_count, c.count(StateTag::Unclassified));
    }
}

TEST(ScanPlane, IndependentOfWorkerCount) {
    ScanGrid g = small_grid(-3.0, 3.0, -3.0, 3.0, 4, 2);
    g.alpha = 0.1;
    const std::string one = scan_csv(scan_plane(g, {}, kShort, {}, 1));
    const std::string three = scan_csv(scan_plane(g, {}, kShort, {}, 3));
    EXPECT_EQ(one, three);
}

TEST(ScanPlane, RefinedGridReproducesCoarseNodes) {
    ScanGrid coarse = small_grid(-2.0, 2.0, -2.0, 2.0, 3, 2);
    coarse.alpha = 0.2;
    ScanGrid fine = coarse;
    fine.n_mu = 5;
    fine.n_gamma = 5;
    const ScanResult a = scan_plane(coarse, {}, kShort, {}, 1);
    const ScanResult b = scan_plane(fine, {}, kShort, {}, 1);
    for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 3; ++i) {
            const ScanCellResult& ca = a.at(i, j);
            const ScanCellResult& cb = b.at(2 * i, 2 * j);
            ASSERT_EQ(ca.mu, cb.mu);
            ASSERT_EQ(ca.gamma, cb.gamma);
            EXPECT_EQ(ca.counts, cb.counts);
        }
}

TEST(ScanPlane, InvalidInputs) {
    ScanGrid g = small_grid(0.0, 1.0, 0.0, 1.0, 2, 1);
    ModelParams p;
    p.m = -1.0;
    EXPECT_THROW(scan_plane(g, p, kShort), ValidationError);
    IntegratorConfig bad = kShort;
    bad.dt = -0.1;
    EXPECT_THROW(scan_plane(g, {}, bad), ValidationError);
}

// ---------------------------------------------------------------------------

TEST(Cell, DominantTieTakesLowestTag) {
    ScanCellResult c;
    c.counts[static_cast<std::size_t>(StateTag::Splay)] = 2;
    c.counts[static_cast<std::size_t>(StateTag::SyncRotation)] = 2;
    const bool splay_first =
        static_cast<int>(StateTag::Splay) < static_cast<int>(StateTag::SyncRotation);
    EXPECT_EQ(c.dominant(), splay_first ? StateTag::Splay : StateTag::SyncRotation);
}

TEST(Cell, UnclassifiedIsNotCoexistence) {
    ScanCellResult c;
    c.counts[static_cast<std::size_t>(StateTag::Splay)] = 2;
    c.counts[static_cast<std::size_t>(StateTag::Unclassified)] = 5;
    EXPECT_FALSE(c.coexistence());
    EXPECT_EQ(c.observed(), std::vector<StateTag>{StateTag::Splay});
    EXPECT_FALSE(c.has_chimera());
    c.counts[static_cast<std::size_t>(StateTag::ChimeraAntiPhase)] = 1;
    EXPECT_TRUE(c.coexistence());
    EXPECT_TRUE(c.has_chimera());
}

TEST(Render, UniformGrid) {
    const ScanResult r = uniform_result(StateTag::SyncFixedPoint);
    const RenderedMap m = render_map(r);
    int w = 0, h = 0;
    const auto px = ppm_pixels(m.ppm, w, h);
    EXPECT_EQ(w, 2);
    EXPECT_EQ(h, 2);
    const Rgb expect = ColorTable{}.of(StateTag::SyncFixedPoint);
    for (const auto& p : px) EXPECT_EQ((Rgb{p[0], p[1], p[2]}), expect);
}

TEST(Render, CoexistenceColour) {
    ScanResult r = uniform_result(StateTag::SyncFixedPoint);
    r.cells[0].counts[static_cast<std::size_t>(StateTag::Splay)] = 1;
    EXPECT_EQ(cell_color(r.cells[0]), ColorTable{}.coexistence);
    EXPECT_EQ(cell_color(r.cells[1]), ColorTable{}.of(StateTag::SyncFixedPoint));
}

TEST(Render, DistinctTagColours) {
    const ColorTable t;
    for (std::size_t a = 0; a < kStateTagCount; ++a) {
        EXPECT_NE(t.of(kAllTags[a]), t.coexistence);
        for (std::size_t b = a + 1; b < kStateTagCount; ++b) EXPECT_NE(t.of(kAllTags[a]), t.of(kAllTags[b]));
    }
}

TEST(Render, TopRowIsLargestGamma) {
    ScanResult r = uniform_result(StateTag::Splay, 3);
    // cell (i=0, j=2): smallest μ, largest γ
    ScanCellResult& corner = r.cells[static_cast<std::size_t>(2 * 3 + 0)];
    corner.counts = {};
    corner.counts[static_cast<std::size_t>(StateTag::SyncRotation)] = 3;
    int w = 0, h = 0;
    const auto px = ppm_pixels(scan_ppm(r), w, h);
    const Rgb rot = ColorTable{}.of(StateTag::SyncRotation);
    EXPECT_EQ((Rgb{px[0][0], px[0][1], px[0][2]}), rot);
    for (std::size_t k = 1; k < px.size(); ++k) EXPECT_NE((Rgb{px[k][0], px[k][1], px[k][2]}), rot);
}

TEST(Render, CsvLayout) {
    ScanResult r = uniform_result(StateTag::Splay);
    r.cells[3].blowup_count = 1;
    r.cells[3].counts[static_cast<std::size_t>(StateTag::Unclassified)] = 1;
    const std::string csv = scan_csv(r);
    const auto lines = csv_lines(csv);
    ASSERT_EQ(lines.size(), 5u);
    const auto header = split_csv_line(lines[0]);
    ASSERT_EQ(header.size(), 2u + kStateTagCount + 1u);
    EXPECT_EQ(header[0], "mu");
    EXPECT_EQ(header[1], "gamma");
    for (std::size_t k = 0; k < kStateTagCount; ++k) EXPECT_EQ(header[2 + k], to_string(kAllTags[k]));
    EXPECT_EQ(header.back(), "blowup_count");
    for (std::size_t row = 1; row < lines.size(); ++row) {
        const auto f = split_csv_line(lines[row]);
        ASSERT_EQ(f.size(), header.size());
        const ScanCellResult& c = r.cells[row - 1];
        EXPECT_EQ(parse_double(f[0]), c.mu);
        EXPECT_EQ(parse_double(f[1]), c.gamma);
        for (std::size_t k = 0; k < kStateTagCount; ++k)
            EXPECT_EQ(parse_double(f[2 + k]), c.counts[k]);
        EXPECT_EQ(parse_double(f.back()), c.blowup_count);
    }
}

TEST(Render, EmptyGridRejected) {
    ScanResult r;
    EXPECT_THROW(render_map(r), Error);
}
