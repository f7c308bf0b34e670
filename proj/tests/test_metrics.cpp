#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "hycop/field_ops.hpp"
#include "hycop/metrics.hpp"
#include "hycop/reference.hpp"
#include "hycop/rng.hpp"

using namespace hycop;

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

Field random_field(const Grid& g, int ch, std::uint64_t seed) {
    Field f(g, ch);
    Rng rng(seed);
    for (auto& v : f.v) v = rng.uniform(-1.0, 1.0);
    return f;
}
}  // namespace

TEST_CASE("rel_l2 basics: identity, homogeneity, zero reference") {
    const Grid g = Grid::make1d(32, 1.0);
    const Field ref = random_field(g, 1, 1);
    CHECK(*rel_l2(ref, ref) == doctest::Approx(0.0));
    Field pred = ref;
    for (auto& v : pred.v) v *= 1.5;  // error = 0.5*ref -> RelL2 = 0.5
    CHECK(*rel_l2(pred, ref) == doctest::Approx(0.5));
    const Field zero(g, 1);
    CHECK_FALSE(rel_l2(pred, zero).has_value());
}

TEST_CASE("max_err takes the channel-norm of the worst point") {
    const Grid g = Grid::make1d(8, 1.0);
    Field a(g, 2), b(g, 2);
    a.at(0, 3) = 3.0;
    a.at(1, 3) = 4.0;
    CHECK(max_err(a, b) == doctest::Approx(5.0));
}

TEST_CASE("frmse bands partition the spectrum and isolate single modes") {
    const int n = 64;
    const Grid g = Grid::make1d(n, 1.0);
    const Field ref(g, 1);
    // mode 2 -> k_n = 2/64 = 0.03125 (low); mode 10 -> 0.15625 (mid);
    // mode 25 -> 0.390625 (high)
    struct Case {
        int mode;
        int band;
    };
    for (const auto& c : std::vector<Case>{{2, 0}, {10, 1}, {25, 2}}) {
        Field pred(g, 1);
        for (int i = 0; i < n; ++i) pred.at(0, i) = std::sin(kTwoPi * c.mode * i / n);
        const auto b = frmse_bands(pred, ref);
        const double vals[3] = {b.low, b.mid, b.high};
        for (int k = 0; k < 3; ++k) {
            if (k == c.band)
                CHECK(vals[k] > 1e-6);
            else
                CHECK(vals[k] < 1e-12);
        }
    }
    // Parseval-style counting identity: the three bands' mode counts weight
    // their mean squares back to the physical RMSE.
    const Field pred = random_field(g, 1, 5);
    const auto b = frmse_bands(pred, ref);
    int c0 = 0, c1 = 0, c2 = 0;
    for (int m = 0; m < n; ++m) {
        const double kn = static_cast<double>(std::min(m, n - m)) / n;
        (kn < 0.1 ? c0 : (kn < 0.3 ? c1 : c2))++;
    }
    CHECK(c0 + c1 + c2 == n);
    const double recon =
        std::sqrt((c0 * b.low * b.low + c1 * b.mid * b.mid + c2 * b.high * b.high) / n);
    CHECK(recon == doctest::Approx(rmse(pred, ref) / std::sqrt(static_cast<double>(n))));
    // wall grids have no spectral decomposition
    Field wall(Grid::make1d(8, 1.0, Boundary::ReflectiveWall), 1);
    CHECK_THROWS_AS((void)frmse_bands(wall, wall), BoundaryUnsupported);
}

TEST_CASE("brmse counts only the boundary band and matches constant errors") {
    const int n = 64;  // band width = floor(0.05*64) = 3 cells per side
    const Grid g = Grid::make1d(n, 1.0);
    Field ref(g, 1), pred(g, 1);
    for (auto& v : pred.v) v = 0.25;
    CHECK(brmse(pred, ref) == doctest::Approx(0.25));
    // interior-only error is invisible to brmse
    Field inner(g, 1);
    inner.at(0, n / 2) = 9.0;
    CHECK(brmse(inner, ref) == doctest::Approx(0.0));
    // edge-only error is fully visible
    Field edge(g, 1);
    edge.at(0, 0) = 1.0;
    CHECK(brmse(edge, ref) == doctest::Approx(std::sqrt(1.0 / 6)));
}

TEST_CASE("crmse tracks conserved integrals per system") {
    const Grid g = Grid::make1d(10, 10.0);  // h = 1 -> integral == sum
    Field ref(g, 2), pred(g, 2);
    pred.at(0, 0) = 0.3;  // mass diff 0.3
    pred.at(1, 0) = 0.4;  // momentum diff 0.4
    const double expect = std::sqrt((0.3 * 0.3 + 0.4 * 0.4) / 2);
    CHECK(*crmse(SystemTag::SWE1D, pred, ref) == doctest::Approx(expect));
    Field a(g, 1), b(g, 1);
    a.at(0, 2) = 0.5;
    CHECK(*crmse(SystemTag::Burgers1D, a, b) == doctest::Approx(0.5));
    const Grid g2 = Grid::make2d(4, 4, 1.0, 1.0);
    Field c(g2, 1);
    CHECK_FALSE(crmse(SystemTag::ADR2D, c, c).has_value());
}

TEST_CASE("error decomposition obeys the triangle inequality") {
    PdeParams p;
    p.system = SystemTag::Burgers1D;
    p.nu = 0.03;
    const Grid g = Grid::make1d(64, 2.0);
    Field u0(g, 1);
    for (int i = 0; i < 64; ++i) u0.at(0, i) = 0.8 * std::sin(kTwoPi * g.x(0, i) / 2.0);
    const double T = 0.4;
    const Field ref = solve_coupled_finestep(p, u0, T);
    const auto dict = dictionary(SystemTag::Burgers1D);
    const auto d = error_decomposition(dict, p, u0, strang_schedule(2, T, 2), ref);
    CHECK(d.total > 0.0);
    CHECK(d.splitting_est > 0.0);
    CHECK(d.triangle_residual <= 1e-12);
    CHECK(d.total <= d.splitting_est + d.primitive_est + 1e-12);
}

TEST_CASE("ks attractor metrics: identical trajectories score zero") {
    const Grid g = Grid::make1d(64, 20.0);
    std::vector<Field> traj;
    Rng rng(3);
    for (int s = 0; s < 40; ++s) {
        Field f(g, 1);
        for (int i = 0; i < 64; ++i)
            f.at(0, i) = std::sin(kTwoPi * (i + s) / 64.0) + 0.1 * rng.uniform(-1, 1);
        traj.push_back(f);
    }
    const auto m = ks_attractor_metrics(traj, traj);
    CHECK(m.se == doctest::Approx(0.0));
    CHECK(m.kl == doctest::Approx(0.0));
}

TEST_CASE("ks attractor metrics separate distinct spectra and reject short runs") {
    const Grid g = Grid::make1d(64, 20.0);
    auto make_traj = [&](int mode, double amp) {
        std::vector<Field> traj;
        for (int s = 0; s < 40; ++s) {
            Field f(g, 1);
            for (int i = 0; i < 64; ++i)
                f.at(0, i) = amp * std::sin(kTwoPi * mode * i / 64.0 + 0.3 * s);
            traj.push_back(f);
        }
        return traj;
    };
    const auto m = ks_attractor_metrics(make_traj(2, 1.0), make_traj(7, 2.0));
    CHECK(m.se > 0.5);
    CHECK(m.kl > 0.01);

    const auto tiny = make_traj(2, 1.0);
    const std::vector<Field> short_traj(tiny.begin(), tiny.begin() + 5);
    CHECK_THROWS_AS((void)ks_attractor_metrics(short_traj, short_traj), InsufficientTrajectory);
    CHECK_THROWS_AS((void)ks_attractor_metrics(tiny, short_traj), InsufficientTrajectory);
}
