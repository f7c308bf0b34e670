#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "hycop/field_ops.hpp"
#include "hycop/rng.hpp"

using namespace hycop;

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

Field random_field(const Grid& g, int channels, std::uint64_t seed) {
    Field f(g, channels);
    Rng rng(seed);
    for (auto& v : f.v) v = rng.uniform(-1.0, 1.0);
    return f;
}
}  // namespace

TEST_CASE("fft round trip recovers the input") {
    for (int n : {8, 64, 12, 96}) {  // pow2 path and the direct fallback
        fft::cvec a(n), orig;
        Rng rng(7);
        for (auto& z : a) z = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
        orig = a;
        fft::forward(a);
        fft::inverse(a);
        double err = 0;
        for (int i = 0; i < n; ++i) err = std::max(err, std::abs(a[i] - orig[i]));
        CHECK(err < 1e-12);
    }
}

TEST_CASE("fft of a pure sine lands in exactly two bins") {
    const int n = 32, m = 5;
    fft::cvec a(n);
    for (int i = 0; i < n; ++i) a[i] = std::sin(kTwoPi * m * i / n);
    fft::forward(a);
    // sin -> -+ n/2 i at bins m and n-m, zero elsewhere
    CHECK(std::abs(a[m] - std::complex<double>(0, -n / 2.0)) < 1e-10);
    CHECK(std::abs(a[n - m] - std::complex<double>(0, n / 2.0)) < 1e-10);
    double rest = 0;
    for (int i = 0; i < n; ++i)
        if (i != m && i != n - m) rest = std::max(rest, std::abs(a[i]));
    CHECK(rest < 1e-10);
}

TEST_CASE("Parseval: grid energy equals spectral energy / N") {
    const Grid g = Grid::make1d(64, 10.0);
    const Field f = random_field(g, 1, 3);
    auto spec = dft(f, 0);
    double phys = 0, sp = 0;
    for (int i = 0; i < 64; ++i) phys += f.at(0, i) * f.at(0, i);
    for (const auto& z : spec) sp += std::norm(z);
    CHECK(phys == doctest::Approx(sp / 64).epsilon(1e-12));
}

TEST_CASE("2d dft/idft round trip") {
    const Grid g = Grid::make2d(16, 8, 1.0, 2.0);
    const Field f = random_field(g, 1, 11);
    const Field back = idft(dft(f, 0), g);
    CHECK(rmse(f, back) < 1e-12);
}

TEST_CASE("wavenumbers are signed and periodic-consistent") {
    const auto k = wavenumbers(8, kTwoPi);  // L = 2*pi -> k_m = m
    CHECK(k[0] == doctest::Approx(0.0));
    CHECK(k[1] == doctest::Approx(1.0));
    CHECK(k[3] == doctest::Approx(3.0));
    CHECK(k[5] == doctest::Approx(-3.0));
    CHECK(k[7] == doctest::Approx(-1.0));
    CHECK(std::abs(k[4]) == doctest::Approx(4.0));  // Nyquist
}

TEST_CASE("spectral gradient is exact on resolved sinusoids") {
    const double L = 10.0;
    const Grid g = Grid::make1d(64, L);
    Field f(g, 1);
    const double k = kTwoPi * 3 / L;
    for (int i = 0; i < 64; ++i) f.at(0, i) = std::sin(k * g.x(0, i));
    const Field df = gradient(f, 0, 0);
    double err = 0;
    for (int i = 0; i < 64; ++i)
        err = std::max(err, std::abs(df.at(0, i) - k * std::cos(k * g.x(0, i))));
    CHECK(err < 1e-10);
}

TEST_CASE("wall gradient converges at second order") {
    auto max_grad_err = [](int n) {
        const Grid g = Grid::make1d(n, 1.0, Boundary::ReflectiveWall);
        Field f(g, 1);
        for (int i = 0; i < n; ++i) {
            const double x = g.x(0, i);
            f.at(0, i) = x * x * x;
        }
        const Field df = gradient(f, 0, 0);
        double err = 0;
        for (int i = 0; i < n; ++i) {
            const double x = g.x(0, i);
            err = std::max(err, std::abs(df.at(0, i) - 3 * x * x));
        }
        return err;
    };
    const double e1 = max_grad_err(32), e2 = max_grad_err(64);
    CHECK(e1 / e2 > 3.0);  // ~4 for order 2
}

TEST_CASE("integrate is the exact h-weighted quadrature") {
    const Grid g = Grid::make1d(32, 10.0);
    Field f(g, 1);
    for (auto& v : f.v) v = 3.5;
    CHECK(integrate(f, 0) == doctest::Approx(35.0).epsilon(1e-14));
    const Grid gw = Grid::make2d(8, 8, 2.0, 3.0, Boundary::ReflectiveWall);
    Field fw(gw, 1);
    for (auto& v : fw.v) v = 1.0;
    CHECK(integrate(fw, 0) == doctest::Approx(6.0).epsilon(1e-14));
}

TEST_CASE("dealias zeroes exactly the upper third of the spectrum") {
    const int n = 64;
    fft::cvec spec(n, {1.0, 1.0});
    dealias(spec, n);
    const int cut = n / 3;  // modes with min(m, n-m) >= n/3 go to zero
    for (int m = 0; m < n; ++m) {
        const int mm = std::min(m, n - m);
        if (mm >= cut)
            CHECK(std::abs(spec[m]) == 0.0);
        else
            CHECK(std::abs(spec[m]) > 0.0);
    }
}

TEST_CASE("rmse and rms basics") {
    const Grid g = Grid::make1d(4, 1.0);
    Field a(g, 1), b(g, 1);
    a.v = {1, 2, 3, 4};
    b.v = {1, 2, 3, 8};
    CHECK(rmse(a, b) == doctest::Approx(2.0));  // sqrt(16/4)
    CHECK(rms(b) == doctest::Approx(std::sqrt((1.0 + 4 + 9 + 64) / 4)));
    Field c(Grid::make1d(8, 1.0), 1);
    CHECK_THROWS_AS((void)rmse(a, c), StateShapeError);
}

TEST_CASE("all_finite flags NaN and out-of-bound values") {
    const Grid g = Grid::make1d(4, 1.0);
    Field a(g, 1);
    CHECK(all_finite(a));
    a.v[2] = 1e7;
    CHECK_FALSE(all_finite(a));
    a.v[2] = std::nan("");
    CHECK_FALSE(all_finite(a));
}
