#include "hycop/reference.hpp"

#include <cmath>

#include "hycop/errors.hpp"
#include "hycop/field_ops.hpp"
#include "hycop/primitives.hpp"

namespace hycop {

namespace {

void check_state(const Field& u, const char* what) {
    if (!all_finite(u)) throw ReferenceDiverged(std::string(what) + ": state left finite range");
}

// Dealiased spectral RHS of u_t = -(u^2)_x/2, shared by Burgers and KS.
fft::cvec transport_rhs(const fft::cvec& spec, const std::vector<double>& k) {
    const int n = static_cast<int>(spec.size());
    fft::cvec phys = spec;
    fft::inverse(phys);
    fft::cvec sq(n);
    for (int i = 0; i < n; ++i) {
        const double x = phys[i].real();
        sq[i] = x * x;
    }
    fft::forward(sq);
    dealias(sq, n);
    for (int m = 0; m < n; ++m) {
        const double km = (n % 2 == 0 && m == n / 2) ? 0.0 : k[m];
        sq[m] *= std::complex<double>(0.0, -0.5 * km);
    }
    return sq;
}

double spec_max_abs(const fft::cvec& spec) {
    fft::cvec phys = spec;
    fft::inverse(phys);
    double m = 0.0;
    for (const auto& z : phys) m = std::max(m, std::abs(z.real()));
    return m;
}

Field burgers_finestep(const PdeParams& p, const Field& u0, double t, double dt_scale) {
    const int n = u0.grid.n[0];
    const auto k = wavenumbers(n, u0.grid.length[0]);
    const double h = u0.grid.h(0);
    double k2max = 0.0;
    for (double km : k) k2max = std::max(k2max, km * km);

    fft::cvec spec = dft(u0, 0);
    dealias(spec, n);
    double elapsed = 0.0;
    long guard = 0;
    while (elapsed < t) {
        const double umax = std::max(spec_max_abs(spec), 1e-8);
        const double dt_adv = 0.4 * h / umax;
        const double dt_diff = (p.nu > 0.0) ? 2.5 / (p.nu * k2max) : dt_adv;
        double dt = 0.1 * dt_scale * std::min(dt_adv, dt_diff);
        dt = std::min(dt, t - elapsed);
        auto rhs = [&](const fft::cvec& s) {
            auto out = transport_rhs(s, k);
            for (int m = 0; m < n; ++m) out[m] -= p.nu * k[m] * k[m] * s[m];
            return out;
        };
        const auto f0 = rhs(spec);
        fft::cvec u1(n), u2(n);
        for (int m = 0; m < n; ++m) u1[m] = spec[m] + dt * f0[m];
        const auto f1 = rhs(u1);
        for (int m = 0; m < n; ++m) u2[m] = 0.75 * spec[m] + 0.25 * (u1[m] + dt * f1[m]);
        const auto f2 = rhs(u2);
        for (int m = 0; m < n; ++m) spec[m] = spec[m] / 3.0 + 2.0 / 3.0 * (u2[m] + dt * f2[m]);
        elapsed += dt;
        if (++guard > 20 * kMaxSubsteps) throw ReferenceDiverged("burgers reference: step cap");
        if (guard % 256 == 0 && !std::isfinite(spec[0].real()))
            throw ReferenceDiverged("burgers reference: non-finite state");
    }
    Field out = idft(spec, u0.grid);
    check_state(out, "burgers reference");
    return out;
}

Field swe_finestep(const PdeParams& p, const Field& u0, double t, double dt_scale) {
    Field state = u0;
    Field k(u0.grid, 2), s1(u0.grid, 2), s2(u0.grid, 2);
    const double h = u0.grid.h(0);
    double elapsed = 0.0;
    long guard = 0;
    while (elapsed < t) {
        const double a = std::max(swe_max_speed(state, p.g, true, true), 1e-8);
        double dt = 0.1 * dt_scale * 0.4 * h / a;
        dt = std::min(dt, t - elapsed);
        swe_rhs(state, p.g, true, true, k);
        for (size_t i = 0; i < state.v.size(); ++i) s1.v[i] = state.v[i] + dt * k.v[i];
        swe_rhs(s1, p.g, true, true, k);
        for (size_t i = 0; i < state.v.size(); ++i)
            s2.v[i] = 0.75 * state.v[i] + 0.25 * (s1.v[i] + dt * k.v[i]);
        swe_rhs(s2, p.g, true, true, k);
        for (size_t i = 0; i < state.v.size(); ++i)
            state.v[i] = state.v[i] / 3.0 + 2.0 / 3.0 * (s2.v[i] + dt * k.v[i]);
        elapsed += dt;
        if (++guard > 20 * kMaxSubsteps) throw ReferenceDiverged("swe reference: step cap");
        if (guard % 256 == 0 && !all_finite(state))
            throw ReferenceDiverged("swe reference: non-finite state");
    }
    check_state(state, "swe reference");
    return state;
}

Field adr_finestep(const PdeParams& p, const Field& u0, double t, double dt_scale) {
    const int nx = u0.grid.n[0], ny = u0.grid.n[1];
    const auto kx = wavenumbers(nx, u0.grid.length[0]);
    const auto ky = wavenumbers(ny, u0.grid.length[1]);
    double kx2 = 0.0, ky2 = 0.0;
    for (double v : kx) kx2 = std::max(kx2, v * v);
    for (double v : ky) ky2 = std::max(ky2, v * v);

    // Linear symbol -i(cx kx + cy ky) - dx kx^2 - dy ky^2 applied spectrally;
    // logistic source applied pointwise.
    fft::cvec sym(static_cast<size_t>(nx) * ny);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const double kxi = (nx % 2 == 0 && i == nx / 2) ? 0.0 : kx[i];
            const double kyj = (ny % 2 == 0 && j == ny / 2) ? 0.0 : ky[j];
            sym[static_cast<size_t>(j) * nx + i] =
                std::complex<double>(-(p.dx * kx[i] * kx[i] + p.dy * ky[j] * ky[j]),
                                     -(p.cx * kxi + p.cy * kyj));
        }

    auto rhs = [&](const std::vector<double>& u, std::vector<double>& out) {
        fft::cvec spec(u.size());
        for (size_t i = 0; i < u.size(); ++i) spec[i] = u[i];
        axis_transform(spec, nx, ny, 0, false);
        axis_transform(spec, nx, ny, 1, false);
        for (size_t i = 0; i < spec.size(); ++i) spec[i] *= sym[i];
        axis_transform(spec, nx, ny, 1, true);
        axis_transform(spec, nx, ny, 0, true);
        for (size_t i = 0; i < u.size(); ++i)
            out[i] = spec[i].real() + p.r * u[i] * (1.0 - u[i]);
    };

    const double adv_rate = std::abs(p.cx) / u0.grid.h(0) + std::abs(p.cy) / u0.grid.h(1);
    const double diff_rate = p.dx * kx2 + p.dy * ky2;
    double dt_lim = 1e9;
    if (adv_rate > 0.0) dt_lim = std::min(dt_lim, 0.4 / adv_rate);
    if (diff_rate > 0.0) dt_lim = std::min(dt_lim, 2.5 / diff_rate);
    if (p.r > 0.0) dt_lim = std::min(dt_lim, 0.5 / p.r);

    std::vector<double> u(u0.v), f(u.size()), u1(u.size()), u2(u.size());
    double elapsed = 0.0;
    long guard = 0;
    while (elapsed < t) {
        double dt = std::min(0.1 * dt_scale * dt_lim, t - elapsed);
        rhs(u, f);
        for (size_t i = 0; i < u.size(); ++i) u1[i] = u[i] + dt * f[i];
        rhs(u1, f);
        for (size_t i = 0; i < u.size(); ++i) u2[i] = 0.75 * u[i] + 0.25 * (u1[i] + dt * f[i]);
        rhs(u2, f);
        for (size_t i = 0; i < u.size(); ++i) u[i] = u[i] / 3.0 + 2.0 / 3.0 * (u2[i] + dt * f[i]);
        elapsed += dt;
        if (++guard > 20 * kMaxSubsteps) throw ReferenceDiverged("adr reference: step cap");
    }
    Field out(u0.grid, 1);
    out.v = u;
    check_state(out, "adr reference");
    return out;
}

}  // namespace

Field solve_exact_ad(const PdeParams& params, const Field& u0, double t) {
    if (u0.grid.boundary != Boundary::Periodic)
        throw BoundaryUnsupported("solve_exact_ad requires a periodic grid");
    const int nx = u0.grid.n[0], ny = u0.grid.n[1];
    const auto kx = wavenumbers(nx, u0.grid.length[0]);
    std::vector<double> ky;
    if (u0.grid.dim == 2) ky = wavenumbers(ny, u0.grid.length[1]);
    const double cx = (u0.grid.dim == 2) ? params.cx : params.c;
    const double cy = (u0.grid.dim == 2) ? params.cy : 0.0;
    const double dx = (u0.grid.dim == 2) ? params.dx : params.d;
    const double dy = (u0.grid.dim == 2) ? params.dy : 0.0;

    auto spec = dft(u0, 0);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const double kxv = kx[i];
            const double kyv = (u0.grid.dim == 2) ? ky[j] : 0.0;
            const std::complex<double> lam(-(dx * kxv * kxv + dy * kyv * kyv),
                                           -(cx * kxv + cy * kyv));
            spec[static_cast<size_t>(j) * nx + i] *= std::exp(lam * t);
        }
    return idft(spec, u0.grid);
}

Field solve_coupled_finestep(const PdeParams& params, const Field& u0, double t,
                             double dt_scale) {
    if (!std::isfinite(t) || t < 0.0) throw InvalidDuration("reference horizon must be >= 0");
    if (t == 0.0) return u0;
    switch (params.system) {
        case SystemTag::AD1D:
            return solve_exact_ad(params, u0, t);
        case SystemTag::Burgers1D:
            return burgers_finestep(params, u0, t, dt_scale);
        case SystemTag::SWE1D:
            return swe_finestep(params, u0, t, dt_scale);
        case SystemTag::ADR2D:
            return adr_finestep(params, u0, t, dt_scale);
        case SystemTag::KS1D: {
            auto traj = solve_ks_etdrk4(params, u0, t);
            return traj.back();
        }
    }
    throw ConfigError("solve_coupled_finestep: bad system tag");
}

std::vector<Field> solve_ks_etdrk4(const PdeParams& params, const Field& u0, double t,
                                   double dt) {
    if (u0.grid.boundary != Boundary::Periodic)
        throw BoundaryUnsupported("KS reference requires a periodic grid");
    const int n = u0.grid.n[0];
    const auto k = wavenumbers(n, u0.grid.length[0]);
    const long steps = std::max(1L, std::lround(t / dt));

    // Kassam-Trefethen coefficients via contour integration (32 points).
    const int M = 32;
    std::vector<double> E(n), E2(n), Q(n), f1(n), f2(n), f3(n);
    for (int m = 0; m < n; ++m) {
        const double L = k[m] * k[m] - k[m] * k[m] * k[m] * k[m];
        E[m] = std::exp(dt * L);
        E2[m] = std::exp(0.5 * dt * L);
        std::complex<double> q(0, 0), a(0, 0), b(0, 0), c(0, 0);
        for (int j = 0; j < M; ++j) {
            const double th = 3.14159265358979323846 * (j + 0.5) / M;
            const std::complex<double> r(std::cos(th), std::sin(th));
            const std::complex<double> lr = dt * L + r;
            const std::complex<double> elr = std::exp(lr);
            q += (std::exp(0.5 * lr) - 1.0) / lr;
            const std::complex<double> lr3 = lr * lr * lr;
            a += (-4.0 - lr + elr * (4.0 - 3.0 * lr + lr * lr)) / lr3;
            b += (2.0 + lr + elr * (-2.0 + lr)) / lr3;
            c += (-4.0 - 3.0 * lr - lr * lr + elr * (4.0 - lr)) / lr3;
        }
        Q[m] = dt * (q.real() / M);
        f1[m] = dt * (a.real() / M);
        f2[m] = dt * (b.real() / M);
        f3[m] = dt * (c.real() / M);
    }

    fft::cvec v = dft(u0, 0);
    dealias(v, n);
    std::vector<Field> snaps;
    snaps.reserve(steps + 1);
    snaps.push_back(idft(v, u0.grid));

    fft::cvec a(n), b(n), c(n);
    for (long s = 0; s < steps; ++s) {
        const auto Nv = transport_rhs(v, k);
        for (int m = 0; m < n; ++m) a[m] = E2[m] * v[m] + Q[m] * Nv[m];
        const auto Na = transport_rhs(a, k);
        for (int m = 0; m < n; ++m) b[m] = E2[m] * v[m] + Q[m] * Na[m];
        const auto Nb = transport_rhs(b, k);
        for (int m = 0; m < n; ++m) c[m] = E2[m] * a[m] + Q[m] * (2.0 * Nb[m] - Nv[m]);
        const auto Nc = transport_rhs(c, k);
        for (int m = 0; m < n; ++m)
            v[m] = E[m] * v[m] + f1[m] * Nv[m] + 2.0 * f2[m] * (Na[m] + Nb[m]) + f3[m] * Nc[m];
        Field snap = idft(v, u0.grid);
        if (!all_finite(snap, 1e8)) throw ReferenceDiverged("ks reference: non-finite state");
        snaps.push_back(std::move(snap));
    }
    return snaps;
}

}  // namespace hycop
