#include "hycop/primitives.hpp"

#include <cmath>

#include "hycop/errors.hpp"
#include "hycop/field_ops.hpp"

namespace hycop {

namespace {

long substep_count(double needed, const ApplyOptions& opts) {
    long n;
    if (opts.forced_substeps > 0) {
        n = opts.forced_substeps;
    } else {
        n = std::max(1L, static_cast<long>(std::ceil(needed)));
        n *= std::max(1, opts.substep_multiplier);
    }
    if (n > kMaxSubsteps)
        throw StiffnessCap("substep count " + std::to_string(n) + " exceeds cap");
    return n;
}

void check_tau(double tau) {
    if (!std::isfinite(tau) || tau < 0.0)
        throw InvalidDuration("primitive duration must be finite and >= 0, got " +
                              std::to_string(tau));
}

// --- exact spectral propagators -------------------------------------------

// Multiplies the spectrum of each channel by exp(lambda(kx,ky) * tau) where
// lambda = -(i cx kx + dx kx^2) - (i cy ky + dy ky^2)   (advection-diffusion)
// or      k^2 - k^4                                     (KS linear).
enum class SpectralKind { AdvectionOnly, DiffusionOnly, KSLinear };

Field spectral_propagate(const Field& u, double tau, SpectralKind kind, const PdeParams& p) {
    if (u.grid.boundary != Boundary::Periodic)
        throw BoundaryUnsupported("spectral primitive requires a periodic grid");
    const int nx = u.grid.n[0], ny = u.grid.n[1];
    const auto kx = wavenumbers(nx, u.grid.length[0]);
    std::vector<double> ky;
    if (u.grid.dim == 2) ky = wavenumbers(ny, u.grid.length[1]);

    Field out(u.grid, u.channels);
    for (int c = 0; c < u.channels; ++c) {
        auto spec = dft(u, c);
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                const double kxv = kx[i];
                const double kyv = (u.grid.dim == 2) ? ky[j] : 0.0;
                std::complex<double> lam(0.0, 0.0);
                switch (kind) {
                    case SpectralKind::AdvectionOnly: {
                        const double cxv = (u.grid.dim == 2) ? p.cx : p.c;
                        const double cyv = (u.grid.dim == 2) ? p.cy : 0.0;
                        lam = std::complex<double>(0.0, -(cxv * kxv + cyv * kyv));
                        break;
                    }
                    case SpectralKind::DiffusionOnly: {
                        double dxv, dyv = 0.0;
                        if (u.grid.dim == 2) {
                            dxv = p.dx;
                            dyv = p.dy;
                        } else {
                            dxv = (p.system == SystemTag::Burgers1D) ? p.nu : p.d;
                        }
                        lam = std::complex<double>(-(dxv * kxv * kxv + dyv * kyv * kyv), 0.0);
                        break;
                    }
                    case SpectralKind::KSLinear: {
                        const double k2 = kxv * kxv;
                        lam = std::complex<double>(k2 - k2 * k2, 0.0);
                        break;
                    }
                }
                spec[static_cast<size_t>(j) * nx + i] *= std::exp(lam * tau);
            }
        Field ch = idft(spec, u.grid);
        for (int i = 0; i < u.grid.total(); ++i) out.at(c, i) = ch.at(0, i);
    }
    return out;
}

// --- logistic reaction (pointwise RK4 on channel 0) ------------------------

Field reaction_rk4(const Field& u, double r, double tau, const ApplyOptions& opts) {
    const long n = substep_count(std::abs(r) * tau / 0.1, opts);
    const double dt = tau / static_cast<double>(n);
    Field out = u;
    double* h = out.channel(0);
    auto f = [r](double x) { return r * x * (1.0 - x); };
    for (int i = 0; i < u.grid.total(); ++i) {
        double x = h[i];
        for (long s = 0; s < n; ++s) {
            const double k1 = f(x);
            const double k2 = f(x + 0.5 * dt * k1);
            const double k3 = f(x + 0.5 * dt * k2);
            const double k4 = f(x + dt * k3);
            x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        h[i] = x;
    }
    return out;
}

// --- pseudospectral conservative transport u_t = -(u^2)_x / 2 --------------
// Shared by Burgers NonlinearAdvection and KSNonlinear.  The state lives in
// dealiased spectral space for the whole step, so the upper third of the
// spectrum is exactly zero after every substep.

Field nonlinear_advection(const Field& u, double tau, const ApplyOptions& opts) {
    if (u.grid.boundary != Boundary::Periodic)
        throw BoundaryUnsupported("nonlinear advection requires a periodic grid");
    const int n = u.grid.n[0];
    const auto k = wavenumbers(n, u.grid.length[0]);

    double umax = 0.0;
    for (int i = 0; i < n; ++i) umax = std::max(umax, std::abs(u.at(0, i)));
    const long steps = substep_count(umax * tau / (0.4 * u.grid.h(0)), opts);
    const double dt = tau / static_cast<double>(steps);

    fft::cvec spec = dft(u, 0);
    dealias(spec, n);

    auto rhs = [&](const fft::cvec& s) {
        fft::cvec phys = s;
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
    };

    for (long s = 0; s < steps; ++s) {
        const auto f0 = rhs(spec);
        fft::cvec u1(n), u2(n);
        for (int m = 0; m < n; ++m) u1[m] = spec[m] + dt * f0[m];
        const auto f1 = rhs(u1);
        for (int m = 0; m < n; ++m) u2[m] = 0.75 * spec[m] + 0.25 * (u1[m] + dt * f1[m]);
        const auto f2 = rhs(u2);
        for (int m = 0; m < n; ++m)
            spec[m] = spec[m] / 3.0 + 2.0 / 3.0 * (u2[m] + dt * f2[m]);
    }
    return idft(spec, u.grid);
}

// --- SWE finite volume ------------------------------------------------------

struct SweCell {
    double h, hu;
};

SweCell swe_ghost(const Field& u, int i) {
    // Periodic wrap or wall reflection (h mirrored, hu negated).
    const int n = u.grid.n[0];
    if (u.grid.boundary == Boundary::Periodic) {
        const int w = ((i % n) + n) % n;
        return {u.at(0, w), u.at(1, w)};
    }
    if (i < 0) return {u.at(0, -1 - i), -u.at(1, -1 - i)};
    if (i >= n) return {u.at(0, 2 * n - 1 - i), -u.at(1, 2 * n - 1 - i)};
    return {u.at(0, i), u.at(1, i)};
}

constexpr double kHFloor = 1e-8;

}  // namespace

void swe_rhs(const Field& u, double g, bool advective, bool gravity, Field& out) {
    const int n = u.grid.n[0];
    const double h = u.grid.h(0);
    // Interface fluxes, local Lax-Friedrichs per enabled sub-flux so that the
    // two sub-flows sum exactly to the coupled operator.
    std::vector<double> fh(n + 1), fhu(n + 1);
    for (int e = 0; e <= n; ++e) {
        const SweCell l = swe_ghost(u, e - 1);
        const SweCell r = swe_ghost(u, e);
        const double ul = l.hu / std::max(l.h, kHFloor);
        const double ur = r.hu / std::max(r.h, kHFloor);
        double Fh = 0.0, Fhu = 0.0;
        if (advective) {
            const double a = std::max(std::abs(ul), std::abs(ur));
            Fh += 0.5 * (l.hu + r.hu) - 0.5 * a * (r.h - l.h);
            Fhu += 0.5 * (l.hu * ul + r.hu * ur) - 0.5 * a * (r.hu - l.hu);
        }
        if (gravity) {
            const double a = std::max(std::sqrt(g * std::max(l.h, kHFloor)),
                                      std::sqrt(g * std::max(r.h, kHFloor)));
            Fhu += 0.25 * g * (l.h * l.h + r.h * r.h) - 0.5 * a * (r.hu - l.hu);
            Fh += -0.5 * a * (r.h - l.h);
        }
        fh[e] = Fh;
        fhu[e] = Fhu;
    }
    for (int i = 0; i < n; ++i) {
        out.at(0, i) = -(fh[i + 1] - fh[i]) / h;
        out.at(1, i) = -(fhu[i + 1] - fhu[i]) / h;
    }
}

double swe_max_speed(const Field& u, double g, bool advective, bool gravity) {
    double a = 0.0;
    for (int i = 0; i < u.grid.n[0]; ++i) {
        const double hh = std::max(u.at(0, i), kHFloor);
        double s = 0.0;
        if (advective) s += std::abs(u.at(1, i) / hh);
        if (gravity) s += std::sqrt(g * hh);
        a = std::max(a, s);
    }
    return a;
}

namespace {

Field swe_fv_step(const Field& u, double g, bool advective, bool gravity, double tau,
                  const ApplyOptions& opts) {
    const double a = swe_max_speed(u, g, advective, gravity);
    const long steps = substep_count(a * tau / (0.4 * u.grid.h(0)), opts);
    const double dt = tau / static_cast<double>(steps);
    Field state = u;
    Field k(u.grid, 2), u1(u.grid, 2), u2(u.grid, 2);
    for (long s = 0; s < steps; ++s) {
        swe_rhs(state, g, advective, gravity, k);
        for (size_t i = 0; i < state.v.size(); ++i) u1.v[i] = state.v[i] + dt * k.v[i];
        swe_rhs(u1, g, advective, gravity, k);
        for (size_t i = 0; i < state.v.size(); ++i)
            u2.v[i] = 0.75 * state.v[i] + 0.25 * (u1.v[i] + dt * k.v[i]);
        swe_rhs(u2, g, advective, gravity, k);
        for (size_t i = 0; i < state.v.size(); ++i)
            state.v[i] = state.v[i] / 3.0 + 2.0 / 3.0 * (u2.v[i] + dt * k.v[i]);
    }
    return state;
}

}  // namespace

Field apply_primitive(const PrimitiveSpec& spec, const PdeParams& params, const Field& u,
                      double tau, const ApplyOptions& opts) {
    check_tau(tau);
    if (u.channels != channel_count(spec.system))
        throw StateShapeError("apply_primitive: channel count mismatch for " + spec.name());
    if (spec.boundary != u.grid.boundary)
        throw BoundaryUnsupported("apply_primitive: " + spec.name() +
                                  " does not match the field's boundary");
    if (tau == 0.0) return u;

    switch (spec.mechanism) {
        case Mechanism::Advection:
            return spectral_propagate(u, tau, SpectralKind::AdvectionOnly, params);
        case Mechanism::Diffusion:
        case Mechanism::ViscousDiffusion:
            return spectral_propagate(u, tau, SpectralKind::DiffusionOnly, params);
        case Mechanism::KSLinear:
            return spectral_propagate(u, tau, SpectralKind::KSLinear, params);
        case Mechanism::Reaction:
            return reaction_rk4(u, params.r, tau, opts);
        case Mechanism::NonlinearAdvection:
        case Mechanism::KSNonlinear:
            return nonlinear_advection(u, tau, opts);
        case Mechanism::WaveAdvection:
            return swe_fv_step(u, params.g, true, false, tau, opts);
        case Mechanism::Gravity:
            return swe_fv_step(u, params.g, false, true, tau, opts);
        case Mechanism::BoundaryWallTransfer:
            // Wall handling lives in the flux stencils of the wall-variant
            // primitives; this marker primitive is the identity on any valid
            // SWE state.
            if (spec.system != SystemTag::SWE1D)
                throw BoundaryUnsupported("boundary_wall_transfer is SWE1D-only");
            return u;
    }
    throw ConfigError("apply_primitive: bad mechanism");
}

std::optional<double> primitive_convergence_order(const PrimitiveSpec& spec,
                                                  const PdeParams& params, const Field& u,
                                                  double tau) {
    check_tau(tau);
    // Substep-halving Richardson at forced counts; 2 base substeps keep the
    // halving meaningful even when the CFL count would be 1.
    const int base = 2;
    ApplyOptions o;
    o.forced_substeps = base;
    const Field coarse = apply_primitive(spec, params, u, tau, o);
    o.forced_substeps = base * 2;
    const Field fine = apply_primitive(spec, params, u, tau, o);
    o.forced_substeps = base * 16;
    const Field ref = apply_primitive(spec, params, u, tau, o);
    const double e1 = rmse(coarse, ref);
    const double e2 = rmse(fine, ref);
    if (e2 < 1e-13 || e1 < 1e-13) return std::nullopt;
    return std::log2(e1 / e2);
}

PrimitiveSpec swap_boundary_variant(const PrimitiveSpec& spec) {
    if (spec.system != SystemTag::SWE1D)
        throw BoundarySwapUnsupported("no boundary variant for " + to_string(spec.system));
    PrimitiveSpec out = spec;
    out.boundary = (spec.boundary == Boundary::Periodic) ? Boundary::ReflectiveWall
                                                         : Boundary::Periodic;
    return out;
}

std::vector<PrimitiveSpec> swap_boundary_variant(const std::vector<PrimitiveSpec>& dict) {
    std::vector<PrimitiveSpec> out;
    out.reserve(dict.size());
    for (const auto& s : dict) out.push_back(swap_boundary_variant(s));
    return out;
}

}  // namespace hycop
