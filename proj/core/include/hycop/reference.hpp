#pragma once

#include "hycop/systems.hpp"

namespace hycop {

/// Closed-form advection-diffusion solution on a periodic grid: every Fourier
/// mode is multiplied by exp(-i c k t - D k^2 t).  Exact for the discrete
/// spectrum of u0 (pure translation when D == 0).
Field solve_exact_ad(const PdeParams& params, const Field& u0, double t);

/// Fully coupled method-of-lines reference: all mechanisms in one
/// right-hand side, SSPRK3, time step a factor `dt_scale` * 0.1 below the
/// CFL/stability limit.  Pass dt_scale = 0.5 to check self-convergence.
/// Throws ReferenceDiverged if the state leaves the finite range.
Field solve_coupled_finestep(const PdeParams& params, const Field& u0, double t,
                             double dt_scale = 1.0);

/// Kuramoto-Sivashinsky ETDRK4 reference (Kassam-Trefethen contour
/// integration, 32 quadrature points).  Returns snapshots at 0, dt, ...,
/// steps*dt where steps = round(t/dt).
std::vector<Field> solve_ks_etdrk4(const PdeParams& params, const Field& u0, double t,
                                   double dt = 0.02);

}  // namespace hycop
