#pragma once

#include <optional>

#include "hycop/systems.hpp"

namespace hycop {

struct ApplyOptions {
    /// Multiplies the natural (CFL-derived) substep count; the error
    /// decomposition re-executes programs at 10x.
    int substep_multiplier = 1;
    /// If > 0, overrides the substep count entirely (order measurement).
    int forced_substeps = 0;
};

/// Advances one sub-flow: u -> Phi_tau(u).  tau == 0 returns the input
/// bit-exactly.  Throws InvalidDuration for negative/non-finite tau,
/// StateShapeError on shape mismatch, BoundaryUnsupported when the spec's
/// boundary does not match the field's grid, and StiffnessCap past 1e6
/// substeps.
Field apply_primitive(const PrimitiveSpec& spec, const PdeParams& params, const Field& u,
                      double tau, const ApplyOptions& opts = {});

/// Measured temporal convergence order via substep-halving Richardson:
/// log2 of the error ratio between a step at the natural substep count and
/// one at twice that, both against a much finer (16x) reference.  Exact
/// propagators sit at the noise floor and return nullopt (unmeasurable).
std::optional<double> primitive_convergence_order(const PrimitiveSpec& spec,
                                                  const PdeParams& params, const Field& u,
                                                  double tau);

/// Wall-reflection variant of a primitive (SWE1D only): same mechanism with
/// reflective-wall ghost cells (h mirrored, hu negated).  Involution; throws
/// BoundarySwapUnsupported for systems without a boundary variant.
PrimitiveSpec swap_boundary_variant(const PrimitiveSpec& spec);
std::vector<PrimitiveSpec> swap_boundary_variant(const std::vector<PrimitiveSpec>& dict);

/// Semi-discrete SWE right-hand side shared by the FV primitives and the
/// coupled reference solver.  The advective and gravity pieces are exactly
/// additive: rhs(adv) + rhs(grav) == rhs(adv+grav) at any state, because the
/// local Lax-Friedrichs dissipation coefficients add the same way the fluxes
/// do.
void swe_rhs(const Field& u, double g, bool advective, bool gravity, Field& out);

/// Max signal speed of the enabled SWE fluxes (sum of the per-flux speeds
/// when both are on, matching the dissipation used in swe_rhs).
double swe_max_speed(const Field& u, double g, bool advective, bool gravity);

/// Substep cap guard shared with the reference solvers.
constexpr long kMaxSubsteps = 1000000;

}  // namespace hycop
