#pragma once

#include <string>
#include <vector>

#include "hycop/field.hpp"

namespace hycop {

enum class SystemTag { AD1D, Burgers1D, SWE1D, ADR2D, KS1D };

enum class Mechanism {
    Advection,           // linear transport (AD1D / ADR2D), exact spectral propagator
    Diffusion,           // exact spectral heat propagator
    Reaction,            // logistic source, pointwise RK4
    NonlinearAdvection,  // Burgers transport, SSPRK3 pseudospectral + dealiasing
    ViscousDiffusion,    // Burgers viscosity, exact spectral
    WaveAdvection,       // SWE transport flux (hu, h u^2), LLF finite volume
    Gravity,             // SWE pressure flux (0, g h^2 / 2), LLF finite volume
    KSLinear,            // exact spectral exp((k^2 - k^4) dt)
    KSNonlinear,         // -(u^2)_x / 2, SSPRK3 + dealiasing
    BoundaryWallTransfer // marker primitive for wall-variant dictionaries; identity on valid states
};

/// Physical parameters of a query.  Only the fields relevant to `system`
/// are meaningful; to_vector/from_vector give the fixed serialization order.
struct PdeParams {
    SystemTag system = SystemTag::AD1D;
    double c = 0.0;     // AD1D advection speed
    double d = 0.0;     // AD1D diffusivity
    double nu = 0.0;    // Burgers viscosity
    double g = 9.81;    // SWE gravity
    double cx = 0.0, cy = 0.0, dx = 0.0, dy = 0.0, r = 0.0;  // ADR2D
    double width = 32.0;  // KS domain factor W, L = 2*pi*W

    std::vector<double> to_vector() const;
    static PdeParams from_vector(SystemTag system, const std::vector<double>& v);
    static int param_count(SystemTag system);
};

struct PrimitiveSpec {
    SystemTag system;
    Mechanism mechanism;
    /// Formal convergence order of the sub-integrator in its step size
    /// (exact propagators are tagged 10 and report OrderUnmeasurable).
    int order_q = 1;
    Boundary boundary = Boundary::Periodic;

    std::string name() const;
};

/// The per-system primitive dictionary, in Strang order (index 0 is the
/// outer operator of the palindromic baseline).
std::vector<PrimitiveSpec> dictionary(SystemTag system);

/// Number of state channels (SWE1D carries h and hu; everything else 1).
int channel_count(SystemTag system);

/// Canonical grid for a system at resolution n per axis; KS needs params
/// because the domain length is 2*pi*W.
Grid grid_for(SystemTag system, const PdeParams& params, int n, Boundary b = Boundary::Periodic);

/// Default resolution per axis (AD/Burgers/SWE 64, ADR2D 32, KS 128).
int default_resolution(SystemTag system);

std::string to_string(SystemTag system);
SystemTag system_from_string(const std::string& s);
std::string to_string(Mechanism m);

}  // namespace hycop
