#include "hycop/systems.hpp"

#include <cmath>

#include "hycop/errors.hpp"

namespace hycop {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

std::vector<double> PdeParams::to_vector() const {
    switch (system) {
        case SystemTag::AD1D: return {c, d};
        case SystemTag::Burgers1D: return {nu};
        case SystemTag::SWE1D: return {g};
        case SystemTag::ADR2D: return {cx, cy, dx, dy, r};
        case SystemTag::KS1D: return {width};
    }
    throw ConfigError("PdeParams::to_vector: bad system tag");
}

int PdeParams::param_count(SystemTag system) {
    switch (system) {
        case SystemTag::AD1D: return 2;
        case SystemTag::Burgers1D: return 1;
        case SystemTag::SWE1D: return 1;
        case SystemTag::ADR2D: return 5;
        case SystemTag::KS1D: return 1;
    }
    throw ConfigError("PdeParams::param_count: bad system tag");
}

PdeParams PdeParams::from_vector(SystemTag system, const std::vector<double>& v) {
    if (static_cast<int>(v.size()) != param_count(system))
        throw ParamShapeError("PdeParams::from_vector: wrong length");
    PdeParams p;
    p.system = system;
    switch (system) {
        case SystemTag::AD1D: p.c = v[0]; p.d = v[1]; break;
        case SystemTag::Burgers1D: p.nu = v[0]; break;
        case SystemTag::SWE1D: p.g = v[0]; break;
        case SystemTag::ADR2D: p.cx = v[0]; p.cy = v[1]; p.dx = v[2]; p.dy = v[3]; p.r = v[4]; break;
        case SystemTag::KS1D: p.width = v[0]; break;
    }
    return p;
}

std::vector<PrimitiveSpec> dictionary(SystemTag system) {
    switch (system) {
        case SystemTag::AD1D:
            return {{system, Mechanism::Advection, 10},
                    {system, Mechanism::Diffusion, 10}};
        case SystemTag::Burgers1D:
            return {{system, Mechanism::NonlinearAdvection, 3},
                    {system, Mechanism::ViscousDiffusion, 10}};
        case SystemTag::SWE1D:
            return {{system, Mechanism::WaveAdvection, 3},
                    {system, Mechanism::Gravity, 3}};
        case SystemTag::ADR2D:
            return {{system, Mechanism::Advection, 10},
                    {system, Mechanism::Diffusion, 10},
                    {system, Mechanism::Reaction, 4}};
        case SystemTag::KS1D:
            return {{system, Mechanism::KSLinear, 10},
                    {system, Mechanism::KSNonlinear, 3}};
    }
    throw ConfigError("dictionary: bad system tag");
}

int channel_count(SystemTag system) { return system == SystemTag::SWE1D ? 2 : 1; }

Grid grid_for(SystemTag system, const PdeParams& params, int n, Boundary b) {
    switch (system) {
        case SystemTag::AD1D: return Grid::make1d(n, 10.0, b);
        case SystemTag::Burgers1D: return Grid::make1d(n, 2.0, b);
        case SystemTag::SWE1D: return Grid::make1d(n, 10.0, b);
        case SystemTag::ADR2D: return Grid::make2d(n, n, 1.0, 1.0, b);
        case SystemTag::KS1D: return Grid::make1d(n, kTwoPi * params.width, b);
    }
    throw ConfigError("grid_for: bad system tag");
}

int default_resolution(SystemTag system) {
    switch (system) {
        case SystemTag::AD1D:
        case SystemTag::Burgers1D:
        case SystemTag::SWE1D: return 64;
        case SystemTag::ADR2D: return 32;
        case SystemTag::KS1D: return 128;
    }
    throw ConfigError("default_resolution: bad system tag");
}

std::string to_string(SystemTag system) {
    switch (system) {
        case SystemTag::AD1D: return "ad1d";
        case SystemTag::Burgers1D: return "burgers1d";
        case SystemTag::SWE1D: return "swe1d";
        case SystemTag::ADR2D: return "adr2d";
        case SystemTag::KS1D: return "ks1d";
    }
    return "?";
}

SystemTag system_from_string(const std::string& s) {
    if (s == "ad1d") return SystemTag::AD1D;
    if (s == "burgers1d") return SystemTag::Burgers1D;
    if (s == "swe1d") return SystemTag::SWE1D;
    if (s == "adr2d") return SystemTag::ADR2D;
    if (s == "ks1d") return SystemTag::KS1D;
    throw ConfigError("unknown system tag: " + s);
}

std::string to_string(Mechanism m) {
    switch (m) {
        case Mechanism::Advection: return "advection";
        case Mechanism::Diffusion: return "diffusion";
        case Mechanism::Reaction: return "reaction";
        case Mechanism::NonlinearAdvection: return "nonlinear_advection";
        case Mechanism::ViscousDiffusion: return "viscous_diffusion";
        case Mechanism::WaveAdvection: return "wave_advection";
        case Mechanism::Gravity: return "gravity";
        case Mechanism::KSLinear: return "ks_linear";
        case Mechanism::KSNonlinear: return "ks_nonlinear";
        case Mechanism::BoundaryWallTransfer: return "boundary_wall_transfer";
    }
    return "?";
}

std::string PrimitiveSpec::name() const {
    std::string n = to_string(mechanism);
    if (boundary == Boundary::ReflectiveWall) n += "/wall";
    return n;
}

}  // namespace hycop
