#include "hycop/dataset.hpp"

#include <atomic>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "hycop/errors.hpp"
#include "hycop/parallel.hpp"
#include "hycop/rng.hpp"

#include "json.hpp"

static_assert(std::endian::native == std::endian::little,
              "dataset records are written as native little-endian float64");

namespace hycop {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Uniform draw over a union of intervals, weighted by interval length.
double uniform_union(Rng& rng, std::initializer_list<std::pair<double, double>> parts) {
    double total = 0.0;
    for (const auto& p : parts) total += p.second - p.first;
    double x = rng.uniform(0.0, total);
    for (const auto& p : parts) {
        const double len = p.second - p.first;
        if (x <= len) return p.first + x;
        x -= len;
    }
    return parts.begin()->first;
}

// Periodic bump helpers: sum over nearest images keeps ICs C^inf on the torus.
double periodic_gauss(double x, double x0, double w, double L) {
    double s = 0.0;
    for (int img = -1; img <= 1; ++img) {
        const double d = x - x0 - img * L;
        s += std::exp(-d * d / (2.0 * w * w));
    }
    return s;
}

double periodic_gauss2(double x, double y, double x0, double y0, double w, double lx, double ly) {
    double s = 0.0;
    for (int ix = -1; ix <= 1; ++ix)
        for (int iy = -1; iy <= 1; ++iy) {
            const double dx = x - x0 - ix * lx;
            const double dy = y - y0 - iy * ly;
            s += std::exp(-(dx * dx + dy * dy) / (2.0 * w * w));
        }
    return s;
}

// Smooth plateau between x0 and x0+wid (tanh edges), periodized.
double periodic_plateau(double x, double x0, double wid, double delta, double L) {
    double s = 0.0;
    for (int img = -1; img <= 1; ++img) {
        const double d = x - x0 - img * L;
        s += 0.5 * (std::tanh(d / delta) - std::tanh((d - wid) / delta));
    }
    return s;
}

}  // namespace

int ic_family_count(SystemTag system) {
    switch (system) {
        case SystemTag::AD1D: return 5;
        case SystemTag::Burgers1D: return 6;
        case SystemTag::SWE1D: return 5;
        case SystemTag::ADR2D: return 6;
        case SystemTag::KS1D: return 2;
    }
    throw ConfigError("ic_family_count: bad system tag");
}

IcDescriptor sample_ic_descriptor(SystemTag system, int family, std::uint64_t seed, bool ood) {
    if (family != kWallDamBreak && (family < 0 || family >= ic_family_count(system)))
        throw UnknownIcFamily("family " + std::to_string(family) + " for " + to_string(system));
    Rng rng(seed, {0x1cULL, static_cast<std::uint64_t>(family)});
    IcDescriptor d;
    d.family = family;
    auto& p = d.p;

    switch (system) {
        case SystemTag::AD1D: {
            const double L = 10.0;
            switch (family) {
                case 0:  // Gaussian pulse: a, x0, w
                    p[0] = rng.uniform(0.5, 1.5);
                    p[1] = rng.uniform(0.0, L);
                    p[2] = ood ? uniform_union(rng, {{0.15, 0.4}, {2.0, 3.0}})
                               : rng.uniform(0.5, 1.5);
                    break;
                case 1:  // smoothed step: a, x0, wid, delta (OOD: multi-step via p[4..])
                    p[0] = rng.uniform(0.5, 1.5);
                    p[1] = rng.uniform(0.0, L);
                    p[2] = rng.uniform(2.0, 4.0);
                    p[3] = ood ? rng.uniform(0.05, 0.1) : rng.uniform(0.1, 0.5);
                    p[4] = ood ? 1.0 : 0.0;  // second plateau on
                    p[5] = rng.uniform(0.0, L);
                    p[6] = rng.uniform(1.0, 2.0);
                    break;
                case 2:  // sinusoid: a, mode, phase
                    p[0] = rng.uniform(0.5, 1.5);
                    p[1] = ood ? 5 + rng.choice(4) : 1 + rng.choice(3);
                    p[2] = rng.uniform(0.0, kTwoPi);
                    break;
                case 3:  // multi-Gaussian: three (a, x0, w) triples
                    for (int b = 0; b < 3; ++b) {
                        p[3 * b] = (b == 2 && rng.uniform() < 0.5) ? 0.0 : rng.uniform(0.3, 1.0);
                        p[3 * b + 1] = rng.uniform(0.0, L);
                        p[3 * b + 2] = rng.uniform(0.4, 1.0);
                    }
                    break;
                case 4: {  // random low-frequency Fourier: (cos, sin) pairs, 4 modes
                    const int base = ood ? 3 : 1;
                    p[8] = base;
                    for (int m = 0; m < 4; ++m) {
                        p[2 * m] = rng.uniform(-1.0, 1.0) / (m + base);
                        p[2 * m + 1] = rng.uniform(-1.0, 1.0) / (m + base);
                    }
                    break;
                }
            }
            break;
        }
        case SystemTag::Burgers1D: {
            const double L = 2.0;
            switch (family) {
                case 0:  // step: a, x0, wid, delta (OOD sharper + larger + second step)
                    p[0] = ood ? rng.uniform(0.8, 1.5) : rng.uniform(0.3, 1.0);
                    p[1] = rng.uniform(0.0, L);
                    p[2] = rng.uniform(0.5, 1.0);
                    p[3] = ood ? rng.uniform(0.02, 0.05) : rng.uniform(0.05, 0.2);
                    p[4] = ood ? 1.0 : 0.0;
                    p[5] = rng.uniform(0.0, L);
                    p[6] = rng.uniform(0.2, 0.5);
                    break;
                case 1:  // sinusoid
                    p[0] = ood ? rng.uniform(0.8, 1.5) : rng.uniform(0.3, 1.0);
                    p[1] = ood ? 3 + rng.choice(2) : 1 + rng.choice(2);
                    p[2] = rng.uniform(0.0, kTwoPi);
                    break;
                case 2:  // Gaussian pulse
                    p[0] = rng.uniform(0.3, 1.0);
                    p[1] = rng.uniform(0.0, L);
                    p[2] = ood ? rng.uniform(0.04, 0.1) : rng.uniform(0.1, 0.4);
                    break;
                case 3:  // sawtooth (truncated Fourier): a, phase
                    p[0] = rng.uniform(0.3, 0.8);
                    p[1] = rng.uniform(0.0, kTwoPi);
                    break;
                case 4:  // smooth tanh transition: a, x0, delta
                    p[0] = rng.uniform(0.3, 1.0);
                    p[1] = rng.uniform(0.0, L);
                    p[2] = ood ? rng.uniform(0.08, 0.2) : rng.uniform(0.2, 0.6);
                    break;
                case 5: {  // random low-frequency Fourier, 3 modes
                    const double amp = ood ? 0.75 : 0.5;
                    p[6] = ood ? 2 : 1;  // base mode
                    for (int m = 0; m < 3; ++m) {
                        p[2 * m] = rng.uniform(-1.0, 1.0) * amp / (m + 1);
                        p[2 * m + 1] = rng.uniform(-1.0, 1.0) * amp / (m + 1);
                    }
                    break;
                }
            }
            break;
        }
        case SystemTag::SWE1D: {
            const double L = 10.0;
            const double boost = ood ? 1.8 : 1.0;  // extreme-Froude extrapolation
            if (family == kWallDamBreak) {
                p[0] = rng.uniform(0.2, 0.4);    // dam height above h=1
                p[1] = rng.uniform(0.8, 1.6);    // dam position (near the left wall)
                p[2] = rng.uniform(0.10, 0.20);  // edge smoothing
                break;
            }
            switch (family) {
                case 0:  // Gaussian wave perturbation on h
                    p[0] = boost * rng.uniform(0.05, 0.25);
                    p[1] = rng.uniform(0.0, L);
                    p[2] = rng.uniform(0.4, 1.0);
                    break;
                case 1:  // smoothed dam-break plateau
                    p[0] = boost * rng.uniform(0.1, 0.3);
                    p[1] = rng.uniform(0.0, L);
                    p[2] = rng.uniform(2.0, 4.0);
                    p[3] = rng.uniform(0.15, 0.4);
                    break;
                case 2: {  // Fourier superposition on h and hu
                    const double amp = boost * rng.uniform(0.03, 0.12);
                    for (int m = 0; m < 3; ++m) {
                        p[2 * m] = rng.uniform(-1.0, 1.0) * amp / (m + 1);
                        p[2 * m + 1] = rng.uniform(-1.0, 1.0) * amp / (m + 1);
                    }
                    p[6] = rng.uniform(-1.0, 1.0) * 0.3 * amp;
                    p[7] = rng.uniform(-1.0, 1.0) * 0.3 * amp;
                    break;
                }
                case 3:  // sharp step transitions (hydraulic-jump-like in OOD)
                    p[0] = boost * rng.uniform(0.1, 0.3);
                    p[1] = rng.uniform(0.0, L);
                    p[2] = rng.uniform(1.5, 3.0);
                    p[3] = ood ? rng.uniform(0.05, 0.08) : rng.uniform(0.08, 0.15);
                    break;
                case 4:  // momentum dipole (rarefaction-like outflow)
                    p[0] = boost * rng.uniform(0.1, 0.3);
                    p[1] = rng.uniform(0.0, L);
                    p[2] = rng.uniform(0.5, 1.0);
                    p[3] = rng.uniform(1.5, 3.0);  // dipole separation
                    break;
            }
            break;
        }
        case SystemTag::ADR2D: {
            const double base = ood ? rng.uniform(0.55, 0.8) : rng.uniform(0.05, 0.2);
            p[11] = base;
            switch (family) {
                case 0:  // Gaussian bump: a, x0, y0, w
                    p[0] = rng.uniform(0.3, 0.6);
                    p[1] = rng.uniform(0.0, 1.0);
                    p[2] = rng.uniform(0.0, 1.0);
                    p[3] = ood ? uniform_union(rng, {{0.03, 0.06}, {0.25, 0.35}})
                               : rng.uniform(0.08, 0.2);
                    break;
                case 1:  // smoothed step front along a lattice direction
                    p[0] = rng.uniform(0.3, 0.6);
                    p[1] = rng.uniform(0.0, 1.0);
                    p[2] = rng.uniform(0.0, 1.0);
                    p[3] = ood ? rng.uniform(0.05, 0.15) : rng.uniform(0.2, 0.5);
                    p[4] = rng.choice(3);  // direction: x, y, diagonal
                    break;
                case 2:  // ring
                    p[0] = rng.uniform(0.3, 0.6);
                    p[1] = rng.uniform(0.0, 1.0);
                    p[2] = rng.uniform(0.0, 1.0);
                    p[3] = rng.uniform(0.15, 0.25);  // radius
                    p[4] = rng.uniform(0.04, 0.06);  // width
                    break;
                case 3:  // stripes
                    p[0] = rng.uniform(0.3, 0.6);
                    p[1] = ood ? 3 + rng.choice(3) : 1 + rng.choice(2);
                    p[2] = rng.choice(2) ? 1 + rng.choice(2) : 0;
                    p[3] = rng.uniform(0.0, kTwoPi);
                    break;
                case 4:  // two Gaussians
                    for (int b = 0; b < 2; ++b) {
                        p[4 * b] = rng.uniform(0.2, 0.45);
                        p[4 * b + 1] = rng.uniform(0.0, 1.0);
                        p[4 * b + 2] = rng.uniform(0.0, 1.0);
                        p[4 * b + 3] = rng.uniform(0.08, 0.18);
                    }
                    break;
                case 5:  // sigmoidal transition
                    p[0] = rng.uniform(0.3, 0.6);
                    p[1] = rng.uniform(0.0, 1.0);
                    p[2] = rng.uniform(0.0, 1.0);
                    p[3] = ood ? rng.uniform(0.1, 0.2) : rng.uniform(0.25, 0.6);
                    break;
            }
            break;
        }
        case SystemTag::KS1D: {
            switch (family) {
                case 0:  // two-mode sinusoid: a1, m1, phi1, a2, m2, phi2
                    p[0] = rng.uniform(0.5, 1.5);
                    p[1] = 1 + rng.choice(8);
                    p[2] = rng.uniform(0.0, kTwoPi);
                    p[3] = rng.uniform(0.5, 1.5);
                    p[4] = 1 + rng.choice(8);
                    p[5] = rng.uniform(0.0, kTwoPi);
                    break;
                case 1: {  // low-frequency random Fourier, modes 1..6 (zero-mean)
                    const double amp = rng.uniform(0.5, 1.5);
                    for (int m = 0; m < 6; ++m)
                        p[m] = rng.uniform(-1.0, 1.0) * amp / std::sqrt(m + 1.0);
                    p[6] = rng.uniform(0.0, kTwoPi);
                    break;
                }
            }
            break;
        }
    }
    return d;
}

Field build_ic(SystemTag system, const IcDescriptor& ic, const Grid& grid) {
    const auto& p = ic.p;
    Field f(grid, channel_count(system));
    const double L = grid.length[0];

    switch (system) {
        case SystemTag::AD1D: {
            for (int i = 0; i < grid.n[0]; ++i) {
                const double x = grid.x(0, i);
                double u = 0.0;
                switch (ic.family) {
                    case 0: u = p[0] * periodic_gauss(x, p[1], p[2], L); break;
                    case 1:
                        u = p[0] * periodic_plateau(x, p[1], p[2], p[3], L);
                        if (p[4] > 0.5) u += 0.5 * p[0] * periodic_plateau(x, p[5], p[6], p[3], L);
                        break;
                    case 2: u = p[0] * std::sin(kTwoPi * p[1] * x / L + p[2]); break;
                    case 3:
                        for (int b = 0; b < 3; ++b)
                            u += p[3 * b] * periodic_gauss(x, p[3 * b + 1], p[3 * b + 2], L);
                        break;
                    case 4: {
                        const int base = static_cast<int>(p[8]);
                        for (int m = 0; m < 4; ++m) {
                            const double th = kTwoPi * (m + base) * x / L;
                            u += p[2 * m] * std::cos(th) + p[2 * m + 1] * std::sin(th);
                        }
                        break;
                    }
                    default: throw UnknownIcFamily("ad1d family " + std::to_string(ic.family));
                }
                f.at(0, i) = u;
            }
            break;
        }
        case SystemTag::Burgers1D: {
            for (int i = 0; i < grid.n[0]; ++i) {
                const double x = grid.x(0, i);
                double u = 0.0;
                switch (ic.family) {
                    case 0:
                        u = p[0] * periodic_plateau(x, p[1], p[2], p[3], L);
                        if (p[4] > 0.5) u += 0.5 * p[0] * periodic_plateau(x, p[5], p[6], p[3], L);
                        break;
                    case 1: u = p[0] * std::sin(kTwoPi * p[1] * x / L + p[2]); break;
                    case 2: u = p[0] * periodic_gauss(x, p[1], p[2], L); break;
                    case 3:
                        for (int m = 1; m <= 5; ++m)
                            u += std::sin(m * (kTwoPi * x / L + p[1])) / m;
                        u *= p[0] * 2.0 / 3.14159265358979323846;
                        break;
                    case 4: u = p[0] * std::tanh(std::cos(kTwoPi * (x - p[1]) / L) / p[2]); break;
                    case 5: {
                        const int base = static_cast<int>(p[6]);
                        for (int m = 0; m < 3; ++m) {
                            const double th = kTwoPi * (m + base) * x / L;
                            u += p[2 * m] * std::cos(th) + p[2 * m + 1] * std::sin(th);
                        }
                        break;
                    }
                    default: throw UnknownIcFamily("burgers1d family " + std::to_string(ic.family));
                }
                f.at(0, i) = u;
            }
            break;
        }
        case SystemTag::SWE1D: {
            for (int i = 0; i < grid.n[0]; ++i) {
                const double x = grid.x(0, i);
                double h = 1.0, hu = 0.0;
                switch (ic.family) {
                    case 0: h += p[0] * periodic_gauss(x, p[1], p[2], L); break;
                    case 1:
                    case 3: h += p[0] * periodic_plateau(x, p[1], p[2], p[3], L); break;
                    case 2:
                        for (int m = 0; m < 3; ++m) {
                            const double th = kTwoPi * (m + 1) * x / L;
                            h += p[2 * m] * std::cos(th) + p[2 * m + 1] * std::sin(th);
                        }
                        hu = p[6] * std::cos(kTwoPi * x / L) + p[7] * std::sin(kTwoPi * x / L);
                        break;
                    case 4:
                        hu = p[0] * (periodic_gauss(x, p[1], p[2], L) -
                                     periodic_gauss(x, p[1] + p[3], p[2], L));
                        break;
                    case kWallDamBreak:
                        // Higher water left of the dam; wall-consistent but
                        // deliberately periodic-inconsistent (h(0) != h(L)).
                        h = 1.0 + p[0] * 0.5 * (1.0 - std::tanh((x - p[1]) / p[2]));
                        break;
                    default: throw UnknownIcFamily("swe1d family " + std::to_string(ic.family));
                }
                f.at(0, i) = std::max(h, 0.05);
                f.at(1, i) = hu;
            }
            break;
        }
        case SystemTag::ADR2D: {
            const double base = p[11];
            for (int j = 0; j < grid.n[1]; ++j)
                for (int i = 0; i < grid.n[0]; ++i) {
                    const double x = grid.x(0, i), y = grid.x(1, j);
                    double u = base;
                    switch (ic.family) {
                        case 0: u += p[0] * periodic_gauss2(x, y, p[1], p[2], p[3], 1.0, 1.0); break;
                        case 1: {
                            const int dir = static_cast<int>(p[4]);
                            const double s = (dir == 0)   ? std::sin(kTwoPi * (x - p[1]))
                                             : (dir == 1) ? std::sin(kTwoPi * (y - p[2]))
                                                          : std::sin(kTwoPi * (x - p[1] + y - p[2]));
                            u += p[0] * 0.5 * (1.0 + std::tanh(s / p[3]));
                            break;
                        }
                        case 2: {
                            // Min-image radial distance (ring stays inside one cell image).
                            double dx = std::abs(x - p[1]);
                            dx = std::min(dx, 1.0 - dx);
                            double dy = std::abs(y - p[2]);
                            dy = std::min(dy, 1.0 - dy);
                            const double r = std::sqrt(dx * dx + dy * dy);
                            u += p[0] * std::exp(-(r - p[3]) * (r - p[3]) / (2.0 * p[4] * p[4]));
                            break;
                        }
                        case 3: {
                            const double th = kTwoPi * (p[1] * x + p[2] * y) + p[3];
                            u += p[0] * 0.5 * (1.0 + std::sin(th));
                            break;
                        }
                        case 4:
                            for (int b = 0; b < 2; ++b)
                                u += p[4 * b] * periodic_gauss2(x, y, p[4 * b + 1], p[4 * b + 2],
                                                                p[4 * b + 3], 1.0, 1.0);
                            break;
                        case 5:
                            u += p[0] * 0.5 *
                                 (1.0 + std::tanh(std::cos(kTwoPi * (x - p[1])) *
                                                  std::cos(kTwoPi * (y - p[2])) / p[3]));
                            break;
                        default:
                            throw UnknownIcFamily("adr2d family " + std::to_string(ic.family));
                    }
                    f.at2(0, i, j) = std::min(u, 0.99);
                }
            break;
        }
        case SystemTag::KS1D: {
            for (int i = 0; i < grid.n[0]; ++i) {
                const double x = grid.x(0, i);
                double u = 0.0;
                switch (ic.family) {
                    case 0:
                        u = p[0] * std::sin(kTwoPi * p[1] * x / L + p[2]) +
                            p[3] * std::sin(kTwoPi * p[4] * x / L + p[5]);
                        break;
                    case 1:
                        for (int m = 0; m < 6; ++m)
                            u += p[m] * std::sin(kTwoPi * (m + 1) * x / L + p[6] * (m + 1));
                        break;
                    default: throw UnknownIcFamily("ks1d family " + std::to_string(ic.family));
                }
                f.at(0, i) = u;
            }
            // Mean subtraction (the KS attractor lives in the zero-mean slice).
            double mean = 0.0;
            for (int i = 0; i < grid.n[0]; ++i) mean += f.at(0, i);
            mean /= grid.n[0];
            for (int i = 0; i < grid.n[0]; ++i) f.at(0, i) -= mean;
            break;
        }
    }
    return f;
}

Field sample_ic(SystemTag system, int family, std::uint64_t seed) {
    const auto d = sample_ic_descriptor(system, family, seed, false);
    PdeParams p;
    p.system = system;
    const Grid g = grid_for(system, p, default_resolution(system));
    return build_ic(system, d, g);
}

PdeParams sample_params(SystemTag system, std::uint64_t seed, bool ood) {
    Rng rng(seed, {0x9aULL});
    PdeParams p;
    p.system = system;
    switch (system) {
        case SystemTag::AD1D:
            p.c = ood ? uniform_union(rng, {{0.1, 0.5}, {3.0, 5.0}}) : rng.uniform(0.5, 3.0);
            p.d = ood ? uniform_union(rng, {{0.001, 0.01}, {0.5, 1.0}}) : rng.uniform(0.01, 0.5);
            break;
        case SystemTag::Burgers1D:
            p.nu = ood ? uniform_union(rng, {{0.002, 0.005}, {0.1, 0.2}}) : rng.uniform(0.005, 0.1);
            break;
        case SystemTag::SWE1D:
            p.g = ood ? uniform_union(rng, {{7.0, 9.0}, {11.0, 13.0}}) : rng.uniform(9.0, 11.0);
            break;
        case SystemTag::ADR2D:
            p.cx = ood ? uniform_union(rng, {{0.1, 0.2}, {1.5, 2.5}}) : rng.uniform(0.2, 1.5);
            p.cy = ood ? uniform_union(rng, {{0.1, 0.2}, {1.5, 2.5}}) : rng.uniform(0.2, 1.5);
            p.dx = ood ? uniform_union(rng, {{0.01, 0.05}, {0.2, 0.4}}) : rng.uniform(0.05, 0.2);
            p.dy = ood ? uniform_union(rng, {{0.01, 0.05}, {0.2, 0.4}}) : rng.uniform(0.05, 0.2);
            p.r = ood ? uniform_union(rng, {{0.05, 0.1}, {1.0, 2.5}}) : rng.uniform(0.1, 1.0);
            break;
        case SystemTag::KS1D:
            p.width = ood ? rng.uniform(40.0, 50.0) : rng.uniform(24.0, 40.0);
            break;
    }
    return p;
}

double eval_horizon(SystemTag system) {
    switch (system) {
        case SystemTag::AD1D:
        case SystemTag::Burgers1D: return 0.5;
        case SystemTag::SWE1D: return 0.3;
        case SystemTag::ADR2D: return 0.2;
        case SystemTag::KS1D: return 0.0;  // sampled per query
    }
    throw ConfigError("eval_horizon: bad system tag");
}

double sample_horizon(SystemTag system, std::uint64_t seed, Split split, bool ood) {
    Rng rng(seed, {0x7aULL});
    if (system == SystemTag::KS1D) {
        const double t = ood ? rng.uniform(8.0, 20.0) : rng.uniform(5.0, 8.0);
        return std::round(t / 0.02) * 0.02;  // snap to the ETDRK4 step
    }
    if (split != Split::Train) return eval_horizon(system);
    switch (system) {
        case SystemTag::AD1D:
        case SystemTag::Burgers1D: return rng.uniform(0.1, 1.0);
        case SystemTag::SWE1D: return rng.uniform(0.15, 0.4);
        case SystemTag::ADR2D: return rng.uniform(0.1, 0.35);
        default: return 0.0;
    }
}

BenchmarkSpec default_benchmark_spec(SystemTag system) {
    BenchmarkSpec s;
    s.system = system;
    s.resolution = default_resolution(system);
    if (system == SystemTag::KS1D) {
        s.n_train = 200;  // trajectory references are expensive; keep desk scale
        s.n_test_id = 20;
        s.n_test_ood = 20;
    }
    return s;
}

std::vector<int> Dataset::split_indices(Split s) const {
    int lo = 0, hi = 0;
    switch (s) {
        case Split::Train: lo = 0; hi = spec.n_train; break;
        case Split::TestId: lo = spec.n_train; hi = spec.n_train + spec.n_test_id; break;
        case Split::TestOod:
            lo = spec.n_train + spec.n_test_id;
            hi = spec.n_train + spec.n_test_id + spec.n_test_ood;
            break;
    }
    std::vector<int> idx;
    idx.reserve(hi - lo);
    for (int i = lo; i < hi; ++i) idx.push_back(i);
    return idx;
}

namespace {

Sample draw_sample(const BenchmarkSpec& spec, Split split, int index, std::atomic<int>& resamples) {
    const bool ood = (split == Split::TestOod);
    // The attempt count is folded into the per-sample seed, so redraws after a
    // diverged reference are themselves deterministic.
    for (int attempt = 0; attempt < 20; ++attempt) {
        const std::uint64_t s = spec.seed ^ (static_cast<std::uint64_t>(split) << 56) ^
                                (static_cast<std::uint64_t>(index) << 8) ^
                                static_cast<std::uint64_t>(attempt);
        Rng pick(s, {0xfaULL});
        Sample sm;
        sm.split = static_cast<int>(split);
        sm.params = sample_params(spec.system, s, ood);
        sm.T = sample_horizon(spec.system, s, split, ood);
        sm.ic = sample_ic_descriptor(spec.system, pick.choice(ic_family_count(spec.system)), s, ood);
        const Grid grid = grid_for(spec.system, sm.params, spec.resolution);
        sm.u0 = build_ic(spec.system, sm.ic, grid);
        try {
            sm.target = solve_coupled_finestep(sm.params, sm.u0, sm.T);
        } catch (const ReferenceDiverged&) {
            resamples.fetch_add(1, std::memory_order_relaxed);
            continue;
        }
        return sm;
    }
    throw ReferenceDiverged("draw_sample: reference diverged for 20 consecutive draws");
}

}  // namespace

Dataset build_dataset(const BenchmarkSpec& spec) {
    if (spec.n_train < 1 || spec.n_test_id < 1 || spec.n_test_ood < 1)
        throw ConfigError("build_dataset: sample counts must be >= 1");
    Dataset ds;
    ds.spec = spec;
    const int total = spec.n_train + spec.n_test_id + spec.n_test_ood;
    ds.samples.resize(total);
    std::atomic<int> resamples{0};
    parallel_for(total, [&](int i) {
        Split split;
        int idx;
        if (i < spec.n_train) {
            split = Split::Train;
            idx = i;
        } else if (i < spec.n_train + spec.n_test_id) {
            split = Split::TestId;
            idx = i - spec.n_train;
        } else {
            split = Split::TestOod;
            idx = i - spec.n_train - spec.n_test_id;
        }
        ds.samples[i] = draw_sample(spec, split, idx, resamples);
    });
    ds.resample_count = resamples.load();
    return ds;
}

// --- persistence ------------------------------------------------------------

void save_dataset(const Dataset& ds, const std::string& path) {
    const auto& spec = ds.spec;
    const int pc = PdeParams::param_count(spec.system);
    const int ch = channel_count(spec.system);
    const int npts = (spec.system == SystemTag::ADR2D) ? spec.resolution * spec.resolution
                                                       : spec.resolution;
    const int rec_doubles = pc + 1 + kIcParamSlots + 1 + 2 * ch * npts;
    const long rec_bytes = static_cast<long>(rec_doubles) * 8;

    nlohmann::ordered_json hdr;
    hdr["format_version"] = 1;
    hdr["system"] = to_string(spec.system);
    hdr["resolution"] = spec.resolution;
    hdr["counts"] = {{"train", spec.n_train}, {"test_id", spec.n_test_id},
                     {"test_ood", spec.n_test_ood}};
    hdr["seed"] = spec.seed;
    hdr["channels"] = ch;
    hdr["param_count"] = pc;
    hdr["ic_param_slots"] = kIcParamSlots;
    hdr["family_weights"] = "uniform";
    hdr["record_layout"] = "params, ic_family, ic_params, T, u0, target (float64 LE)";
    hdr["record_doubles"] = rec_doubles;
    hdr["resample_count"] = ds.resample_count;
    hdr["records"] = {{"first_record_offset", 0}, {"record_stride", rec_bytes},
                      {"count", ds.samples.size()}};

    // The header embeds its own end offset (record i lives at
    // first_record_offset + i * record_stride), so iterate to a fixed point:
    // writing the offset can change the header length by a digit or two.
    std::string hjson;
    long rec0 = 0;
    for (int pass = 0; pass < 4; ++pass) {
        hdr["records"]["first_record_offset"] = rec0;
        hjson = hdr.dump();
        std::ostringstream first;
        first << "hycop-dataset v1 " << hjson.size() << "\n";
        const long next = static_cast<long>(first.str().size() + hjson.size() + 1);
        if (next == rec0) break;
        rec0 = next;
    }

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw FileFormatError("cannot open dataset for writing: " + path);
    f << "hycop-dataset v1 " << hjson.size() << "\n" << hjson << "\n";

    std::vector<double> rec(rec_doubles);
    for (const auto& sm : ds.samples) {
        size_t o = 0;
        for (double v : sm.params.to_vector()) rec[o++] = v;
        rec[o++] = sm.ic.family;
        for (double v : sm.ic.p) rec[o++] = v;
        rec[o++] = sm.T;
        for (double v : sm.u0.v) rec[o++] = v;
        for (double v : sm.target.v) rec[o++] = v;
        if (o != rec.size()) throw FileFormatError("save_dataset: record size mismatch");
        f.write(reinterpret_cast<const char*>(rec.data()), rec_bytes);
    }
    if (!f) throw FileFormatError("dataset write failed: " + path);
}

Dataset load_dataset(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw FileFormatError("cannot open dataset: " + path);
    std::string magic, version;
    size_t hlen = 0;
    f >> magic >> version >> hlen;
    if (magic != "hycop-dataset" || version != "v1")
        throw FileFormatError("bad dataset magic in " + path);
    f.get();  // newline
    std::string hjson(hlen, '\0');
    f.read(hjson.data(), static_cast<std::streamsize>(hlen));
    f.get();  // newline
    nlohmann::json hdr;
    try {
        hdr = nlohmann::json::parse(hjson);
    } catch (const std::exception& e) {
        throw FileFormatError(std::string("dataset header parse error: ") + e.what());
    }

    Dataset ds;
    ds.spec.system = system_from_string(hdr.at("system").get<std::string>());
    ds.spec.resolution = hdr.at("resolution").get<int>();
    ds.spec.n_train = hdr.at("counts").at("train").get<int>();
    ds.spec.n_test_id = hdr.at("counts").at("test_id").get<int>();
    ds.spec.n_test_ood = hdr.at("counts").at("test_ood").get<int>();
    ds.spec.seed = hdr.at("seed").get<std::uint64_t>();
    ds.resample_count = hdr.value("resample_count", 0);
    const int pc = hdr.at("param_count").get<int>();
    const int ch = hdr.at("channels").get<int>();
    const int rec_doubles = hdr.at("record_doubles").get<int>();
    const int total = ds.spec.n_train + ds.spec.n_test_id + ds.spec.n_test_ood;
    if (pc != PdeParams::param_count(ds.spec.system) || ch != channel_count(ds.spec.system))
        throw FileFormatError("dataset header inconsistent with system: " + path);

    std::vector<double> rec(rec_doubles);
    ds.samples.resize(total);
    for (int i = 0; i < total; ++i) {
        f.read(reinterpret_cast<char*>(rec.data()), static_cast<std::streamsize>(rec.size() * 8));
        if (!f) throw FileFormatError("truncated dataset: " + path);
        Sample& sm = ds.samples[i];
        size_t o = 0;
        std::vector<double> pv(rec.begin(), rec.begin() + pc);
        o += pc;
        sm.params = PdeParams::from_vector(ds.spec.system, pv);
        sm.ic.family = static_cast<int>(rec[o++]);
        for (int j = 0; j < kIcParamSlots; ++j) sm.ic.p[j] = rec[o++];
        sm.T = rec[o++];
        const Grid grid = grid_for(ds.spec.system, sm.params, ds.spec.resolution);
        sm.u0 = Field(grid, ch);
        for (auto& v : sm.u0.v) v = rec[o++];
        sm.target = Field(grid, ch);
        for (auto& v : sm.target.v) v = rec[o++];
        sm.split = (i < ds.spec.n_train) ? 0 : (i < ds.spec.n_train + ds.spec.n_test_id ? 1 : 2);
    }
    return ds;
}

}  // namespace hycop
