#include "hycop/features.hpp"

#include <cmath>

#include "hycop/errors.hpp"
#include "hycop/field_ops.hpp"

namespace hycop {

namespace {

constexpr double kEps = 1e-8;

double mean_abs(const Field& f, int c) {
    double s = 0.0;
    for (int i = 0; i < f.grid.total(); ++i) s += std::abs(f.at(c, i));
    return s / f.grid.total();
}

double variance(const Field& f, int c) {
    double mu = 0.0;
    for (int i = 0; i < f.grid.total(); ++i) mu += f.at(c, i);
    mu /= f.grid.total();
    double s = 0.0;
    for (int i = 0; i < f.grid.total(); ++i) {
        const double d = f.at(c, i) - mu;
        s += d * d;
    }
    return s / f.grid.total();
}

double cov(const Field& f, int c) {
    const double m = mean_abs(f, c) + kEps;
    return variance(f, c) / (m * m);
}

double max_abs(const Field& f, int c) {
    double m = 0.0;
    for (int i = 0; i < f.grid.total(); ++i) m = std::max(m, std::abs(f.at(c, i)));
    return m;
}

double spectral_centroid(const Field& f) {
    const auto spec = dft(f, 0);
    const auto k = wavenumbers(f.grid.n[0], f.grid.length[0]);
    double num = 0.0, den = 0.0;
    for (int m = 1; m < f.grid.n[0]; ++m) {
        const double e = std::norm(spec[m]);
        num += std::abs(k[m]) * e;
        den += e;
    }
    return den > 0.0 ? num / den : 0.0;
}

// Grid statistics of |u| (CoV denominators, maxima) converge only at
// O(h^2) across kinks and extrema, which is not enough for the
// resolution-consistency the dimensionless features promise.  Band-limited
// 4x interpolation before taking the statistics pushes that error well
// below 1e-3 without changing the resolved content.
Field refine(const Field& u0) {
    if (u0.grid.boundary != Boundary::Periodic) return u0;
    return spectral_upsample(u0, 4);
}

}  // namespace

std::vector<double> extract_features(SystemTag system, const PdeParams& p, const Field& u0,
                                     double T) {
    const Field u = refine(u0);
    switch (system) {
        case SystemTag::AD1D: {
            const double L = u.grid.length[0];
            const double pe = std::abs(p.c) * L / std::max(p.d, kEps);
            const Field g = gradient(u, 0, 0);
            return {std::log1p(pe), cov(u, 0), cov(g, 0), T};
        }
        case SystemTag::Burgers1D: {
            const double L = u.grid.length[0];
            const double re = max_abs(u, 0) * L / std::max(p.nu, kEps);
            const Field g = gradient(u, 0, 0);
            return {std::log1p(re), max_abs(g, 0), max_abs(u, 0), T};
        }
        case SystemTag::SWE1D: {
            double fr = 0.0;
            for (int i = 0; i < u.grid.total(); ++i) {
                const double h = std::max(u.at(0, i), kEps);
                const double vel = u.at(1, i) / h;
                fr = std::max(fr, std::abs(vel) / std::sqrt(p.g * h));
            }
            return {fr, cov(u, 0), cov(u, 1), T};
        }
        case SystemTag::ADR2D: {
            const double lx = u.grid.length[0], ly = u.grid.length[1];
            const double pex = std::abs(p.cx) * lx / std::max(p.dx, kEps);
            const double pey = std::abs(p.cy) * ly / std::max(p.dy, kEps);
            const double cmag = std::sqrt(p.cx * p.cx + p.cy * p.cy);
            const double da = p.r * lx / std::max(cmag, kEps);
            const Field gx = gradient(u, 0, 0);
            const Field gy = gradient(u, 0, 1);
            return {std::log1p(pex), std::log1p(pey), std::log1p(da),
                    cov(u, 0),       cov(gx, 0),      cov(gy, 0),     T};
        }
        case SystemTag::KS1D:
            return {p.width, cov(u, 0), spectral_centroid(u0), T};
    }
    throw ConfigError("extract_features: bad system tag");
}

std::vector<double> raw_ic_features(const Field& u0, double T) {
    std::vector<double> f(u0.v);
    f.push_back(T);
    return f;
}

int feature_dim(SystemTag system, FeatureMode mode, int grid_total, int channels) {
    if (mode == FeatureMode::RawIc) return grid_total * channels + 1;
    return system == SystemTag::ADR2D ? 7 : 4;
}

std::string feature_formula_id(SystemTag system, FeatureMode mode) {
    if (mode == FeatureMode::RawIc) return "raw_ic_v1";
    return "dimensionless_" + to_string(system) + "_v1";
}

}  // namespace hycop
