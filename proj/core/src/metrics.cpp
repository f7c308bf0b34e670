#include "hycop/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "hycop/errors.hpp"
#include "hycop/field_ops.hpp"

namespace hycop {

std::optional<double> rel_l2(const Field& pred, const Field& ref) {
    pred.require_shape(ref.grid, ref.channels, "rel_l2");
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < pred.v.size(); ++i) {
        const double d = pred.v[i] - ref.v[i];
        num += d * d;
        den += ref.v[i] * ref.v[i];
    }
    if (den == 0.0) return std::nullopt;
    return std::sqrt(num / den);
}

double max_err(const Field& pred, const Field& ref) {
    pred.require_shape(ref.grid, ref.channels, "max_err");
    double m = 0.0;
    for (int i = 0; i < pred.grid.total(); ++i) {
        double s = 0.0;
        for (int c = 0; c < pred.channels; ++c) {
            const double d = pred.at(c, i) - ref.at(c, i);
            s += d * d;
        }
        m = std::max(m, std::sqrt(s));
    }
    return m;
}

FrmseBands frmse_bands(const Field& pred, const Field& ref) {
    pred.require_shape(ref.grid, ref.channels, "frmse_bands");
    if (pred.grid.boundary != Boundary::Periodic)
        throw BoundaryUnsupported("frmse_bands requires a periodic grid");
    const int nx = pred.grid.n[0], ny = pred.grid.n[1];
    const double norm = static_cast<double>(pred.grid.total());

    double sum[3] = {0, 0, 0};
    long cnt[3] = {0, 0, 0};
    for (int c = 0; c < pred.channels; ++c) {
        const auto sp = dft(pred, c);
        const auto sr = dft(ref, c);
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                // Nyquist-normalized radial wavenumber (Nyquist = 0.5 per axis).
                const double fx = static_cast<double>(std::min(i, nx - i)) / nx;
                const double fy =
                    (pred.grid.dim == 2) ? static_cast<double>(std::min(j, ny - j)) / ny : 0.0;
                const double kn = std::sqrt(fx * fx + fy * fy);
                const int band = (kn < 0.1) ? 0 : (kn < 0.3 ? 1 : 2);
                const double d = std::abs(sp[static_cast<size_t>(j) * nx + i] -
                                          sr[static_cast<size_t>(j) * nx + i]) /
                                 norm;
                sum[band] += d * d;
                if (c == 0) ++cnt[band];
            }
    }
    FrmseBands out;
    const long ch = pred.channels;
    out.low = cnt[0] ? std::sqrt(sum[0] / (cnt[0] * ch)) : 0.0;
    out.mid = cnt[1] ? std::sqrt(sum[1] / (cnt[1] * ch)) : 0.0;
    out.high = cnt[2] ? std::sqrt(sum[2] / (cnt[2] * ch)) : 0.0;
    return out;
}

double brmse(const Field& pred, const Field& ref) {
    pred.require_shape(ref.grid, ref.channels, "brmse");
    const int nx = pred.grid.n[0], ny = pred.grid.n[1];
    const int wx = std::max(1, static_cast<int>(std::floor(0.05 * nx)));
    const int wy = std::max(1, static_cast<int>(std::floor(0.05 * ny)));
    double s = 0.0;
    long cnt = 0;
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const bool edge_x = (i < wx || i >= nx - wx);
            const bool edge_y = pred.grid.dim == 2 && (j < wy || j >= ny - wy);
            if (!edge_x && !edge_y) continue;
            for (int c = 0; c < pred.channels; ++c) {
                const double d = pred.at2(c, i, j) - ref.at2(c, i, j);
                s += d * d;
                ++cnt;
            }
        }
    return cnt ? std::sqrt(s / cnt) : 0.0;
}

std::optional<double> crmse(SystemTag system, const Field& pred, const Field& ref) {
    pred.require_shape(ref.grid, ref.channels, "crmse");
    if (system == SystemTag::ADR2D) return std::nullopt;  // not applicable
    std::vector<double> diffs;
    diffs.push_back(integrate(pred, 0) - integrate(ref, 0));  // mass
    if (system == SystemTag::SWE1D)
        diffs.push_back(integrate(pred, 1) - integrate(ref, 1));  // momentum
    double s = 0.0;
    for (double d : diffs) s += d * d;
    return std::sqrt(s / diffs.size());
}

ErrorDecomposition error_decomposition(const std::vector<PrimitiveSpec>& dict,
                                       const PdeParams& params, const Field& u0,
                                       const Program& program, const Field& u_ref) {
    ExecOptions coarse_opts, fine_opts;
    fine_opts.substep_multiplier = 10;
    const Field coarse = execute(dict, params, u0, program, coarse_opts);
    const Field fine = execute(dict, params, u0, program, fine_opts);
    ErrorDecomposition d;
    d.total = rmse(u_ref, coarse);
    d.splitting_est = rmse(u_ref, fine);
    d.primitive_est = rmse(fine, coarse);
    d.triangle_residual = d.total - (d.splitting_est + d.primitive_est);
    return d;
}

KsAttractorMetrics ks_attractor_metrics(const std::vector<Field>& pred_traj,
                                        const std::vector<Field>& ref_traj) {
    if (pred_traj.size() != ref_traj.size() || pred_traj.empty())
        throw InsufficientTrajectory("ks_attractor_metrics: trajectory length mismatch");
    const size_t total = pred_traj.size();
    const size_t skip = static_cast<size_t>(std::ceil(0.1 * static_cast<double>(total)));
    if (total - skip < 10)
        throw InsufficientTrajectory("ks_attractor_metrics: fewer than 10 post-transient snapshots");

    const Grid& g = pred_traj[0].grid;
    const int n = g.n[0];
    const int mmax = n / 3;  // executor states are dealiased above this

    // Time-averaged energy spectra over the retained window.
    std::vector<double> ep(mmax, 0.0), er(mmax, 0.0);
    for (size_t s = skip; s < total; ++s) {
        const auto sp = dft(pred_traj[s], 0);
        const auto sr = dft(ref_traj[s], 0);
        for (int m = 1; m < mmax; ++m) {
            ep[m] += std::norm(sp[m]);
            er[m] += std::norm(sr[m]);
        }
    }
    double se = 0.0;
    int se_cnt = 0;
    for (int m = 1; m < mmax; ++m) {
        const double a = ep[m] + 1e-300, b = er[m] + 1e-300;
        se += std::abs(std::log10(a) - std::log10(b));
        ++se_cnt;
    }
    se = se_cnt ? se / se_cnt : 0.0;

    // Pooled state-value histograms over a shared range.
    double lo = 1e300, hi = -1e300;
    for (size_t s = skip; s < total; ++s)
        for (const auto& traj : {&pred_traj, &ref_traj})
            for (double x : (*traj)[s].v) {
                lo = std::min(lo, x);
                hi = std::max(hi, x);
            }
    if (hi <= lo) hi = lo + 1.0;
    constexpr int kBins = 64;
    constexpr double kSmooth = 1e-10;
    std::vector<double> hp(kBins, kSmooth), hr(kBins, kSmooth);
    auto accumulate = [&](const std::vector<Field>& traj, std::vector<double>& hist) {
        for (size_t s = skip; s < traj.size(); ++s)
            for (double x : traj[s].v) {
                int b = static_cast<int>((x - lo) / (hi - lo) * kBins);
                b = std::max(0, std::min(kBins - 1, b));
                hist[b] += 1.0;
            }
    };
    accumulate(pred_traj, hp);
    accumulate(ref_traj, hr);
    double sp = 0.0, sr = 0.0;
    for (int b = 0; b < kBins; ++b) {
        sp += hp[b];
        sr += hr[b];
    }
    double kl = 0.0;
    for (int b = 0; b < kBins; ++b) {
        const double p = hp[b] / sp, q = hr[b] / sr;
        kl += p * std::log(p / q);
    }

    KsAttractorMetrics out;
    out.se = se;
    out.kl = std::max(0.0, kl);
    return out;
}

}  // namespace hycop
