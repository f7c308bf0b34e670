#pragma once

#include <optional>

#include "hycop/executor.hpp"
#include "hycop/systems.hpp"

namespace hycop {

/// ||pred - ref||_2 / ||ref||_2 over all grid points and channels.
/// nullopt when ||ref|| == 0 (caller falls back to MaxErr).
std::optional<double> rel_l2(const Field& pred, const Field& ref);

/// Max over grid points of the per-point channel norm of the error.
double max_err(const Field& pred, const Field& ref);

struct FrmseBands {
    double low = 0.0, mid = 0.0, high = 0.0;
};

/// Spectral RMS error by Nyquist-normalized radial wavenumber band:
/// |k| < 0.1, 0.1 <= |k| < 0.3, |k| >= 0.3 (Nyquist at 0.5).  The three
/// mode sets partition all modes; spectra are N-normalized so values are
/// comparable across resolutions.  Throws BoundaryUnsupported on wall grids.
FrmseBands frmse_bands(const Field& pred, const Field& ref);

/// RMSE restricted to the outermost max(1, floor(0.05*N)) cells per side per axis.
double brmse(const Field& pred, const Field& ref);

/// RMS over conserved diagnostic integrals: SWE mass+momentum, AD/Burgers/KS
/// mass; nullopt (not applicable) for ADR.
std::optional<double> crmse(SystemTag system, const Field& pred, const Field& ref);

struct ErrorDecomposition {
    double total = 0.0;          // ||u_ref - coarse||
    double splitting_est = 0.0;  // ||u_ref - fine||
    double primitive_est = 0.0;  // ||fine - coarse||
    /// total - (splitting + primitive); <= 1e-12 by the triangle inequality.
    double triangle_residual = 0.0;
};

/// Eq-style split of the prediction error into policy (splitting) and module
/// (primitive) contributions, where "fine" re-executes the same program with
/// every substep count multiplied by 10.  Norms are RMSE.
ErrorDecomposition error_decomposition(const std::vector<PrimitiveSpec>& dict,
                                       const PdeParams& params, const Field& u0,
                                       const Program& program, const Field& u_ref);

struct KsAttractorMetrics {
    double se = 0.0;  // mean |log10 E_pred(k) - log10 E_ref(k)| over retained modes
    double kl = 0.0;  // KL(pred || ref) of pooled state-value histograms
};

/// Long-run statistics comparison for chaotic trajectories.  The first 10% of
/// snapshots are dropped as transient; SE averages over the dealiased mode
/// range 1 <= m < N/3; KL uses 64 bins over the pooled shared range with
/// additive smoothing 1e-10.  Throws InsufficientTrajectory (Error) when
/// fewer than 10 post-transient snapshots remain.
KsAttractorMetrics ks_attractor_metrics(const std::vector<Field>& pred_traj,
                                        const std::vector<Field>& ref_traj);

}  // namespace hycop
