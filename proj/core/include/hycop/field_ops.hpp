#pragma once

#include "hycop/fft.hpp"
#include "hycop/field.hpp"

namespace hycop {

/// Signed physical wavenumbers 2*pi*m/L for mode indices m = 0..n-1
/// (m interpreted as negative past n/2).  The Nyquist entry carries +pi*n/L.
std::vector<double> wavenumbers(int n, double length);

/// Forward DFT of one channel.  1D fields give n[0] coefficients; 2D fields
/// give the full n[0]*n[1] spectrum, computed as separable 1D passes and
/// stored row-major (kx fastest).
fft::cvec dft(const Field& f, int channel);

/// Inverse of dft(): rebuilds one channel of a field on `grid` from its
/// spectrum (imaginary residue discarded).
Field idft(const fft::cvec& spectrum, const Grid& grid);

/// Spectral gradient along `axis` on periodic grids; second-order central
/// differences with one-sided closures at the ends on wall grids.
/// Returns a single-channel field.
Field gradient(const Field& f, int channel, int axis);

/// h-weighted quadrature of one channel (exact for the node layouts used
/// here: integrate of a constant c returns c * domain volume).
double integrate(const Field& f, int channel);

/// Grid-sum L2 norm of one channel times sqrt(cell volume).
double l2_norm(const Field& f, int channel);

/// RMSE between two same-shaped fields over all channels and points.
double rmse(const Field& a, const Field& b);

/// sqrt(mean of squares) of all entries.
double rms(const Field& a);

// --- in-place spectral helpers used by primitives and reference solvers ---

/// One separable 1D transform pass over `axis` of a 2D scratch spectrum.
void axis_transform(fft::cvec& data, int nx, int ny, int axis, bool inverse);

/// Zeroes every mode with |m| >= n/3 (the 3/2-rule dealiasing mask applied
/// as a sharp spectral cutoff on the upper third of the spectrum).
void dealias(fft::cvec& spectrum, int n);

/// Band-limited interpolation onto a grid refined by `factor` per axis
/// (periodic only): zero-padded spectrum with the Nyquist coefficient split
/// across +-N/2 to keep the result real.  Exact on resolved modes.
Field spectral_upsample(const Field& f, int factor);

bool all_finite(const Field& f, double bound = 1e6);

}  // namespace hycop
