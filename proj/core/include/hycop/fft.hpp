#pragma once

#include <complex>
#include <vector>

namespace hycop::fft {

using cvec = std::vector<std::complex<double>>;

/// In-place DFT.  Forward transform is the plain unnormalized sum
/// F_k = sum_j f_j exp(-2*pi*i*j*k/N); the inverse applies the conjugate
/// kernel and divides by N.  Power-of-two sizes take the radix-2 path;
/// anything else falls back to a direct O(N^2) evaluation (grids here are
/// small, and staying plan-free keeps the transform pure and thread-safe).
void transform(cvec& a, bool inverse);

void forward(cvec& a);
void inverse(cvec& a);

}  // namespace hycop::fft
