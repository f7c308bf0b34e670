#include "hycop/fft.hpp"

#include <cmath>

namespace hycop::fft {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

bool is_pow2(size_t n) { return n && (n & (n - 1)) == 0; }

void radix2(cvec& a, bool inverse) {
    const size_t n = a.size();
    // Bit-reversal permutation.
    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (size_t len = 2; len <= n; len <<= 1) {
        const double ang = (inverse ? kTwoPi : -kTwoPi) / static_cast<double>(len);
        const std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (size_t j = 0; j < len / 2; ++j) {
                const auto u = a[i + j];
                const auto v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

void naive(cvec& a, bool inverse) {
    const size_t n = a.size();
    cvec out(n);
    const double sgn = inverse ? 1.0 : -1.0;
    for (size_t k = 0; k < n; ++k) {
        std::complex<double> acc(0.0, 0.0);
        for (size_t j = 0; j < n; ++j) {
            const double ang = sgn * kTwoPi * static_cast<double>((j * k) % n) / static_cast<double>(n);
            acc += a[j] * std::complex<double>(std::cos(ang), std::sin(ang));
        }
        out[k] = acc;
    }
    a.swap(out);
}

}  // namespace

void transform(cvec& a, bool inverse) {
    if (a.size() <= 1) return;
    if (is_pow2(a.size()))
        radix2(a, inverse);
    else
        naive(a, inverse);
    if (inverse) {
        const double s = 1.0 / static_cast<double>(a.size());
        for (auto& z : a) z *= s;
    }
}

void forward(cvec& a) { transform(a, false); }
void inverse(cvec& a) { transform(a, true); }

}  // namespace hycop::fft
