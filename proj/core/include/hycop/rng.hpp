#pragma once

#include <cmath>
#include <cstdint>

namespace hycop {

// Deterministic, self-contained PRNG (splitmix64 seeding + xoshiro256**).
// We roll our own uniform/normal transforms rather than using
// std::*_distribution so that every stream is bit-reproducible across
// standard-library implementations.  Streams are derived from a master seed
// plus an arbitrary list of stream identifiers, so per-sample / per-generation
// / per-particle streams never overlap by construction.

class Rng {
  public:
    explicit Rng(std::uint64_t seed) { seed_state(seed); }

    /// Derived stream: hash-combines the identifiers into the seed.
    Rng(std::uint64_t seed, std::initializer_list<std::uint64_t> stream) {
        std::uint64_t s = seed;
        for (std::uint64_t id : stream) {
            std::uint64_t x = s ^ (id + 0x9e3779b97f4a7c15ULL);
            s = splitmix(x);
        }
        seed_state(s);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform on [0,1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform on [lo,hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller (deterministic, no cached spare).
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    /// Integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        // Rejection-free modulo bias is negligible for the small n used here,
        // but keep it exact anyway via widening multiply.
        return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    int choice(int n) { return static_cast<int>(below(static_cast<std::uint64_t>(n))); }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    static std::uint64_t splitmix(std::uint64_t& x) {
        x += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = x;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    void seed_state(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& s : s_) s = splitmix(x);
    }

    std::uint64_t s_[4];
};

}  // namespace hycop
