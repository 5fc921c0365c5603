// famx-prng-v1: xoshiro256** seeded through SplitMix64.
//
// The generator is pinned by name and version so that every artifact
// (keys, datasets, backends, templates) is reproducible across builds
// and platforms. Gaussian variates use Box-Muller on 53-bit uniforms;
// no libc distribution machinery is involved anywhere.

#pragma once

#include <cstdint>
#include <cmath>
#include <vector>

namespace famx {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& s : state_) s = splitmix64(sm);
        have_spare_ = false;
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform in [0, 1) with 53 bits of precision.
    double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        // Box-Muller; u1 is kept away from 0 so the log is finite.
        double u1 = uniform();
        while (u1 <= 0x1.0p-53) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    std::vector<double> gaussian_vector(std::size_t n) {
        std::vector<double> v(n);
        for (auto& x : v) x = gaussian();
        return v;
    }

    // Derives an independent child stream. Children are decorrelated by the
    // SplitMix64 scrambling of the draw.
    Rng split() { return Rng(splitmix64_once(next_u64())); }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    static std::uint64_t splitmix64_once(std::uint64_t x) {
        std::uint64_t s = x;
        return splitmix64(s);
    }

    std::uint64_t state_[4];
    double spare_ = 0.0;
    bool have_spare_;
};

} // namespace famx
