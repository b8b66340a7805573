#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace hl {

// xoshiro256** seeded through splitmix64. Fixed algorithm so that campaigns
// reproduce across platforms and ports.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) {
        std::uint64_t z = seed;
        for (auto& w : s_) w = splitmix64(z);
    }

    std::uint64_t next() {
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

    // Uniform integer in [lo, hi], unbiased (rejection sampling).
    long uniform_int(long lo, long hi) {
        if (hi < lo) throw std::invalid_argument("empty integer range");
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        if (span == 0) return static_cast<long>(next());
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
        std::uint64_t x;
        do x = next();
        while (x >= limit);
        return lo + static_cast<long>(x % span);
    }

    // Uniform double in [0, 1).
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Standard normal by Box-Muller (second variate cached).
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1;
        do u1 = uniform();
        while (u1 <= 0.0);
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    // Derived independent stream, e.g. one per campaign instance.
    static std::uint64_t derive(std::uint64_t seed, std::uint64_t index) {
        std::uint64_t z = seed ^ (0xD1B54A32D192ED03ULL * (index + 1));
        return splitmix64(z);
    }

private:
    std::uint64_t s_[4];
    double spare_ = 0.0;
    bool has_spare_ = false;

    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    static std::uint64_t splitmix64(std::uint64_t& z) {
        std::uint64_t r = (z += 0x9E3779B97F4A7C15ULL);
        r = (r ^ (r >> 30)) * 0xBF58476D1CE4E5B9ULL;
        r = (r ^ (r >> 27)) * 0x94D049BB133111EBULL;
        return r ^ (r >> 31);
    }
};

}  // namespace hl
