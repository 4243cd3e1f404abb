#ifndef MLFSM_RNG_HPP
#define MLFSM_RNG_HPP

#include <cstdint>
#include <cmath>

namespace mlfsm {

// Splittable counter-style generator (SplitMix construction with a
// per-stream odd gamma). Identical (seed, stream) pairs reproduce identical
// sequences; distinct streams are statistically independent and may be used
// concurrently from different workers. A single instance is not thread-safe.
class RngHandle {
public:
    explicit RngHandle(std::uint64_t seed, std::uint64_t stream = 0) {
        state_ = mix(seed + 0x9e3779b97f4a7c15ull * (stream + 1));
        gamma_ = derive_gamma(mix(seed ^ rotl(stream, 31) ^ 0xbf58476d1ce4e5b9ull));
    }

    std::uint64_t next_u64() {
        state_ += gamma_;
        return mix(state_);
    }

    // Uniform on the open interval (0, 1).
    double next_uniform() {
        std::uint64_t u = next_u64() >> 11;   // 53 bits
        return (static_cast<double>(u) + 0.5) * 0x1p-53;
    }

    double next_exponential() { return -std::log(next_uniform()); }

    // Standard normal via Box-Muller; consumes two uniforms per pair.
    double next_gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = next_uniform();
        double u2 = next_uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    // murmur3/splitmix64 finalizer
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ull;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebull;
        z ^= z >> 31;
        return z;
    }

    // Gammas need enough bit transitions for the Weyl sequence to mix well.
    static std::uint64_t derive_gamma(std::uint64_t z) {
        z |= 1ull;
        int transitions = __builtin_popcountll(z ^ (z >> 1));
        if (transitions < 24) z ^= 0xaaaaaaaaaaaaaaaaull;
        return z | 1ull;
    }

    std::uint64_t state_;
    std::uint64_t gamma_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace mlfsm

#endif
