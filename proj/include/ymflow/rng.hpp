#pragma once

#include <cstdint>
#include <cmath>

namespace ymflow {

// Counter-free splittable RNG. Each (seed, stream) pair yields an
// independent, reproducible stream, so parallel replicas stay deterministic
// regardless of scheduling.
class Rng {
  public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) {
        state_ = mix(seed ^ mix(stream + 0x9e3779b97f4a7c15ull));
        if (state_ == 0) state_ = 0x106689d45497fdb5ull;
        have_cached_ = false;
    }

    std::uint64_t next_u64() {
        // xorshift* with splitmix-initialised state
        std::uint64_t x = state_;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        state_ = x;
        return x * 0x2545f4914f6cdd1dull;
    }

    // uniform in [0,1)
    double next_double() { return (next_u64() >> 11) * 0x1.0p-53; }

    // standard normal, Box-Muller with caching
    double next_normal() {
        if (have_cached_) { have_cached_ = false; return cached_; }
        double u1 = 0.0, u2 = 0.0;
        do { u1 = next_double(); } while (u1 <= 0.0);
        u2 = next_double();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double th = 6.283185307179586476925286766559 * u2;
        cached_ = r * std::sin(th);
        have_cached_ = true;
        return r * std::cos(th);
    }

  private:
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ull;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
    double cached_ = 0.0;
    bool have_cached_;
};

}  // namespace ymflow
