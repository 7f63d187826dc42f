#pragma once

#include <cmath>
#include <cstdint>

#include "purecert/vec.hpp"

namespace purecert {

// splitmix64 finalizer; the workhorse mixer for the counter scheme.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Counter-based stream: output i is a pure function of (key, i), so draws are
// reproducible independent of execution order and thread count. Child streams
// are derived by hashing (key, index); every Monte-Carlo draw gets its own
// stream split from (master seed, subcommand tag, point index, draw index).
class Rng {
  public:
    explicit Rng(std::uint64_t key) : key_(key) {}

    Rng split(std::uint64_t index) const {
        return Rng(mix64(key_ ^ mix64(index + 0x632be59bd9b4e019ULL)));
    }

    std::uint64_t next_u64() { return mix64(key_ + (++counter_) * 0x9e3779b97f4a7c15ULL); }

    // uniform in (0, 1)
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53 + 0x1.0p-54;
    }

    // standard normal via Box-Muller (pairs cached)
    double normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        cached_ = r * std::sin(a);
        have_cached_ = true;
        return r * std::cos(a);
    }

    Vec normal_vec(std::size_t n) {
        Vec v(n);
        for (auto& x : v) x = normal();
        return v;
    }

  private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double cached_ = 0.0;
    bool have_cached_ = false;
};

// Stable tag for deriving per-subcommand / per-module streams from the master seed.
inline std::uint64_t stream_tag(const char* name) {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (const char* p = name; *p; ++p) {
        h ^= static_cast<unsigned char>(*p);
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace purecert
