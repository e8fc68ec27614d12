#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

// Self-contained counter/stream RNG so that every noise source in the
// simulator is reproducible from a single seed, independent of the
// standard library's distribution implementations.

namespace pvtrack {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

/// Stateless mix of several words, used for per-pixel / per-cell noise.
constexpr std::uint64_t hash_mix(std::uint64_t a, std::uint64_t b) {
    return splitmix64(a ^ splitmix64(b));
}
constexpr std::uint64_t hash_mix(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    return splitmix64(hash_mix(a, b) ^ splitmix64(c + 0x6a09e667f3bcc909ull));
}

/// FNV-1a over a tag name; combined with a master seed this yields one
/// independent stream per subsystem ("gps", "render-thermal", ...).
constexpr std::uint64_t stream_tag(std::string_view name) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (char ch : name) {
        h ^= static_cast<unsigned char>(ch);
        h *= 0x100000001b3ull;
    }
    return h;
}

constexpr std::uint64_t derive_stream(std::uint64_t master, std::string_view name) {
    return hash_mix(master, stream_tag(name));
}

inline double u64_to_unit(std::uint64_t x) {
    return static_cast<double>(x >> 11) * 0x1.0p-53;  // [0, 1)
}

/// xoshiro256** by Blackman & Vigna (public domain reference).
class Xoshiro256 {
public:
    explicit Xoshiro256(std::uint64_t seed = 1) {
        std::uint64_t s = seed;
        for (auto& w : state_) {
            s = splitmix64(s + 0x9e3779b97f4a7c15ull);
            w = s;
        }
    }

    std::uint64_t next() {
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

    double uniform() { return u64_to_unit(next()); }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Box-Muller; fixed algorithm keeps runs reproducible.
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * M_PI * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    double gaussian(double mean, double sigma) { return mean + sigma * gaussian(); }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t state_[4]{};
    double spare_ = 0.0;
    bool have_spare_ = false;
};

/// Gaussian from a stateless hash value (for per-pixel speckle).
inline double hash_gaussian(std::uint64_t h) {
    double u1 = u64_to_unit(h);
    double u2 = u64_to_unit(splitmix64(h));
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

} // namespace pvtrack
