#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>
#include <vector>

namespace zoolab {

// Counter-based deterministic RNG. A stream is (key, counter); outputs are a
// pure function of both, so streams derived from the same key but different
// tags never depend on query order. Bit-stable across platforms: no libstdc++
// distributions anywhere in the simulator.
inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline uint64_t hash_combine(uint64_t seed, uint64_t v) {
    return splitmix64(seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2)));
}

inline uint64_t hash_bytes(uint64_t seed, std::string_view bytes) {
    uint64_t h = seed ^ 0xcbf29ce484222325ULL;
    size_t i = 0;
    // 8-byte gulps, then tail.
    for (; i + 8 <= bytes.size(); i += 8) {
        uint64_t w = 0;
        for (int k = 0; k < 8; ++k) w |= uint64_t(uint8_t(bytes[i + k])) << (8 * k);
        h = hash_combine(h, w);
    }
    uint64_t tail = 0;
    for (int k = 0; i < bytes.size(); ++i, ++k) tail |= uint64_t(uint8_t(bytes[i])) << (8 * k);
    return hash_combine(h, tail ^ (uint64_t(bytes.size()) << 32));
}

class Rng {
public:
    Rng() : key_(0), ctr_(0) {}
    explicit Rng(uint64_t key) : key_(key), ctr_(0) {}

    static Rng from(uint64_t seed, uint64_t tag) { return Rng(hash_combine(seed, tag)); }
    static Rng from(uint64_t seed, std::string_view tag) { return Rng(hash_bytes(seed, tag)); }

    Rng derive(uint64_t tag) const { return Rng(hash_combine(key_, tag)); }
    Rng derive(std::string_view tag) const { return Rng(hash_bytes(key_, tag)); }

    uint64_t next_u64() { return splitmix64(key_ ^ splitmix64(ctr_++)); }

    // Uniform in [0,1), 53-bit resolution.
    double next_double() { return double(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in {0, ..., n-1}; unbiased via rejection.
    uint64_t next_below(uint64_t n) {
        if (n <= 1) return 0;
        uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        uint64_t x;
        do { x = next_u64(); } while (x >= limit);
        return x % n;
    }

    bool next_bernoulli(double p) { return next_double() < p; }

    // Exact Poisson sampling. Inversion for small means; additivity splits
    // large means into exact chunks (we never need means beyond ~1e6).
    uint64_t next_poisson(double mean) {
        uint64_t total = 0;
        while (mean > 30.0) {
            total += poisson_inversion(30.0);
            mean -= 30.0;
        }
        return total + poisson_inversion(mean);
    }

    // Geometric on {1,2,...} with success probability p.
    uint64_t next_geometric(double p) {
        if (p >= 1.0) return 1;
        double u = next_double();
        // ceil(log(1-u)/log(1-p)) without the log1p edge cases at u=0
        double g = std::ceil(std::log1p(-u) / std::log1p(-p));
        if (g < 1.0) g = 1.0;
        return uint64_t(g);
    }

    uint64_t key() const { return key_; }

private:
    uint64_t poisson_inversion(double mean) {
        if (mean <= 0.0) return 0;
        double u = next_double();
        double p = std::exp(-mean);
        double cdf = p;
        uint64_t k = 0;
        while (u >= cdf && k < 400) {
            ++k;
            p *= mean / double(k);
            cdf += p;
        }
        return k;
    }

    uint64_t key_;
    uint64_t ctr_;
};

} // namespace zoolab
