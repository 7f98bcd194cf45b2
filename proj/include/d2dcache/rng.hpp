#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace d2dcache {

// splitmix64 step; used for seed derivation only.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Stable substream derivation: mixes a master seed with a key path.
// Substreams depend only on (master, key), never on evaluation order or
// thread count, which is what makes parallel runs bit-reproducible.
inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> key) {
    std::uint64_t s = master;
    std::uint64_t h = splitmix64(s);
    for (std::uint64_t k : key) {
        s = h ^ (k + 0x9e3779b97f4a7c15ull);
        h = splitmix64(s);
    }
    return h;
}

inline std::uint64_t hash_str(const char* str) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (const char* p = str; *p; ++p) h = (h ^ static_cast<std::uint8_t>(*p)) * 0x100000001b3ull;
    return h;
}

// All randomness goes through this wrapper so the draw transformations are
// pinned in one place (std::* distributions are not portable across stdlibs).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    // uniform on [0, 1) with 53 random bits
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // uniform on (0, 1]; safe as a log() argument
    double uniform_pos() { return 1.0 - uniform01(); }

    double exponential(double mean) { return -mean * std::log(uniform_pos()); }

    // uniform integer in [0, n); rejection sampled, bias-free
    std::uint64_t bounded(std::uint64_t n) {
        const std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            const std::uint64_t r = engine_();
            if (r >= threshold) return r % n;
        }
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[bounded(i)]);
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace d2dcache
