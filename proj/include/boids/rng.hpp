#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace boids {

// SplitMix64 finalizer. Used to derive decorrelated seeds, not as a
// generator in its own right.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a(std::string_view text) noexcept {
    std::uint64_t h = 1469598103934665603ull;
    for (const char c : text) {
        h ^= static_cast<std::uint8_t>(c);
        h *= 1099511628211ull;
    }
    return h;
}

// Seed for the named substream of `base`. Streams with different labels are
// decoupled: drawing more numbers from one never shifts another.
constexpr std::uint64_t stream_seed(std::uint64_t base, std::string_view label) noexcept {
    return mix64(base ^ fnv1a(label));
}

// Indexed substream (per run, per cycle, per window, ...).
constexpr std::uint64_t substream_seed(std::uint64_t base, std::uint64_t index) noexcept {
    return mix64(base + 0x632be59bd9b4e019ull * (index + 1));
}

// Deterministic random source. The raw engine is std::mt19937_64, whose
// output sequence is fixed by the standard; the floating-point and integer
// mappings below are hand-rolled so that every draw is reproducible
// bit-for-bit across standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    static Rng stream(std::uint64_t base, std::string_view label) {
        return Rng(stream_seed(base, label));
    }

    std::uint64_t raw() { return gen_(); }

    // Uniform in [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + uniform() * (hi - lo); }

    // Unbiased uniform integer in [0, n). n must be nonzero.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
        for (;;) {
            const std::uint64_t x = gen_();
            if (x >= threshold) return x % n;
        }
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace boids
