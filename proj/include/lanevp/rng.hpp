#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace lanevp {

/// Seedable counter-based generator. The algorithm identifier is
/// "splitmix64" (Steele, Lea, Flood; also the seeding primitive of
/// xoshiro). Streams are reproducible bit-exactly for a fixed seed and
/// may be split per record via derive(), so frames can be processed in
/// any order without changing their individual draws.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    static constexpr const char* kAlgorithm = "splitmix64";

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + uniform() * (hi - lo); }

    bool bernoulli(double p) { return uniform() < p; }

    /// Standard normal via Box-Muller; one fresh pair per call keeps the
    /// draw count per sample fixed, which matters for stream splitting.
    double gaussian() {
        double u1 = uniform();
        double u2 = uniform();
        // Guard the log against u1 == 0.
        u1 = u1 > 0.0 ? u1 : 0x1.0p-53;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    }

    /// Child generator for an independent sub-stream keyed by a label
    /// (typically the frame id). FNV-1a folds the label, splitmix64
    /// scrambles the combination.
    Rng derive(std::string_view label) const {
        std::uint64_t h = 14695981039346656037ull;
        for (unsigned char c : label) {
            h ^= c;
            h *= 1099511628211ull;
        }
        Rng child(state_ ^ h);
        child.next_u64();
        return child;
    }

    Rng derive(std::uint64_t salt) const {
        Rng child(state_ ^ (salt * 0x9E3779B97F4A7C15ull));
        child.next_u64();
        return child;
    }

private:
    std::uint64_t state_;
};

}  // namespace lanevp
