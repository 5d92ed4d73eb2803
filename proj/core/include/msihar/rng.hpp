#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace msihar {

// splitmix64 generator. Every random choice in the toolkit flows from one
// of these, so runs are reproducible bit for bit given the same seed.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    double next_double() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, n). Modulo bias is negligible for the n used
    // here and keeps the draw count per call fixed.
    std::uint64_t next_below(std::uint64_t n) { return next() % n; }

    // Standard normal via Box-Muller; consumes exactly two draws per call.
    double next_gaussian() {
        double u1 = next_double();
        double u2 = next_double();
        if (u1 < 1e-300) u1 = 1e-300;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

    double next_uniform(double lo, double hi) {
        return lo + (hi - lo) * next_double();
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        if (v.size() < 2) return;
        for (std::size_t i = v.size() - 1; i > 0; --i) {
            const std::size_t j = static_cast<std::size_t>(next_below(i + 1));
            std::swap(v[i], v[j]);
        }
    }

private:
    std::uint64_t state_;
};

// Seeds for n independent streams, all derived from one master seed.
inline std::vector<std::uint64_t> derive_seeds(std::uint64_t master, std::size_t n) {
    SplitMix64 rng(master);
    std::vector<std::uint64_t> out(n);
    for (auto& s : out) s = rng.next();
    return out;
}

}  // namespace msihar
