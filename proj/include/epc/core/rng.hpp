#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace epc {

// Seeded pseudo-random source with portable, bit-stable derived draws.
//
// std::mt19937_64 has a standard-defined output sequence, but the standard
// distributions do not, so every derived draw is implemented here.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1) with 53 bits of resolution.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Uniform integer in [0, n). n must be > 0.
    std::uint64_t uniform_index(std::uint64_t n);

    // Standard normal via Box-Muller (one output per call, no cached pair).
    double normal();

    bool bernoulli(double p) { return uniform01() < p; }

    template <typename T>
    void shuffle(std::span<T> items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(uniform_index(i));
            std::swap(items[i - 1], items[j]);
        }
    }

    // Fingerprint of the current engine state; advances a copy, not *this.
    std::uint64_t fingerprint() const {
        auto copy = engine_;
        return copy();
    }

private:
    std::mt19937_64 engine_;
};

// Derives an independent seed for a named sub-stream.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

} // namespace epc
