#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace itl {

/// SplitMix64 step; used for seed mixing so stage seeds are decorrelated.
std::uint64_t splitmix64(std::uint64_t x);

/// Derive a sub-seed from a master seed and a stage label. Adding a new
/// stage label never perturbs the stream of any existing stage.
std::uint64_t derive_seed(std::uint64_t master, std::string_view label);

/// Deterministic random source. All distribution transforms are implemented
/// here (not via std:: distributions) so sequences are identical across
/// standard library implementations.
class RandomEngine {
public:
    explicit RandomEngine(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform in (0, 1]; safe as a log() argument.
    double uniform_open() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

    /// Standard normal via Box-Muller (one value per call; no cached spare).
    double normal();

    /// Uniform integer in [0, n); rejection sampling, unbiased.
    std::size_t uniform_index(std::size_t n);

    bool bernoulli(double p) { return uniform() < p; }

    /// Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = uniform_index(i);
            std::swap(v[i - 1], v[j]);
        }
    }

    /// k distinct indices from [0, n), in draw order.
    std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k);

private:
    std::mt19937_64 gen_;
};

}  // namespace itl
