#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace cpsim {

/// splitmix64 step; used to derive independent substream seeds so that
/// parallel sweep tasks are reproducible regardless of execution order.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    return splitmix64(base ^ splitmix64(stream + 1));
}

/// Deterministic RNG wrapper. Distributions are hand-rolled from raw
/// mt19937_64 draws; std::*_distribution output is not pinned by the
/// standard and would break byte-identical reruns across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    /// Uniform in [0, 1).
    double next_double() {
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n).
    std::uint64_t next_below(std::uint64_t n) {
        // Rejection sampling; unbiased and deterministic.
        const std::uint64_t limit = n * (UINT64_MAX / n);
        std::uint64_t x;
        do {
            x = eng_();
        } while (x >= limit);
        return x / (UINT64_MAX / n);
    }

    int next_int(int lo, int hi) { // inclusive bounds
        return lo + static_cast<int>(next_below(static_cast<std::uint64_t>(hi - lo + 1)));
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    double exponential(double mean) {
        double u;
        do {
            u = next_double();
        } while (u <= 0.0);
        return -mean * std::log(u);
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[next_below(i)]);
        }
    }

private:
    std::mt19937_64 eng_;
};

/// Nearest-rank quantile of an unsorted sample set.
inline double quantile(std::vector<double> samples, double q) {
    if (samples.empty()) return 0.0;
    std::sort(samples.begin(), samples.end());
    const auto n = static_cast<double>(samples.size());
    auto rank = static_cast<std::size_t>(std::ceil(q * n));
    if (rank == 0) rank = 1;
    if (rank > samples.size()) rank = samples.size();
    return samples[rank - 1];
}

inline double mean_of(std::span<const double> samples) {
    if (samples.empty()) return 0.0;
    double s = 0.0;
    for (double x : samples) s += x;
    return s / static_cast<double>(samples.size());
}

} // namespace cpsim
