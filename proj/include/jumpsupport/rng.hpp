#pragma once

#include <cstdint>
#include <random>

#include "jumpsupport/types.hpp"

namespace jumpsupport {

/// SplitMix64 finalizer; used to derive well-separated substream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Deterministic random stream. Samplers take one of these explicitly; there
/// is no global generator anywhere in the library.
class Stream {
public:
    explicit Stream(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    /// Independent child stream for path/worker `index` under `master`.
    static Stream substream(std::uint64_t master, std::uint64_t index) {
        return Stream(splitmix64(master ^ splitmix64(index + 0x632be59bd9b4e019ULL)));
    }

    /// Uniform on [0, 1).
    double uniform() { return std::generate_canonical<double, 53>(engine_); }
    /// Uniform on (0, 1]; safe for inverse-CDF power transforms.
    double uniform_open_left() { return 1.0 - uniform(); }
    double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }
    std::uint64_t poisson(double mean) {
        if (mean <= 0.0) return 0;
        return std::poisson_distribution<std::uint64_t>(mean)(engine_);
    }
    Vector normal_vector(Eigen::Index n) {
        Vector v(n);
        for (Eigen::Index i = 0; i < n; ++i) v[i] = normal();
        return v;
    }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

}  // namespace jumpsupport
