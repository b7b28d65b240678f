#pragma once

#include "zeronoise/circle_map.hpp"
#include "zeronoise/density.hpp"
#include "zeronoise/noise_kernel.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace zeronoise {

/// Philox4x32-10 counter-based generator. Each (key, counter) pair maps to
/// four independent 32-bit words, so chains never share state.
class Philox {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter block(Counter counter, Key key);
};

/// Stream of uniforms in [0, 1) for one chain.
class PhiloxStream {
public:
    PhiloxStream(std::uint64_t seed, std::uint32_t stream);
    double uniform();

private:
    Philox::Key key_;
    std::uint32_t stream_;
    std::uint64_t blocks_ = 0;
    Philox::Counter buffer_{};
    int used_ = 4;
};

/// Inverse CDF of a kernel from the cumulative trapezoid rule on 2^14 knots.
class KernelSampler {
public:
    explicit KernelSampler(const NoiseKernel& kernel, int knots = 1 << 14);
    /// z in [support_lo, support_hi] for u in [0, 1).
    double quantile(double u) const;

private:
    std::vector<double> z_;
    std::vector<double> cdf_;
};

struct SimulationConfig {
    long n_steps = 1000000;  ///< per chain, burn-in included
    long burn_in = 1000;
    int n_chains = 10;
    std::uint64_t seed = 1;
    int bins = 64;
    int threads = 1;

    long samples() const noexcept { return (n_steps - burn_in) * n_chains; }
};

/// Histogram of X_{n+1} = T(X_n) + delta Z_n mod 1 pooled over chains,
/// normalized to mean 1. Deterministic in the seed for any thread count.
BinDensity simulate_histogram(const CircleMap& map, const NoiseKernel& kernel, double delta,
                              const SimulationConfig& config);

}  // namespace zeronoise
