#include "zeronoise/montecarlo.hpp"

#include "zeronoise/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace zeronoise {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

double frac(double v) {
    const double f = v - std::floor(v);
    return f >= 1.0 ? 0.0 : f;
}

}  // namespace

Philox::Counter Philox::block(Counter c, Key k) {
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kMul0, c[0], hi0, lo0);
        mulhilo(kMul1, c[2], hi1, lo1);
        c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
        k[0] += kWeyl0;
        k[1] += kWeyl1;
    }
    return c;
}

PhiloxStream::PhiloxStream(std::uint64_t seed, std::uint32_t stream)
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
      stream_(stream) {}

double PhiloxStream::uniform() {
    if (used_ >= 4) {
        // Counter words: block index (64 bit), stream id, 0.
        buffer_ = Philox::block({static_cast<std::uint32_t>(blocks_),
                                 static_cast<std::uint32_t>(blocks_ >> 32), stream_, 0u},
                                key_);
        ++blocks_;
        used_ = 0;
    }
    const std::uint64_t hi = buffer_[static_cast<std::size_t>(used_)];
    const std::uint64_t lo = buffer_[static_cast<std::size_t>(used_ + 1)];
    used_ += 2;
    return static_cast<double>(((hi << 32) | lo) >> 11) * 0x1.0p-53;
}

KernelSampler::KernelSampler(const NoiseKernel& kernel, int knots) {
    if (knots < 2) throw ValidationError("KernelSampler: need at least two knots");
    const double lo = kernel.support_lo();
    const double hi = kernel.support_hi();
    z_.resize(static_cast<std::size_t>(knots));
    cdf_.resize(static_cast<std::size_t>(knots));
    double previous = kernel(lo);
    cdf_[0] = 0.0;
    z_[0] = lo;
    for (int i = 1; i < knots; ++i) {
        const double z = lo + (hi - lo) * i / (knots - 1);
        const double v = kernel(z);
        z_[static_cast<std::size_t>(i)] = z;
        cdf_[static_cast<std::size_t>(i)] =
            cdf_[static_cast<std::size_t>(i - 1)] + 0.5 * (previous + v) * (z - z_[static_cast<std::size_t>(i - 1)]);
        previous = v;
    }
    const double total = cdf_.back();
    if (!(total > 0.0)) throw ValidationError("KernelSampler: kernel has no mass");
    for (double& c : cdf_) c /= total;
    cdf_.back() = 1.0;
}

double KernelSampler::quantile(double u) const {
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.begin()) return z_.front();
    if (it == cdf_.end()) return z_.back();
    const std::size_t i = static_cast<std::size_t>(it - cdf_.begin());
    const double c0 = cdf_[i - 1];
    const double c1 = cdf_[i];
    const double t = c1 > c0 ? (u - c0) / (c1 - c0) : 0.0;
    return z_[i - 1] + t * (z_[i] - z_[i - 1]);
}

BinDensity simulate_histogram(const CircleMap& map, const NoiseKernel& kernel, double delta,
                              const SimulationConfig& config) {
    if (!(delta > 0.0 && delta <= 1.0)) {
        throw ValidationError(fmt::format("simulate_histogram: delta = {} outside (0, 1]", delta));
    }
    if (!(config.burn_in >= 0 && config.burn_in < config.n_steps)) {
        throw ValidationError("simulate_histogram: need 0 <= burn_in < n_steps");
    }
    if (config.bins < 16) throw ValidationError("simulate_histogram: need at least 16 bins");
    if (config.n_chains < 1) throw ValidationError("simulate_histogram: need at least one chain");

    const KernelSampler sampler(kernel);
    const int chains = config.n_chains;
    std::vector<std::vector<long>> counts(static_cast<std::size_t>(chains),
                                          std::vector<long>(static_cast<std::size_t>(config.bins), 0));
    auto run_chain = [&](int c) {
        PhiloxStream rng(config.seed, static_cast<std::uint32_t>(c));
        auto& hist = counts[static_cast<std::size_t>(c)];
        double x = rng.uniform();
        for (long step = 0; step < config.n_steps; ++step) {
            x = frac(map(x) + delta * sampler.quantile(rng.uniform()));
            if (step >= config.burn_in) {
                hist[static_cast<std::size_t>(std::min(config.bins - 1, static_cast<int>(x * config.bins)))]++;
            }
        }
    };

    const int threads = std::max(1, std::min(config.threads, chains));
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int t = 1; t < threads; ++t) {
        pool.emplace_back([&] {
            for (int c = next++; c < chains; c = next++) run_chain(c);
        });
    }
    for (int c = next++; c < chains; c = next++) run_chain(c);
    for (auto& th : pool) th.join();

    std::vector<long> total(static_cast<std::size_t>(config.bins), 0);
    for (const auto& hist : counts) {
        for (std::size_t i = 0; i < hist.size(); ++i) total[i] += hist[i];
    }
    const double scale = static_cast<double>(config.bins) / static_cast<double>(config.samples());
    std::vector<double> values(total.size());
    for (std::size_t i = 0; i < total.size(); ++i) values[i] = static_cast<double>(total[i]) * scale;
    return BinDensity(std::move(values));
}

}  // namespace zeronoise
