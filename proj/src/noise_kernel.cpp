#include "zeronoise/noise_kernel.hpp"

#include "zeronoise/errors.hpp"
#include "zeronoise/quadrature.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace zeronoise {

namespace {

constexpr double kValidationTolerance = 1e-6;
constexpr double kAnalyticAgreement = 1e-8;

const GaussLegendre& rule32() {
    static const GaussLegendre rule(32);
    return rule;
}

template <class F>
double integrate_pieces(const std::vector<double>& pieces, F&& f,
                        const GaussLegendre& rule, int panels) {
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < pieces.size(); ++i) {
        total += rule.integrate(f, pieces[i], pieces[i + 1], panels);
    }
    return total;
}

template <class Kernel>
double sampled_variation(const Kernel& rho, int grid_size) {
    if (grid_size < 1) throw ValidationError("total_variation: grid_size must be positive");
    double variation = 0.0;
    double previous = 0.0;
    for (int i = 0; i <= grid_size; ++i) {
        const double z = -1.0 + 2.0 * i / grid_size;
        const double value = rho(z);
        variation += std::abs(value - previous);
        previous = value;
    }
    return variation + std::abs(previous);
}

}  // namespace

NoiseKernel::NoiseKernel(std::string name, Density density, std::vector<double> pieces,
                         std::optional<KernelMoments> analytic_moments,
                         std::optional<double> analytic_variation)
    : name_(std::move(name)),
      density_(std::move(density)),
      pieces_(std::move(pieces)),
      analytic_moments_(analytic_moments),
      analytic_variation_(analytic_variation) {
    std::sort(pieces_.begin(), pieces_.end());
    pieces_.erase(std::unique(pieces_.begin(), pieces_.end()), pieces_.end());
    if (pieces_.size() < 2 || pieces_.front() < -1.0 || pieces_.back() > 1.0) {
        throw ValidationError(fmt::format("kernel '{}': support must be a nondegenerate "
                                          "subinterval of [-1, 1]",
                                          name_));
    }
    const int samples = 2048;
    const double lo = pieces_.front();
    const double hi = pieces_.back();
    for (int i = 0; i <= samples; ++i) {
        const double z = lo + (hi - lo) * i / samples;
        if (!(density_(z) >= 0.0)) {
            throw ValidationError(
                fmt::format("kernel '{}': negative or non-finite value at z={}", name_, z));
        }
    }
    const KernelMoments m = moments(*this, 32);
    (void)m;
}

double NoiseKernel::operator()(double z) const {
    if (z < pieces_.front() || z > pieces_.back()) return 0.0;
    return density_(z);
}

ScaledKernel::ScaledKernel(NoiseKernel kernel, double delta)
    : kernel_(std::move(kernel)), delta_(delta) {}

double ScaledKernel::operator()(double x) const { return kernel_(x / delta_) / delta_; }

std::vector<double> ScaledKernel::pieces() const {
    std::vector<double> out;
    out.reserve(kernel_.pieces().size());
    for (double p : kernel_.pieces()) out.push_back(delta_ * p);
    return out;
}

NoiseKernel uniform_kernel() {
    return NoiseKernel("uniform", [](double) { return 0.5; }, {-1.0, 1.0},
                       KernelMoments{1.0, 0.0, 1.0 / 3.0}, 1.0);
}

NoiseKernel triangular_kernel() {
    return NoiseKernel("triangular", [](double z) { return 1.0 - std::abs(z); },
                       {-1.0, 0.0, 1.0}, KernelMoments{1.0, 0.0, 1.0 / 6.0}, 2.0);
}

NoiseKernel epanechnikov_kernel() {
    return NoiseKernel("epanechnikov", [](double z) { return 0.75 * (1.0 - z * z); },
                       {-1.0, 1.0}, KernelMoments{1.0, 0.0, 0.2}, 1.5);
}

NoiseKernel skew_triangular_kernel(double mode) {
    if (!(mode >= 0.0 && mode <= 0.5)) {
        throw ValidationError("skew_triangular: mode must lie in [0, 0.5]");
    }
    const double a = -1.0;
    const double b = 1.0 - mode;  // a + b + mode = 0 makes the mean vanish
    const double c = mode;
    const double peak = 2.0 / (b - a);
    auto density = [=](double z) {
        if (z <= c) return peak * (z - a) / (c - a);
        return b > c ? peak * (b - z) / (b - c) : 0.0;
    };
    const double sigma2 = (a * a + b * b + c * c - a * b - a * c - b * c) / 18.0;
    return NoiseKernel(fmt::format("skew_triangular({})", mode), density, {a, c, b},
                       KernelMoments{1.0, 0.0, sigma2}, 2.0 * peak);
}

NoiseKernel tabulated_kernel(std::string name, std::vector<double> z, std::vector<double> rho) {
    if (z.size() != rho.size() || z.size() < 2) {
        throw ValidationError("tabulated kernel: need at least two (z, rho) pairs");
    }
    const double step = (z.back() - z.front()) / static_cast<double>(z.size() - 1);
    if (!(step > 0.0)) throw ValidationError("tabulated kernel: z must increase");
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double expected = z.front() + step * static_cast<double>(i);
        if (std::abs(z[i] - expected) > 1e-9 * std::max(1.0, std::abs(expected))) {
            throw ValidationError("tabulated kernel: z must be a uniform grid");
        }
    }
    const double z0 = z.front();
    auto density = [z0, step, values = rho](double x) {
        const double t = (x - z0) / step;
        const auto last = static_cast<double>(values.size() - 1);
        if (t <= 0.0) return values.front();
        if (t >= last) return values.back();
        const auto i = static_cast<std::size_t>(t);
        const double frac = t - static_cast<double>(i);
        return (1.0 - frac) * values[i] + frac * values[i + 1];
    };
    return NoiseKernel(std::move(name), density, std::move(z));
}

NoiseKernel load_kernel_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError(fmt::format("cannot open kernel table '{}'", path.string()));
    std::vector<double> z;
    std::vector<double> rho;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream fields(line);
        double a = 0.0;
        double b = 0.0;
        if (!(fields >> a >> b)) {
            if (z.empty()) continue;  // header
            throw ValidationError(
                fmt::format("{}:{}: expected two numeric columns", path.string(), line_no));
        }
        z.push_back(a);
        rho.push_back(b);
    }
    return tabulated_kernel(path.stem().string(), std::move(z), std::move(rho));
}

NoiseKernel kernel_by_name(const std::string& name) {
    if (name == "uniform") return uniform_kernel();
    if (name == "triangular") return triangular_kernel();
    if (name == "epanechnikov") return epanechnikov_kernel();
    if (name == "skew_triangular") return skew_triangular_kernel();
    throw ValidationError(fmt::format("unknown kernel '{}'", name));
}

std::vector<std::string> builtin_kernel_names() {
    return {"uniform", "triangular", "epanechnikov", "skew_triangular"};
}

KernelMoments moments(const NoiseKernel& kernel, int quadrature_order) {
    if (quadrature_order < 16) {
        throw ValidationError("moments: quadrature_order must be at least 16");
    }
    const GaussLegendre rule(quadrature_order);
    const auto& pieces = kernel.pieces();
    // Tabulated kernels have many short pieces; one panel each suffices.
    const int panels = pieces.size() > 16 ? 1 : 8;
    KernelMoments m;
    m.mass = integrate_pieces(pieces, [&](double z) { return kernel(z); }, rule, panels);
    m.mean = integrate_pieces(pieces, [&](double z) { return z * kernel(z); }, rule, panels);
    m.sigma2 =
        integrate_pieces(pieces, [&](double z) { return z * z * kernel(z); }, rule, panels);

    if (std::abs(m.mass - 1.0) > kValidationTolerance) {
        throw ValidationError(
            fmt::format("kernel '{}' is not normalized: mass = {:.12g}", kernel.name(), m.mass));
    }
    if (std::abs(m.mean) > kValidationTolerance) {
        throw ValidationError(
            fmt::format("kernel '{}' is not mean-zero: mean = {:.12g}", kernel.name(), m.mean));
    }
    if (!(m.sigma2 > 0.0)) {
        throw ValidationError(fmt::format("kernel '{}' has zero variance", kernel.name()));
    }
    if (const auto& exact = kernel.analytic_moments()) {
        if (std::abs(exact->mass - m.mass) > kAnalyticAgreement ||
            std::abs(exact->mean - m.mean) > kAnalyticAgreement ||
            std::abs(exact->sigma2 - m.sigma2) > kAnalyticAgreement) {
            throw ValidationError(
                fmt::format("kernel '{}': quadrature moments disagree with analytic values",
                            kernel.name()));
        }
    }
    return m;
}

double absolute_moment(const NoiseKernel& kernel) {
    auto pieces = kernel.pieces();
    if (pieces.front() < 0.0 && pieces.back() > 0.0) pieces.push_back(0.0);
    std::sort(pieces.begin(), pieces.end());
    pieces.erase(std::unique(pieces.begin(), pieces.end()), pieces.end());
    return integrate_pieces(
        pieces, [&](double z) { return std::abs(z) * kernel(z); }, rule32(), 4);
}

double third_moment(const NoiseKernel& kernel) {
    return integrate_pieces(
        kernel.pieces(), [&](double z) { return z * z * z * kernel(z); }, rule32(), 4);
}

ScaledKernel rescale(const NoiseKernel& kernel, double delta) {
    if (delta == 0.0) {
        throw ValidationError("rescale: delta = 0 is the Dirac kernel; use the identity path");
    }
    if (!(delta > 0.0 && delta <= 1.0)) {
        throw ValidationError(fmt::format("rescale: delta = {} outside (0, 1]", delta));
    }
    return ScaledKernel(kernel, delta);
}

double total_variation(const NoiseKernel& kernel, int grid_size) {
    return sampled_variation(kernel, grid_size);
}

double total_variation(const ScaledKernel& kernel, int grid_size) {
    return sampled_variation(kernel, grid_size);
}

std::vector<std::complex<double>> fourier_multiplier(const NoiseKernel& kernel, double delta,
                                                     int k_max) {
    if (!(delta >= 0.0 && delta <= 1.0)) {
        throw ValidationError(fmt::format("fourier_multiplier: delta = {} outside [0, 1]", delta));
    }
    if (k_max < 1) throw ValidationError("fourier_multiplier: k_max must be at least 1");
    std::vector<std::complex<double>> out(2 * static_cast<std::size_t>(k_max) + 1, 1.0);
    if (delta == 0.0) return out;

    const auto& pieces = kernel.pieces();
    const int base_panels = pieces.size() > 16 ? 1 : 2;
    for (int k = 1; k <= k_max; ++k) {
        const double omega = 2.0 * std::numbers::pi * k * delta;
        std::complex<double> value = 0.0;
        for (std::size_t i = 0; i + 1 < pieces.size(); ++i) {
            const double a = pieces[i];
            const double b = pieces[i + 1];
            const int panels =
                base_panels + static_cast<int>(std::ceil(k * delta * (b - a)));
            value += rule32().integrate(
                [&](double z) { return kernel(z) * std::polar(1.0, -omega * z); }, a, b, panels);
        }
        // Index k_max + k holds frequency k; real densities give conjugate pairs.
        out[static_cast<std::size_t>(k_max + k)] = value;
        out[static_cast<std::size_t>(k_max - k)] = std::conj(value);
    }
    return out;
}

}  // namespace zeronoise
