#pragma once

#include <complex>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace zeronoise {

struct KernelMoments {
    double mass = 0.0;
    double mean = 0.0;
    double sigma2 = 0.0;
};

/// A probability density on [-1, 1] with zero mean and bounded variation.
///
/// The evaluator is only consulted on the declared support; outside it the
/// kernel is zero. `pieces` lists the points where the density may fail to
/// be smooth (support endpoints included) so that quadrature can split there.
/// Construction validates mass, mean, positive second moment and
/// non-negativity; violations throw ValidationError.
class NoiseKernel {
public:
    using Density = std::function<double(double)>;

    NoiseKernel(std::string name, Density density, std::vector<double> pieces,
                std::optional<KernelMoments> analytic_moments = std::nullopt,
                std::optional<double> analytic_variation = std::nullopt);

    double operator()(double z) const;

    const std::string& name() const noexcept { return name_; }
    double support_lo() const noexcept { return pieces_.front(); }
    double support_hi() const noexcept { return pieces_.back(); }
    const std::vector<double>& pieces() const noexcept { return pieces_; }
    const std::optional<KernelMoments>& analytic_moments() const noexcept {
        return analytic_moments_;
    }
    const std::optional<double>& analytic_variation() const noexcept {
        return analytic_variation_;
    }

private:
    std::string name_;
    Density density_;
    std::vector<double> pieces_;
    std::optional<KernelMoments> analytic_moments_;
    std::optional<double> analytic_variation_;
};

/// rho_delta(x) = rho(x / delta) / delta, supported in [-delta, delta].
class ScaledKernel {
public:
    ScaledKernel(NoiseKernel kernel, double delta);

    double operator()(double x) const;
    double delta() const noexcept { return delta_; }
    double support_lo() const noexcept { return delta_ * kernel_.support_lo(); }
    double support_hi() const noexcept { return delta_ * kernel_.support_hi(); }
    std::vector<double> pieces() const;
    const NoiseKernel& base() const noexcept { return kernel_; }

private:
    NoiseKernel kernel_;
    double delta_;
};

NoiseKernel uniform_kernel();
NoiseKernel triangular_kernel();
NoiseKernel epanechnikov_kernel();

/// Triangular density on [-1, 1 - mode] peaking at `mode`; the support is
/// chosen so the mean vanishes. Its third moment is nonzero for mode > 0.
NoiseKernel skew_triangular_kernel(double mode = 0.25);

/// Piecewise-linear kernel through (z_i, rho_i) on a uniform grid.
NoiseKernel tabulated_kernel(std::string name, std::vector<double> z,
                             std::vector<double> rho);

/// Reads a two-column (z, rho) CSV; a header row is allowed.
NoiseKernel load_kernel_csv(const std::filesystem::path& path);

/// Builds one of the named kernels: uniform, triangular, epanechnikov,
/// skew_triangular.
NoiseKernel kernel_by_name(const std::string& name);

std::vector<std::string> builtin_kernel_names();

/// Composite Gauss-Legendre moments; `quadrature_order` >= 16 is the number
/// of nodes per panel. Throws ValidationError for a non-normalized kernel or
/// when analytic moments disagree beyond 1e-8.
KernelMoments moments(const NoiseKernel& kernel, int quadrature_order = 32);

/// First absolute moment, int |z| rho(z) dz.
double absolute_moment(const NoiseKernel& kernel);

/// Third moment, int z^3 rho(z) dz.
double third_moment(const NoiseKernel& kernel);

/// Throws ValidationError for delta outside (0, 1]; delta = 0 is the Dirac
/// kernel and has no density.
ScaledKernel rescale(const NoiseKernel& kernel, double delta);

/// Discrete variation on grid_size uniform cells of [-1, 1], extended by 0.
double total_variation(const NoiseKernel& kernel, int grid_size);
double total_variation(const ScaledKernel& kernel, int grid_size);

/// rho_delta-hat(k) = int rho_delta(x) exp(-2 pi i k x) dx for k = -k_max..k_max.
std::vector<std::complex<double>> fourier_multiplier(const NoiseKernel& kernel,
                                                     double delta, int k_max);

}  // namespace zeronoise
