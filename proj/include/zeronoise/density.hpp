#pragma once

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <span>
#include <variant>
#include <vector>

namespace zeronoise {

/// Piecewise-constant density: values are averages over n uniform bins of
/// the circle. Mass is the mean of the values.
class BinDensity {
public:
    BinDensity() = default;
    explicit BinDensity(std::vector<double> values);

    static BinDensity constant(int n, double value = 1.0);
    /// Bin averages of f by Gauss-Legendre quadrature inside each bin.
    static BinDensity from_function(int n, const std::function<double(double)>& f,
                                    int nodes_per_bin = 8);

    int size() const noexcept { return static_cast<int>(values_.size()); }
    double bin_width() const noexcept { return 1.0 / static_cast<double>(values_.size()); }
    double center(int i) const noexcept { return (i + 0.5) * bin_width(); }
    double mass() const;

    std::span<const double> values() const noexcept { return values_; }
    std::vector<double>& data() noexcept { return values_; }
    double operator[](int i) const { return values_[static_cast<std::size_t>(i)]; }
    double& operator[](int i) { return values_[static_cast<std::size_t>(i)]; }

    BinDensity& operator+=(const BinDensity& other);
    BinDensity& operator-=(const BinDensity& other);
    BinDensity& operator*=(double s);

private:
    std::vector<double> values_;
};

BinDensity operator+(BinDensity a, const BinDensity& b);
BinDensity operator-(BinDensity a, const BinDensity& b);
BinDensity operator*(double s, BinDensity a);

/// Truncated Fourier series sum_{|k| <= N} c_k exp(2 pi i k x); mass is c_0.
class FourierDensity {
public:
    FourierDensity() = default;
    explicit FourierDensity(int modes);
    FourierDensity(int modes, Eigen::VectorXcd coefficients);

    static FourierDensity constant(int modes, double value = 1.0);
    /// Trapezoidal projection of f onto |k| <= modes.
    static FourierDensity from_function(int modes, const std::function<double(double)>& f,
                                        int quad_points = 0);

    int modes() const noexcept { return modes_; }
    std::complex<double> coeff(int k) const { return c_(k + modes_); }
    std::complex<double>& coeff(int k) { return c_(k + modes_); }
    const Eigen::VectorXcd& coefficients() const noexcept { return c_; }
    Eigen::VectorXcd& coefficients() noexcept { return c_; }
    double mass() const { return c_(modes_).real(); }

    FourierDensity derivative(int order = 1) const;
    double operator()(double x) const;
    /// Real part of the series at x_j = j / samples.
    std::vector<double> sample(int samples) const;

    FourierDensity& operator+=(const FourierDensity& other);
    FourierDensity& operator-=(const FourierDensity& other);
    FourierDensity& operator*=(double s);

private:
    int modes_ = 0;
    Eigen::VectorXcd c_;
};

FourierDensity operator+(FourierDensity a, const FourierDensity& b);
FourierDensity operator-(FourierDensity a, const FourierDensity& b);
FourierDensity operator*(double s, FourierDensity a);

using DensityGrid = std::variant<BinDensity, FourierDensity>;

/// Discrete stand-ins for the L1, W^{k,1} (k <= 3), BV and Lipschitz norms.
///
/// Bins: forward differences with periodic wrap. Fourier: spectral
/// derivatives, L1 by the trapezoid rule on a fine uniform sample.
struct Norms {
    double l1 = 0.0;
    double w11 = 0.0;
    double w21 = 0.0;
    double w31 = 0.0;
    double bv = 0.0;
    double lip = 0.0;

    double sobolev(int k) const;
};

Norms norms(const BinDensity& g);
Norms norms(const FourierDensity& g);
Norms norms(const DensityGrid& g);

double l1_norm(const BinDensity& g);
double l1_norm(const FourierDensity& g);
/// W^{k,1} norm, k in [0, 3]; k = 0 is L1.
double sobolev_norm(const BinDensity& g, int k);
double sobolev_norm(const FourierDensity& g, int k);
double variation(const BinDensity& g);
double lipschitz_constant(const BinDensity& g);

/// Sample count used for Fourier L1 quadrature.
int fourier_norm_samples(int modes);

/// Exact bin averages of a Fourier series; mass is preserved.
BinDensity to_bins(const FourierDensity& g, int bins);
/// Fourier coefficients of a piecewise-constant function; mass is preserved.
FourierDensity to_fourier(const BinDensity& g, int modes);
/// Averages groups of size()/bins consecutive bins.
BinDensity coarse_grain(const BinDensity& g, int bins);

double mass(const DensityGrid& g);

}  // namespace zeronoise
