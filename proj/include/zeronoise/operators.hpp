#pragma once

#include "zeronoise/circle_map.hpp"
#include "zeronoise/density.hpp"
#include "zeronoise/noise_kernel.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace zeronoise {

enum class OperatorKind { deterministic, convolution, composed, generic };

enum class Backend { ulam, fourier };

std::string to_string(OperatorKind kind);
std::string to_string(Backend backend);
Backend backend_from_string(const std::string& name);

struct OperatorInfo {
    OperatorKind kind = OperatorKind::generic;
    std::string map_name;
    std::string kernel_name;
    double delta = 0.0;
    /// Ulam convolution with delta below a quarter bin width.
    bool under_resolved = false;
};

/// Circulant stencil on n bins: (Q g)_i = sum_d c_d g_{i-d}, d in [first, first + size).
struct Circulant {
    int first = 0;
    std::vector<double> coefficients;
};

/// Ulam operator on n bins, stored as a sparse column-stochastic transfer
/// matrix followed by a circulant convolution. Either factor may be absent
/// (identity). A dense matrix may be given instead for generic Markov
/// operators; column sums of 1 preserve the mean, so stationary vectors come
/// back scaled to mean 1.
class UlamOperator {
public:
    UlamOperator(int n, std::optional<Eigen::SparseMatrix<double>> transfer,
                 std::optional<Circulant> convolution);
    /// Generic column-stochastic matrix.
    static UlamOperator from_matrix(Eigen::MatrixXd matrix);

    int size() const noexcept { return n_; }
    BinDensity apply(const BinDensity& g) const;
    Eigen::VectorXd apply(const Eigen::VectorXd& v) const;
    Eigen::MatrixXd dense() const;

    const std::optional<Eigen::SparseMatrix<double>>& transfer() const noexcept {
        return transfer_;
    }
    const std::optional<Circulant>& convolution() const noexcept { return convolution_; }
    bool is_generic() const noexcept { return generic_.has_value(); }

private:
    int n_ = 0;
    std::optional<Eigen::SparseMatrix<double>> transfer_;
    std::optional<Circulant> convolution_;
    std::optional<Eigen::MatrixXd> generic_;
};

/// Galerkin matrix on Fourier modes |k| <= N, indexed k + N.
class FourierOperator {
public:
    FourierOperator(int modes, Eigen::MatrixXcd matrix);

    int modes() const noexcept { return modes_; }
    int size() const noexcept { return 2 * modes_ + 1; }
    const Eigen::MatrixXcd& matrix() const noexcept { return matrix_; }
    std::complex<double> entry(int k, int m) const { return matrix_(k + modes_, m + modes_); }
    FourierDensity apply(const FourierDensity& g) const;

private:
    int modes_ = 0;
    Eigen::MatrixXcd matrix_;
};

/// A discretized Markov operator in either representation.
class TransferMatrix {
public:
    TransferMatrix(UlamOperator op, OperatorInfo info);
    TransferMatrix(FourierOperator op, OperatorInfo info);

    Backend backend() const noexcept;
    /// Bins (Ulam) or modes N (Fourier).
    int resolution() const noexcept;
    int dimension() const noexcept;
    const OperatorInfo& info() const noexcept { return info_; }

    const UlamOperator& ulam() const;
    const FourierOperator& fourier() const;

    DensityGrid apply(const DensityGrid& g) const;
    BinDensity apply(const BinDensity& g) const;
    FourierDensity apply(const FourierDensity& g) const;

private:
    std::variant<UlamOperator, FourierOperator> op_;
    OperatorInfo info_;
};

/// Identity operator of the given backend and resolution.
TransferMatrix identity_operator(Backend backend, int resolution);

/// Exact bin-transition matrix of T: P_ij = Leb(bin_j with T(x) in bin_i) / bin width.
TransferMatrix assemble_ulam(const CircleMap& map, int n);

/// Galerkin matrix by trapezoidal quadrature on quad_points nodes; 0 picks
/// 16 N. Throws ResolutionError when doubling quad_points moves an entry by
/// more than 1e-8.
TransferMatrix assemble_fourier(const CircleMap& map, int modes, int quad_points = 0);

/// Convolution by rho_delta: circulant (Ulam) or diagonal multiplier (Fourier).
/// delta = 0 gives the identity.
TransferMatrix assemble_convolution(const NoiseKernel& kernel, double delta, Backend backend,
                                    int resolution);

/// Bin-averaged circulant stencil of rho_delta on n bins.
Circulant ulam_stencil(const NoiseKernel& kernel, double delta, int n);

/// L_delta = Q L_T.
TransferMatrix compose_noisy(const TransferMatrix& transfer, const TransferMatrix& convolution);

/// L_T then Q_delta in one call.
TransferMatrix assemble_noisy(const CircleMap& map, const NoiseKernel& kernel, double delta,
                              Backend backend, int resolution);

/// Discretizes f in the operator's representation.
DensityGrid discretize(const std::function<double(double)>& f, Backend backend, int resolution);

}  // namespace zeronoise
