#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <vector>

namespace zeronoise {

/// L_delta = L0 + delta A + delta^2 B, column-stochastic for delta in [0, delta_max].
struct MarkovFamily {
    Eigen::MatrixXd L0;
    Eigen::MatrixXd A;
    Eigen::MatrixXd B;
    double delta_max = 0.0;

    int dimension() const noexcept { return static_cast<int>(L0.rows()); }
    Eigen::MatrixXd at(double delta) const { return L0 + delta * A + delta * delta * B; }
};

/// Validates the family: square equal shapes, L0 stochastic, A and B with
/// zero column sums, L_delta non-negative on a 101-point grid of
/// [0, delta_max], and a simple leading eigenvalue of L0.
/// Throws ValidationError, or UnsupportedError for a non-simple eigenvalue.
MarkovFamily make_family(Eigen::MatrixXd L0, Eigen::MatrixXd A, Eigen::MatrixXd B,
                         double delta_max);

/// Random family with strictly positive L0; A and B are scaled so that
/// positivity holds up to delta_max.
MarkovFamily random_markov_family(int d, std::uint64_t seed, double delta_max = 0.05);

/// Rows "L0|A|B,i,j,value" and one "delta_max,value" row; '#' starts a comment.
MarkovFamily load_family_csv(const std::filesystem::path& path);
void save_family_csv(const MarkovFamily& family, const std::filesystem::path& path);

struct ResponsePoint {
    double delta = 0.0;
    double deviation = 0.0;  ///< L1 norm
};

struct ResponseCheck {
    std::vector<ResponsePoint> points;
    double max_deviation = 0.0;
    Eigen::VectorXd h0;
    /// (Id - L0)^{-1} A h0 (linear) or the second-order coefficient (quadratic).
    Eigen::VectorXd term;
};

/// Compares (h_delta - h0) / delta with (Id - L0)^{-1} A h0.
ResponseCheck verify_linear_response(const MarkovFamily& family,
                                     const std::vector<double>& deltas);

/// Compares (h_delta - h0 - delta (Id - L0)^{-1} A h0) / delta^2 with
/// (Id - L0)^{-1} [B h0 + A (Id - L0)^{-1} A h0].
ResponseCheck verify_quadratic_response(const MarkovFamily& family,
                                        const std::vector<double>& deltas);

}  // namespace zeronoise
