#pragma once

#include "zeronoise/density.hpp"
#include "zeronoise/operators.hpp"

#include <string>

namespace zeronoise {

struct SolveReport {
    int iterations = 0;
    double final_residual = 0.0;        ///< ||L h - h||_{L1}
    double normalization_defect = 0.0;  ///< |mass(L h) - mass(h)|
    double contraction_ratio = 0.0;     ///< last measured residual ratio of power iteration
    double min_value = 0.0;             ///< before clipping (Ulam) or on a fine sample (Fourier)
    double clip_magnitude = 0.0;        ///< L1 mass removed by clipping negatives (Ulam)
    std::string method = "power";       ///< power, direct or gmres
};

struct StationaryResult {
    DensityGrid density;
    SolveReport report;
};

/// Fixed point of a Markov operator with mass 1. Power iteration from the
/// constant density; falls back to a deflated direct (or GMRES) solve when
/// the contraction ratio stays above 0.999 or max_iter is reached.
/// Throws ConvergenceError with the measured ratio when both fail.
StationaryResult stationary_density(const TransferMatrix& op, double tol = 1e-12,
                                    int max_iter = 100000);

struct ResolventResult {
    DensityGrid solution;
    double residual = 0.0;  ///< ||u - L u - g||_{L1}
    int iterations = 0;     ///< GMRES iterations, 0 for dense solves
};

/// u with (Id - L) u = g and mass(u) = 0 for mass(g) = 0, from the
/// rank-one deflated system (Id - L + e m) u = g.
ResolventResult resolvent_apply(const TransferMatrix& op, const DensityGrid& g);

struct EquilibriumRate {
    double rate = 0.0;
    double prefactor = 0.0;
    int points = 0;  ///< iterates used in the fit
    std::string diagnostic;
};

/// Fits v_n ~ C rate^n for v_n = max over trial g of ||L^n g||_{L1} / Var(g),
/// n = 0..n_max, over zero-average trial functions cos(2 pi 2^t x + 0.7 t).
/// Var is the BV seminorm, a norm on zero-average functions.
EquilibriumRate equilibrium_rate(const TransferMatrix& op, int trials = 8, int n_max = 30);

/// Stationary probability vector of a column-stochastic matrix by a deflated
/// dense solve.
Eigen::VectorXd stationary_vector(const Eigen::MatrixXd& markov);

/// (Id - L)^{-1} g on zero-sum vectors for a column-stochastic matrix.
Eigen::VectorXd markov_resolvent(const Eigen::MatrixXd& markov, const Eigen::VectorXd& g);

}  // namespace zeronoise
