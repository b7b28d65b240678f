#pragma once

#include "zeronoise/circle_map.hpp"
#include "zeronoise/density.hpp"
#include "zeronoise/noise_kernel.hpp"
#include "zeronoise/operators.hpp"
#include "zeronoise/solver.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace zeronoise {

struct SweepConfig {
    Backend backend = Backend::fourier;
    int resolution = 128;
    double tol = 1e-13;
    int max_iter = 100000;
    int threads = 1;
    /// Keep every h_delta in the result (densities/*.csv).
    bool keep_densities = false;
};

struct SweepRecord {
    double delta = 0.0;
    double dist_l1 = 0.0;
    std::optional<double> dist_w11;           ///< smooth maps only
    std::optional<double> response_residual;  ///< smooth maps, Fourier backend only
    double lip_hdelta = 0.0;
    double bv_hdelta = 0.0;
    /// ||(L_0 - L_delta) h_delta||_{L1} / delta.
    double perturbation_ratio = 0.0;
    SolveReport solver_report;
    bool flagged = false;
    std::string note;
};

struct SweepResult {
    std::vector<SweepRecord> records;
    DensityGrid h0;
    SolveReport h0_report;
    std::optional<FourierDensity> coefficient;  ///< R, when computed
    std::vector<DensityGrid> densities;         ///< h_delta when keep_densities
};

/// (sigma^2 / 2) (Id - L_T)^{-1} h0''. Fourier operators only.
FourierDensity quadratic_coefficient(const TransferMatrix& transfer, const FourierDensity& h0,
                                     double sigma2);

/// Solves h_delta for each delta (strictly decreasing, in (0, 0.25]) and
/// records distances to h_0. Under-resolved Ulam convolutions are flagged.
SweepResult zero_noise_sweep(const CircleMap& map, const NoiseKernel& kernel,
                             const std::vector<double>& deltas, const SweepConfig& config);

/// delta_k = 0.2 * 2^-k, k = 0..count-1.
std::vector<double> geometric_deltas(double delta_max = 0.2, int count = 7);

enum class FitModel { power, power_log };
enum class SweepField { dist_l1, dist_w11, response_residual, lip_hdelta };

std::string to_string(FitModel model);
std::string to_string(SweepField field);
FitModel fit_model_from_string(const std::string& name);
SweepField sweep_field_from_string(const std::string& name);

struct FitResult {
    FitModel model = FitModel::power;
    double exponent = 0.0;
    double prefactor = 0.0;
    double r_squared = 0.0;
    int used = 0;
    std::vector<std::string> notes;
};

/// Least squares of log value on log delta; the power-log model is
/// value = C delta^p |log delta|. Non-positive values are excluded with a note.
/// Throws ValidationError with fewer than two usable points.
FitResult fit_values(const std::vector<double>& deltas, const std::vector<double>& values,
                     FitModel model);

/// fit_values over unflagged records; requires at least four of them.
FitResult fit_exponent(const std::vector<SweepRecord>& records, SweepField field, FitModel model);

/// Fits lip_hdelta ~ C' delta^-q; the result holds exponent q and prefactor C'.
FitResult lipschitz_diagnostics(const std::vector<SweepRecord>& records);

/// Trigonometric polynomials used as test functions: cos and sin of 2 pi k x
/// for k = 1..4, and two mixtures.
std::vector<FourierDensity> trig_test_suite(int modes);

/// ||(L_delta - L_0) f||_{W11} for a Fourier transfer operator.
double derivative_operator_norm(const TransferMatrix& transfer, const NoiseKernel& kernel,
                                double delta, const FourierDensity& f);

struct DecayPoint {
    double delta = 0.0;
    double estimate = 0.0;
};

/// sup over the suite of ||(L_delta - L_0) f||_{W11} / (delta ||f||_{W31}).
std::vector<DecayPoint> derivative_operator_decay(const CircleMap& map, const NoiseKernel& kernel,
                                                  const std::vector<double>& deltas,
                                                  const std::vector<FourierDensity>& suite,
                                                  int modes = 128);

struct SecondDerivativePoint {
    double delta = 0.0;
    double residual = 0.0;  ///< ||(L_delta - L_0) h0 / delta^2 - (sigma^2/2) h0''||_{W11}
    double scaled_norm = 0.0;  ///< ||(L_delta - L_0) h0 / delta^2||_{W11}
};

std::vector<SecondDerivativePoint> second_derivative_check(const CircleMap& map,
                                                           const NoiseKernel& kernel,
                                                           const std::vector<double>& deltas,
                                                           int modes = 128);

/// Ramp approximation of the shift_fold invariant density h0 with slope a.
struct LipschitzBound {
    double bound = 0.0;     ///< 1 / (9 a)
    BinDensity f_a;         ///< exact bin averages
    double distance = 0.0;  ///< ||f_a - h0||_{L1} on the grid
};

/// h0 = 2/3 on [0, 1/2], 4/3 on (1/2, 1]. Requires a > 2/3.
LipschitzBound best_lipschitz_bound(double a, int n = 8192);

/// Exact bin averages of the shift_fold invariant density.
BinDensity shift_fold_density(int n);

struct RefinementCheck {
    bool passed = false;
    double measured = 0.0;
    double threshold = 0.0;
    std::string description;
};

/// Fourier: ||h0(N) - h0(2N)||_{W11} <= 1e-3 delta_min^2.
/// Ulam: ||h(n) - coarse(h(2n))||_{L1} <= 0.05 dist_L1 at delta_min.
RefinementCheck refinement_check(const CircleMap& map, const NoiseKernel& kernel,
                                 double delta_min, const SweepConfig& config);

}  // namespace zeronoise
