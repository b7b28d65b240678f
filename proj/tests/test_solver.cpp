#include "zeronoise/errors.hpp"
#include "zeronoise/operators.hpp"
#include "zeronoise/response.hpp"
#include "zeronoise/solver.hpp"

#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <random>

using namespace zeronoise;

TEST(Solver, DoublingStationaryIsConstant) {
    for (double delta : {0.0, 0.05}) {
        const auto r = stationary_density(
            assemble_noisy(doubling_map(), uniform_kernel(), delta, Backend::ulam, 256));
        for (double v : std::get<BinDensity>(r.density).values()) EXPECT_NEAR(v, 1.0, 1e-12);
    }
}

TEST(Solver, StepDensityWithoutNoise) {
    const auto r = stationary_density(assemble_ulam(shift_fold_map(), 64));
    EXPECT_LE(l1_norm(std::get<BinDensity>(r.density) - shift_fold_density(64)), 1e-12);
}

TEST(Solver, ThreeStateStationaryVector) {
    Eigen::Matrix3d p;
    p << 0.5, 0.2, 0.3,
         0.3, 0.6, 0.3,
         0.2, 0.2, 0.4;
    Eigen::Matrix3d a = p - Eigen::Matrix3d::Identity();
    a.row(2).setOnes();
    const Eigen::Vector3d expected = a.fullPivLu().solve(Eigen::Vector3d(0.0, 0.0, 1.0));
    const Eigen::VectorXd h = stationary_vector(p);
    EXPECT_LE((h - expected).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Solver, ResolventMatchesNeumannSeries) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.1, 1.0);
    Eigen::MatrixXd p(5, 5);
    for (int i = 0; i < 5; ++i) {
        for (int j = 0; j < 5; ++j) p(i, j) = u(rng);
    }
    for (int j = 0; j < 5; ++j) p.col(j) /= p.col(j).sum();
    Eigen::VectorXd g(5);
    for (int i = 0; i < 5; ++i) g(i) = u(rng);
    g.array() -= g.mean();
    Eigen::VectorXd term = g;
    Eigen::VectorXd series = Eigen::VectorXd::Zero(5);
    for (int i = 0; i <= 200; ++i) {
        series += term;
        term = p * term;
    }
    EXPECT_LE((markov_resolvent(p, g) - series).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Solver, ResolventOfZeroIsZero) {
    const auto r = resolvent_apply(assemble_ulam(shift_fold_map(), 32), BinDensity(std::vector<double>(32, 0.0)));
    for (double v : std::get<BinDensity>(r.solution).values()) EXPECT_EQ(v, 0.0);
}

TEST(Solver, DoublingResolventOfFirstMode) {
    const FourierDensity g = FourierDensity::from_function(
        16, [](double x) { return std::cos(2 * std::numbers::pi * x); });
    const auto r = resolvent_apply(assemble_fourier(doubling_map(), 16), g);
    const FourierDensity& s = std::get<FourierDensity>(r.solution);
    EXPECT_LE((s.coefficients() - g.coefficients()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Solver, ResolventRejectsMass) {
    EXPECT_THROW(resolvent_apply(assemble_ulam(doubling_map(), 16), BinDensity::constant(16)),
                 ValidationError);
}

TEST(Solver, DoublingEquilibriumRate) {
    EXPECT_LE(equilibrium_rate(assemble_fourier(doubling_map(), 64)).rate, 0.5 + 1e-9);
}

TEST(Solver, UlamDoublingRateApproachesHalf) {
    double previous = 1.0;
    for (int n : {256, 1024, 4096}) {
        const double gap = std::abs(equilibrium_rate(assemble_ulam(doubling_map(), n)).rate - 0.5);
        EXPECT_LT(gap, previous) << n;
        previous = gap;
    }
}

TEST(Solver, IdentityHasNoDecay) {
    const EquilibriumRate r = equilibrium_rate(identity_operator(Backend::ulam, 64));
    EXPECT_NEAR(r.rate, 1.0, 1e-12);
    EXPECT_FALSE(r.diagnostic.empty());
}

TEST(Solver, NoisyStepMapMixes) {
    const EquilibriumRate r =
        equilibrium_rate(assemble_noisy(shift_fold_map(), uniform_kernel(), 0.1, Backend::ulam, 512));
    EXPECT_LT(r.rate, 1.0);
}

TEST(Solver, ToleranceFloor) {
    EXPECT_THROW(stationary_density(assemble_ulam(doubling_map(), 16), 1e-15), ValidationError);
}
