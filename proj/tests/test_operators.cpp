#include "zeronoise/errors.hpp"
#include "zeronoise/operators.hpp"
#include "zeronoise/response.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace zeronoise;

TEST(Operators, DoublingUlamTwoBins) {
    const Eigen::MatrixXd m = assemble_ulam(doubling_map(), 2).ulam().dense();
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) EXPECT_NEAR(m(i, j), 0.5, 1e-15);
    }
}

TEST(Operators, UlamFixesConstantUnderDoubling) {
    const BinDensity out = assemble_ulam(doubling_map(), 128).apply(BinDensity::constant(128));
    for (double v : out.values()) EXPECT_NEAR(v, 1.0, 1e-14);
}

TEST(Operators, UlamFixesStepDensity) {
    for (int n : {4, 8, 512}) {
        const BinDensity h = shift_fold_density(n);
        EXPECT_LE(l1_norm(assemble_ulam(shift_fold_map(), n).apply(h) - h), 1e-12) << n;
    }
}

TEST(Operators, UlamColumnsStochastic) {
    const Eigen::MatrixXd m = assemble_ulam(perturbed_doubling_map(0.1), 64).ulam().dense();
    for (Eigen::Index j = 0; j < m.cols(); ++j) EXPECT_NEAR(m.col(j).sum(), 1.0, 1e-13);
    EXPECT_GE(m.minCoeff(), 0.0);
}

TEST(Operators, FourierDoublingShiftsModes) {
    const FourierOperator& f = assemble_fourier(doubling_map(), 8).fourier();
    // Mode 2k goes to mode k; odd modes are annihilated.
    for (int k = -4; k <= 4; ++k) EXPECT_NEAR(std::abs(f.entry(k, 2 * k) - 1.0), 0.0, 1e-12) << k;
    EXPECT_NEAR(std::abs(f.entry(1, 1)), 0.0, 1e-12);
}

TEST(Operators, FourierPreservesMass) {
    const TransferMatrix op = assemble_fourier(perturbed_doubling_map(0.1), 16);
    EXPECT_NEAR(op.apply(FourierDensity::constant(16)).mass(), 1.0, 1e-14);
}

TEST(Operators, FourierDoublingFixesConstant) {
    const FourierDensity out = assemble_fourier(doubling_map(), 16).apply(FourierDensity::constant(16));
    EXPECT_NEAR(out.mass(), 1.0, 1e-14);
    for (int k = 1; k <= 16; ++k) EXPECT_NEAR(std::abs(out.coeff(k)), 0.0, 1e-14);
}

TEST(Operators, FourierRejectsPiecewise) {
    EXPECT_THROW(assemble_fourier(shift_fold_map(), 16), UnsupportedError);
}

TEST(Operators, FourierAliasingDetected) {
    EXPECT_THROW(assemble_fourier(perturbed_doubling_map(0.1), 64, 256), ResolutionError);
}

TEST(Operators, ConvolutionZeroDeltaIsIdentity) {
    const BinDensity h = shift_fold_density(64);
    const BinDensity out = assemble_convolution(uniform_kernel(), 0.0, Backend::ulam, 64).apply(h);
    EXPECT_LE(l1_norm(out - h), 1e-15);
}

TEST(Operators, UniformConvolutionSpectralDiagonal) {
    const double delta = 0.05;
    const FourierOperator& q =
        assemble_convolution(uniform_kernel(), delta, Backend::fourier, 10).fourier();
    for (int k = 1; k <= 10; ++k) {
        const double a = 2.0 * std::numbers::pi * k * delta;
        EXPECT_NEAR(q.entry(k, k).real(), std::sin(a) / a, 1e-12);
        EXPECT_NEAR(std::abs(q.entry(k, k - 1)), 0.0, 1e-15);
    }
}

TEST(Operators, ConvolutionPreservesConstants) {
    for (double delta : {0.01, 0.2}) {
        const BinDensity out =
            assemble_convolution(triangular_kernel(), delta, Backend::ulam, 256).apply(BinDensity::constant(256));
        for (double v : out.values()) EXPECT_NEAR(v, 1.0, 1e-14);
    }
}

TEST(Operators, ComposeWithIdentityIsTransfer) {
    const TransferMatrix lt = assemble_ulam(shift_fold_map(), 64);
    const TransferMatrix ld = compose_noisy(lt, assemble_convolution(uniform_kernel(), 0.0, Backend::ulam, 64));
    EXPECT_LE((ld.ulam().dense() - lt.ulam().dense()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Operators, UnderResolvedFlag) {
    EXPECT_TRUE(assemble_convolution(uniform_kernel(), 1e-4, Backend::ulam, 256).info().under_resolved);
    EXPECT_FALSE(assemble_convolution(uniform_kernel(), 0.1, Backend::ulam, 256).info().under_resolved);
}

TEST(Operators, MixedBackendsRejected) {
    EXPECT_THROW(compose_noisy(assemble_ulam(doubling_map(), 32),
                               assemble_convolution(uniform_kernel(), 0.1, Backend::fourier, 32)),
                 Error);
}
