#include "zeronoise/errors.hpp"
#include "zeronoise/noise_kernel.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace zeronoise;

TEST(NoiseKernel, SecondMoments) {
    EXPECT_NEAR(moments(uniform_kernel()).sigma2, 1.0 / 3.0, 1e-14);
    EXPECT_NEAR(moments(triangular_kernel()).sigma2, 1.0 / 6.0, 1e-14);
    EXPECT_NEAR(moments(epanechnikov_kernel()).sigma2, 1.0 / 5.0, 1e-14);
}

TEST(NoiseKernel, BuiltinsHaveUnitMassZeroMean) {
    for (const auto& name : builtin_kernel_names()) {
        const KernelMoments m = moments(kernel_by_name(name));
        EXPECT_NEAR(m.mass, 1.0, 1e-13) << name;
        EXPECT_NEAR(m.mean, 0.0, 1e-13) << name;
    }
}

TEST(NoiseKernel, RescaleAtOrigin) {
    EXPECT_NEAR(rescale(uniform_kernel(), 0.5)(0.0), 1.0, 1e-15);
    EXPECT_NEAR(rescale(triangular_kernel(), 0.1)(0.0), 10.0, 1e-12);
}

TEST(NoiseKernel, TotalVariation) {
    EXPECT_NEAR(total_variation(uniform_kernel(), 4096), 1.0, 1e-12);
    EXPECT_NEAR(total_variation(triangular_kernel(), 4096), 2.0, 1e-12);
}

TEST(NoiseKernel, VariationStableUnderRefinement) {
    const NoiseKernel k = tabulated_kernel("spike", {-0.01, 0.0, 0.01}, {0.0, 100.0, 0.0});
    const double a = total_variation(k, 2048);
    const double b = total_variation(k, 4096);
    EXPECT_LT(std::abs(a - b) / b, 1e-3);
}

TEST(NoiseKernel, UniformMultiplierClosedForm) {
    const double delta = 0.07;
    const int kmax = 12;
    const auto m = fourier_multiplier(uniform_kernel(), delta, kmax);
    ASSERT_EQ(m.size(), static_cast<std::size_t>(2 * kmax + 1));
    EXPECT_NEAR(std::abs(m[kmax] - 1.0), 0.0, 1e-14);
    for (int k = 1; k <= kmax; ++k) {
        const double a = 2.0 * std::numbers::pi * k * delta;
        EXPECT_NEAR(m[static_cast<std::size_t>(kmax + k)].real(), std::sin(a) / a, 1e-12) << k;
        EXPECT_NEAR(m[static_cast<std::size_t>(kmax - k)].real(), std::sin(a) / a, 1e-12) << k;
    }
}

TEST(NoiseKernel, ZeroDeltaMultiplierIsOne) {
    for (const auto& name : builtin_kernel_names()) {
        for (const auto& v : fourier_multiplier(kernel_by_name(name), 0.0, 5)) {
            EXPECT_NEAR(std::abs(v - 1.0), 0.0, 1e-15) << name;
        }
    }
}

TEST(NoiseKernel, RejectsNonzeroMean) {
    EXPECT_THROW(tabulated_kernel("shifted", {0.0, 0.5, 1.0}, {0.0, 2.0, 2.0}), ValidationError);
}
