#include "zeronoise/density.hpp"
#include "zeronoise/response.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace zeronoise;

TEST(Density, ConstantNorms) {
    const Norms b = norms(BinDensity::constant(64));
    EXPECT_NEAR(b.l1, 1.0, 1e-15);
    EXPECT_NEAR(b.w11, 1.0, 1e-15);
    EXPECT_NEAR(b.bv, 0.0, 1e-15);
    EXPECT_NEAR(b.lip, 0.0, 1e-15);
    const Norms f = norms(FourierDensity::constant(8));
    EXPECT_NEAR(f.l1, 1.0, 1e-14);
    EXPECT_NEAR(f.w11, 1.0, 1e-14);
    EXPECT_NEAR(f.bv, 0.0, 1e-14);
}

TEST(Density, SineNormsSpectral) {
    const FourierDensity s =
        FourierDensity::from_function(16, [](double x) { return std::sin(2 * std::numbers::pi * x); });
    EXPECT_NEAR(l1_norm(s), 2.0 / std::numbers::pi, 1e-9);
    EXPECT_NEAR(sobolev_norm(s, 1), 2.0 / std::numbers::pi + 4.0, 1e-9);
}

TEST(Density, StepDensityNorms) {
    const BinDensity h = shift_fold_density(1024);
    EXPECT_NEAR(l1_norm(h), 1.0, 1e-14);
    EXPECT_NEAR(variation(h), 4.0 / 3.0, 1e-14);
}

TEST(Density, BinFourierRoundTripKeepsMass) {
    const BinDensity h = shift_fold_density(256);
    const FourierDensity f = to_fourier(h, 32);
    EXPECT_NEAR(f.mass(), 1.0, 1e-14);
    EXPECT_NEAR(to_bins(f, 256).mass(), 1.0, 1e-14);
}

TEST(Density, CoarseGrainAverages) {
    const BinDensity g(std::vector<double>{1.0, 3.0, 0.5, 1.5});
    const BinDensity c = coarse_grain(g, 2);
    EXPECT_DOUBLE_EQ(c[0], 2.0);
    EXPECT_DOUBLE_EQ(c[1], 1.0);
}
