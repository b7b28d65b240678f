#include "zeronoise/montecarlo.hpp"

#include <gtest/gtest.h>

using namespace zeronoise;

// Known-answer vectors of the reference Philox4x32-10 implementation.
TEST(MonteCarlo, PhiloxKnownAnswers) {
    EXPECT_EQ(Philox::block({0u, 0u, 0u, 0u}, {0u, 0u}),
              (Philox::Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
    EXPECT_EQ(Philox::block({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                            {0xffffffffu, 0xffffffffu}),
              (Philox::Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
    EXPECT_EQ(Philox::block({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                            {0xa4093822u, 0x299f31d0u}),
              (Philox::Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(MonteCarlo, UniformsInUnitInterval) {
    PhiloxStream s(5, 2);
    for (int i = 0; i < 10000; ++i) {
        const double u = s.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
    }
}

TEST(MonteCarlo, UniformKernelQuantiles) {
    const KernelSampler k(uniform_kernel());
    EXPECT_NEAR(k.quantile(0.5), 0.0, 1e-12);
    EXPECT_NEAR(k.quantile(0.25), -0.5, 1e-12);
    EXPECT_NEAR(k.quantile(0.0), -1.0, 1e-12);
}

TEST(MonteCarlo, SameSeedSameHistogramAnyThreads) {
    SimulationConfig c;
    c.n_steps = 20000;
    c.n_chains = 4;
    c.bins = 32;
    c.seed = 42;
    const BinDensity a = simulate_histogram(shift_fold_map(), uniform_kernel(), 0.05, c);
    c.threads = 4;
    const BinDensity b = simulate_histogram(shift_fold_map(), uniform_kernel(), 0.05, c);
    for (int i = 0; i < a.size(); ++i) EXPECT_EQ(a[i], b[i]);
}

TEST(MonteCarlo, DoublingHistogramIsFlat) {
    SimulationConfig c;
    c.n_steps = 1000000 + c.burn_in;
    c.n_chains = 10;
    c.bins = 64;
    c.threads = 4;
    const BinDensity h = simulate_histogram(doubling_map(), uniform_kernel(), 0.05, c);
    EXPECT_NEAR(h.mass(), 1.0, 1e-12);
    EXPECT_LE(l1_norm(h - BinDensity::constant(64)), 0.01);
}
