#include "zeronoise/circle_map.hpp"

#include <gtest/gtest.h>

using namespace zeronoise;

TEST(CircleMap, Evaluate) {
    EXPECT_NEAR(doubling_map()(0.3), 0.6, 1e-15);
    EXPECT_NEAR(shift_fold_map()(0.25), 0.75, 1e-15);
    EXPECT_NEAR(shift_fold_map()(0.75), 0.5, 1e-15);
}

TEST(CircleMap, DoublingPreimages) {
    const auto p = doubling_map().branch_preimages(0.5).points;
    ASSERT_EQ(p.size(), 2u);
    EXPECT_NEAR(p[0].x, 0.25, 1e-14);
    EXPECT_NEAR(p[1].x, 0.75, 1e-14);
    EXPECT_NEAR(p[0].abs_derivative, 2.0, 1e-12);
}

TEST(CircleMap, ShiftFoldPreimages) {
    const CircleMap t = shift_fold_map();
    const auto a = t.branch_preimages(0.25).points;
    ASSERT_EQ(a.size(), 1u);
    EXPECT_NEAR(a[0].x, 0.875, 1e-14);
    EXPECT_NEAR(a[0].abs_derivative, 2.0, 1e-14);
    const auto b = t.branch_preimages(0.75).points;
    ASSERT_EQ(b.size(), 2u);
    EXPECT_NEAR(b[0].x, 0.25, 1e-14);
    EXPECT_NEAR(b[0].abs_derivative, 1.0, 1e-14);
    EXPECT_NEAR(b[1].x, 0.625, 1e-14);
    EXPECT_NEAR(b[1].abs_derivative, 2.0, 1e-14);
}

TEST(CircleMap, ExpansionConstants) {
    EXPECT_NEAR(expansion_constant(doubling_map(), 1).value, 2.0, 1e-9);
    EXPECT_NEAR(expansion_constant(shift_fold_map(), 1).value, 1.0, 1e-9);
    EXPECT_NEAR(expansion_constant(shift_fold_map(), 2).value, 2.0, 1e-9);
}

TEST(CircleMap, PeriodicTurningPoint) {
    const TurningPointReport r = has_periodic_turning_point(shift_fold_map(), 6);
    ASSERT_TRUE(r.found);
    ASSERT_EQ(r.orbit.size(), 4u);
    EXPECT_NEAR(r.orbit[0], 0.5, 1e-14);
    EXPECT_NEAR(r.orbit[1], 1.0, 1e-14);
    EXPECT_NEAR(r.orbit[2], 0.0, 1e-14);
    EXPECT_NEAR(r.orbit[3], 0.5, 1e-14);
    EXPECT_FALSE(has_periodic_turning_point(doubling_map(), 6).found);
}

TEST(CircleMap, TransferOfConstantUnderDoubling) {
    for (double y : {0.1, 0.37, 0.9}) {
        EXPECT_NEAR(transfer_pointwise(doubling_map(), [](double) { return 1.0; }, y), 1.0, 1e-14);
    }
}
