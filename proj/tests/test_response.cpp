#include "zeronoise/errors.hpp"
#include "zeronoise/response.hpp"
#include "zeronoise/solver.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace zeronoise;

namespace {

SweepConfig fourier(int modes) {
    SweepConfig c;
    c.backend = Backend::fourier;
    c.resolution = modes;
    return c;
}

}  // namespace

TEST(Response, DoublingCoefficientVanishes) {
    const TransferMatrix lt = assemble_fourier(doubling_map(), 32);
    const auto h0 = std::get<FourierDensity>(stationary_density(lt).density);
    const FourierDensity r = quadratic_coefficient(lt, h0, 1.0 / 3.0);
    // Zero up to roundoff amplified by (2 pi N)^2.
    EXPECT_LE(r.coefficients().cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Response, CoefficientNeedsFourier) {
    const TransferMatrix lt = assemble_ulam(doubling_map(), 32);
    EXPECT_THROW(quadratic_coefficient(lt, FourierDensity::constant(8), 1.0), UnsupportedError);
}

TEST(Response, DoublingSweepHasNoDistance) {
    const SweepResult s = zero_noise_sweep(doubling_map(), uniform_kernel(), {0.2, 0.1, 0.05}, fourier(32));
    for (const auto& r : s.records) EXPECT_LE(r.dist_l1, 1e-12);
}

TEST(Response, ResidualDecreasesForPerturbedDoubling) {
    const SweepResult s = zero_noise_sweep(perturbed_doubling_map(0.1), uniform_kernel(),
                                           {0.2, 0.1, 0.05, 0.025}, fourier(128));
    for (std::size_t i = 1; i < s.records.size(); ++i) {
        EXPECT_LT(*s.records[i].response_residual, *s.records[i - 1].response_residual);
    }
}

TEST(Response, SweepRejectsUnorderedDeltas) {
    EXPECT_THROW(zero_noise_sweep(doubling_map(), uniform_kernel(), {0.1, 0.2}, fourier(16)),
                 ValidationError);
    EXPECT_THROW(zero_noise_sweep(doubling_map(), uniform_kernel(), {0.5, 0.1}, fourier(16)),
                 ValidationError);
}

TEST(Response, SweepIsDeterministic) {
    SweepConfig c = fourier(64);
    c.threads = 3;
    const auto a = zero_noise_sweep(perturbed_doubling_map(0.1), triangular_kernel(), {0.2, 0.1, 0.05}, c);
    const auto b = zero_noise_sweep(perturbed_doubling_map(0.1), triangular_kernel(), {0.2, 0.1, 0.05}, c);
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        EXPECT_EQ(a.records[i].dist_l1, b.records[i].dist_l1);
        EXPECT_EQ(*a.records[i].dist_w11, *b.records[i].dist_w11);
    }
}

TEST(Response, GeometricDeltas) {
    const auto d = geometric_deltas(0.2, 3);
    ASSERT_EQ(d.size(), 3u);
    EXPECT_DOUBLE_EQ(d[0], 0.2);
    EXPECT_DOUBLE_EQ(d[2], 0.05);
}

TEST(Response, PowerFitExact) {
    const auto d = geometric_deltas(0.2, 6);
    std::vector<double> v;
    for (double x : d) v.push_back(x * x);
    const FitResult f = fit_values(d, v, FitModel::power);
    EXPECT_NEAR(f.exponent, 2.0, 1e-12);
    EXPECT_NEAR(f.prefactor, 1.0, 1e-12);
    EXPECT_NEAR(f.r_squared, 1.0, 1e-12);
}

TEST(Response, PowerLogFitExact) {
    const auto d = geometric_deltas(0.1, 6);
    std::vector<double> v;
    for (double x : d) v.push_back(3.0 * x * std::abs(std::log(x)));
    const FitResult f = fit_values(d, v, FitModel::power_log);
    EXPECT_NEAR(f.exponent, 1.0, 1e-12);
    EXPECT_NEAR(f.prefactor, 3.0, 1e-12);
    EXPECT_NEAR(f.r_squared, 1.0, 1e-12);
}

TEST(Response, LipschitzFitExact) {
    std::vector<SweepRecord> records;
    for (double x : geometric_deltas(0.1, 6)) {
        SweepRecord r;
        r.delta = x;
        r.lip_hdelta = 5.0 / x;
        records.push_back(r);
    }
    const FitResult f = lipschitz_diagnostics(records);
    EXPECT_NEAR(f.exponent, 1.0, 1e-12);
    EXPECT_NEAR(f.prefactor, 5.0, 1e-12);
}

TEST(Response, FitNeedsFourRecords) {
    std::vector<SweepRecord> records(3);
    for (int i = 0; i < 3; ++i) {
        records[static_cast<std::size_t>(i)].delta = 0.1 / (1 << i);
        records[static_cast<std::size_t>(i)].dist_l1 = 1.0;
    }
    EXPECT_THROW(fit_exponent(records, SweepField::dist_l1, FitModel::power), ValidationError);
}

TEST(Response, DerivativeNormOfConstantIsZero) {
    const TransferMatrix lt = assemble_fourier(doubling_map(), 32);
    // Zero up to roundoff amplified by the W11 weight 2 pi N.
    EXPECT_LE(derivative_operator_norm(lt, uniform_kernel(), 0.1, FourierDensity::constant(32)), 1e-11);
}

TEST(Response, DerivativeNormClosedForm) {
    // Doubling sends cos(4 pi x) to cos(2 pi x).
    const double delta = 0.05;
    const TransferMatrix lt = assemble_fourier(doubling_map(), 32);
    const FourierDensity f = FourierDensity::from_function(
        32, [](double x) { return std::cos(4 * std::numbers::pi * x); });
    const double a = 2 * std::numbers::pi * delta;
    const double expected = std::abs(std::sin(a) / a - 1.0) * (2.0 / std::numbers::pi + 4.0);
    EXPECT_NEAR(derivative_operator_norm(lt, uniform_kernel(), delta, f), expected, 1e-8);
}

TEST(Response, TrigSuiteNormalized) {
    const auto suite = trig_test_suite(64);
    EXPECT_EQ(suite.size(), 10u);
    for (const auto& f : suite) EXPECT_NEAR(sobolev_norm(f, 3), 1.0, 1e-9);
}

TEST(Response, DoublingSecondDerivativeVanishes) {
    for (const auto& p : second_derivative_check(doubling_map(), uniform_kernel(), {0.1, 0.05}, 32)) {
        EXPECT_LE(p.residual, 1e-8);  // roundoff over delta^2 and 2 pi N
    }
}

TEST(Response, SecondDerivativeLimitScalesWithVariance) {
    const std::vector<double> d{0.01};
    const auto tri = second_derivative_check(perturbed_doubling_map(0.1), triangular_kernel(), d, 128);
    const auto uni = second_derivative_check(perturbed_doubling_map(0.1), uniform_kernel(), d, 128);
    EXPECT_NEAR(tri[0].scaled_norm / uni[0].scaled_norm, 0.5, 0.025);
}

TEST(Response, BestLipschitzBound) {
    const LipschitzBound b = best_lipschitz_bound(3.0);
    EXPECT_NEAR(b.bound, 1.0 / 27.0, 1e-15);
    EXPECT_NEAR(b.distance, 1.0 / 27.0, 1e-6);
    EXPECT_LT(best_lipschitz_bound(1000.0).bound, 1e-3);
    EXPECT_THROW(best_lipschitz_bound(0.5), UnsupportedError);
}
