#include "zeronoise/abstract_response.hpp"
#include "zeronoise/errors.hpp"
#include "zeronoise/solver.hpp"

#include <gtest/gtest.h>

#include <filesystem>

using namespace zeronoise;

namespace {

Eigen::MatrixXd two_state(double a, double b) {
    Eigen::MatrixXd l(2, 2);
    l << 1 - a, b,
         a, 1 - b;
    return l;
}

}  // namespace

TEST(AbstractResponse, TwoStateStationary) {
    const double a = 0.3;
    const double b = 0.1;
    const Eigen::VectorXd h = stationary_vector(two_state(a, b));
    EXPECT_NEAR(h(0), b / (a + b), 1e-14);
    EXPECT_NEAR(h(1), a / (a + b), 1e-14);
}

TEST(AbstractResponse, ZeroPerturbationHasNoDeviation) {
    const MarkovFamily f = make_family(two_state(0.3, 0.1), Eigen::MatrixXd::Zero(2, 2),
                                       Eigen::MatrixXd::Zero(2, 2), 0.1);
    for (const auto& p : verify_linear_response(f, {1e-2, 1e-3}).points) EXPECT_LE(p.deviation, 1e-13);
    for (const auto& p : verify_quadratic_response(f, {1e-2, 1e-3}).points) EXPECT_LE(p.deviation, 1e-10);
}

TEST(AbstractResponse, PureSecondOrderFamily) {
    Eigen::MatrixXd b(2, 2);
    b << -1.0, 1.0,
         1.0, -1.0;
    const MarkovFamily f = make_family(two_state(0.3, 0.1), Eigen::MatrixXd::Zero(2, 2), b, 0.05);
    const ResponseCheck q = verify_quadratic_response(f, {1e-2, 1e-3, 1e-4});
    const Eigen::VectorXd expected = markov_resolvent(f.L0, f.B * q.h0);
    EXPECT_LE((q.term - expected).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT(q.points.back().deviation, q.points.front().deviation);
}

TEST(AbstractResponse, RejectsNonStochastic) {
    Eigen::MatrixXd l = two_state(0.3, 0.1);
    l(0, 0) += 0.1;
    EXPECT_THROW(make_family(l, Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Zero(2, 2), 0.1),
                 ValidationError);
}

TEST(AbstractResponse, RejectsNonSimpleEigenvalue) {
    EXPECT_THROW(make_family(Eigen::MatrixXd::Identity(2, 2), Eigen::MatrixXd::Zero(2, 2),
                             Eigen::MatrixXd::Zero(2, 2), 0.1),
                 UnsupportedError);
}

TEST(AbstractResponse, RandomFamilyIsValidAndSeeded) {
    const MarkovFamily a = random_markov_family(6, 11);
    const MarkovFamily b = random_markov_family(6, 11);
    EXPECT_EQ((a.L0 - b.L0).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_GE(a.at(a.delta_max).minCoeff(), 0.0);
}

TEST(AbstractResponse, CsvRoundTrip) {
    const MarkovFamily a = random_markov_family(4, 3);
    const auto path = std::filesystem::temp_directory_path() / "zn_family_roundtrip.csv";
    save_family_csv(a, path);
    const MarkovFamily b = load_family_csv(path);
    EXPECT_EQ((a.L0 - b.L0).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ((a.A - b.A).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ((a.B - b.B).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(a.delta_max, b.delta_max);
    std::filesystem::remove(path);
}
