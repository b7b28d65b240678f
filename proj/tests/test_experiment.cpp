#include "zeronoise/errors.hpp"
#include "zeronoise/experiment.hpp"

#include <gtest/gtest.h>

using namespace zeronoise;

TEST(Config, ParsesSections) {
    const ExperimentConfig c = parse_config_text(
        "# comment\n[map]\nname = shift_fold\n[sweep]\nbackend = ulam\nresolution = 512\n"
        "deltas = 0.1, 0.05\n[montecarlo]\nseed = 9\n");
    EXPECT_EQ(c.map.name, "shift_fold");
    EXPECT_EQ(effective_backend(c), Backend::ulam);
    EXPECT_EQ(effective_resolution(c), 512);
    EXPECT_EQ(c.deltas, (std::vector<double>{0.1, 0.05}));
    EXPECT_EQ(c.montecarlo.seed, 9u);
    EXPECT_EQ(effective_mode(c), RunMode::piecewise);
}

TEST(Config, SmoothDefaults) {
    const ExperimentConfig c = parse_config_text("[map]\nname = perturbed_doubling\nepsilon = 0.1\n");
    EXPECT_EQ(effective_mode(c), RunMode::smooth);
    EXPECT_EQ(effective_backend(c), Backend::fourier);
    EXPECT_EQ(effective_resolution(c), 128);
    EXPECT_EQ(effective_deltas(c).size(), 7u);
}

TEST(Config, ReportsLineOfBadValue) {
    try {
        parse_config_text("[sweep]\n\nresolution = many\n");
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.line(), 3);
    }
}

TEST(Config, UnknownKeyIsError) {
    EXPECT_THROW(parse_config_text("[map]\ncolour = red\n"), ConfigError);
}

TEST(Config, UnknownSectionIsError) {
    EXPECT_THROW(parse_config_text("[plot]\n"), ConfigError);
}
