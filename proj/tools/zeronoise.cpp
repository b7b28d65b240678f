#include "zeronoise/errors.hpp"
#include "zeronoise/experiment.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <filesystem>
#include <fstream>
#include <iostream>

using namespace zeronoise;

namespace {

struct Options {
    std::string config;
    std::string out;
    int threads = 0;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string backend;
    int resolution = 0;
    double delta = 0.0;
    std::string input;
};

ExperimentConfig load(const Options& o) {
    ExperimentConfig cfg = o.config.empty() ? ExperimentConfig{} : parse_config(o.config);
    if (o.threads > 0) cfg.threads = o.threads;
    if (o.seed_set) {
        cfg.montecarlo.seed = o.seed;
        cfg.family_seed = o.seed;
    }
    if (!o.backend.empty()) cfg.backend = backend_from_string(o.backend);
    if (o.resolution > 0) cfg.resolution = o.resolution;
    return cfg;
}

std::filesystem::path out_dir(const Options& o, const ExperimentConfig& cfg) {
    if (!o.out.empty()) return o.out;
    return cfg.output_dir;
}

int finish(const RunOutcome& outcome, const std::filesystem::path& dir) {
    std::ifstream report(dir / "report.txt");
    std::cout << report.rdbuf();
    return outcome.all_passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"zero-noise limits of expanding circle maps"};
    app.require_subcommand(1);
    Options o;

    auto add_common = [&](CLI::App* sub, bool needs_config) {
        auto* opt = sub->add_option("--config", o.config, "experiment config file");
        if (needs_config) opt->required();
        sub->add_option("--out", o.out, "output directory");
        sub->add_option("--threads", o.threads, "worker threads");
        sub->add_option("--seed", o.seed, "random seed")->each([&](const std::string&) {
            o.seed_set = true;
        });
        sub->add_option("--backend", o.backend, "ulam or fourier")
            ->check(CLI::IsMember({"ulam", "fourier"}));
        sub->add_option("--resolution", o.resolution, "bins (ulam) or modes (fourier)");
    };

    auto* run = app.add_subcommand("run", "full experiment with report");
    add_common(run, true);
    auto* stationary = app.add_subcommand("stationary", "one stationary density");
    add_common(stationary, false);
    stationary->add_option("--delta", o.delta, "noise amplitude (0 = no noise)");
    auto* sweep = app.add_subcommand("sweep", "zero-noise sweep and fits");
    add_common(sweep, true);
    auto* response = app.add_subcommand("response", "quadratic response coefficient");
    add_common(response, false);
    auto* montecarlo = app.add_subcommand("montecarlo", "path simulation histogram");
    add_common(montecarlo, false);
    auto* abstract = app.add_subcommand("abstract", "finite Markov family checks");
    add_common(abstract, false);
    auto* fit = app.add_subcommand("fit", "re-fit an existing sweep.csv");
    fit->add_option("--input", o.input, "sweep.csv")->required()->check(CLI::ExistingFile);
    fit->add_option("--out", o.out, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (fit->parsed()) {
            const std::filesystem::path dir = o.out.empty() ? std::filesystem::path("out") : std::filesystem::path(o.out);
            return finish(run_fit(o.input, dir), dir);
        }
        const ExperimentConfig cfg = load(o);
        const std::filesystem::path dir = out_dir(o, cfg);
        if (run->parsed()) return finish(run_experiment(cfg, dir), dir);
        if (stationary->parsed()) return finish(run_stationary(cfg, o.delta, dir), dir);
        if (sweep->parsed()) return finish(run_sweep(cfg, dir), dir);
        if (response->parsed()) return finish(run_response(cfg, dir), dir);
        if (montecarlo->parsed()) return finish(run_montecarlo(cfg, dir), dir);
        if (abstract->parsed()) return finish(run_abstract(cfg, dir), dir);
    } catch (const ConfigError& e) {
        std::cerr << fmt::format("config error: {}\n", e.what());
        return 2;
    } catch (const Error& e) {
        std::cerr << fmt::format("error: {}\n", e.what());
        return 3;
    }
    return 0;
}
