#pragma once

#include "zeronoise/abstract_response.hpp"
#include "zeronoise/circle_map.hpp"
#include "zeronoise/montecarlo.hpp"
#include "zeronoise/noise_kernel.hpp"
#include "zeronoise/operators.hpp"
#include "zeronoise/response.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace zeronoise {

struct MapSettings {
    std::string name = "perturbed_doubling";
    double epsilon = 0.1;
    std::string expression;                                 ///< smooth lift, overrides name
    std::vector<std::pair<double, std::string>> branches;  ///< piecewise, overrides name
};

struct KernelSettings {
    std::string name = "uniform";
    std::string table;  ///< CSV of (z, rho), overrides name
};

enum class RunMode { smooth, piecewise, abstract };

std::string to_string(RunMode mode);

struct ExperimentConfig {
    MapSettings map;
    KernelSettings kernel;
    std::optional<RunMode> mode;  ///< inferred from the map when absent
    std::optional<Backend> backend;
    std::optional<int> resolution;
    std::vector<double> deltas;  ///< empty: mode default
    std::string compare_kernel;
    double tol = 1e-13;
    int max_iter = 100000;

    SimulationConfig montecarlo;
    double montecarlo_delta = 0.05;

    std::string family = "random";  ///< "random" or a CSV path
    int family_dimension = 6;
    std::uint64_t family_seed = 20240611;
    double family_delta_max = 0.05;
    std::vector<double> abstract_deltas{1e-2, 1e-3, 1e-4};

    std::filesystem::path output_dir = "out";
    int threads = 1;
    std::filesystem::path base_dir;  ///< relative paths resolve against this
};

/// Line-oriented key = value text with [map], [kernel], [sweep], [solver],
/// [montecarlo], [abstract] and [output] sections. Throws ConfigError.
ExperimentConfig parse_config(const std::filesystem::path& path);
ExperimentConfig parse_config_text(const std::string& text,
                                   const std::filesystem::path& base_dir = {});

CircleMap build_map(const MapSettings& settings);
NoiseKernel build_kernel(const KernelSettings& settings, const std::filesystem::path& base_dir = {});
RunMode effective_mode(const ExperimentConfig& config);
Backend effective_backend(const ExperimentConfig& config);
int effective_resolution(const ExperimentConfig& config);
std::vector<double> effective_deltas(const ExperimentConfig& config);
SweepConfig sweep_config(const ExperimentConfig& config);
MarkovFamily build_family(const ExperimentConfig& config);

struct Check {
    std::string id;
    std::string description;
    bool passed = false;
    std::string measured;
};

struct RunOutcome {
    std::vector<Check> checks;
    std::vector<std::string> info;
    bool all_passed() const;
};

/// Full experiment for the configured mode: writes sweep.csv, fits.txt,
/// densities/*.csv and report.txt under out_dir.
RunOutcome run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir);

/// Single stationary density at delta (0 for the deterministic map).
RunOutcome run_stationary(const ExperimentConfig& config, double delta,
                          const std::filesystem::path& out_dir);
/// Sweep and fits only.
RunOutcome run_sweep(const ExperimentConfig& config, const std::filesystem::path& out_dir);
/// Coefficient R and residuals of the quadratic expansion.
RunOutcome run_response(const ExperimentConfig& config, const std::filesystem::path& out_dir);
RunOutcome run_montecarlo(const ExperimentConfig& config, const std::filesystem::path& out_dir);
RunOutcome run_abstract(const ExperimentConfig& config, const std::filesystem::path& out_dir);
/// Re-fits an existing sweep CSV.
RunOutcome run_fit(const std::filesystem::path& sweep_csv, const std::filesystem::path& out_dir);

void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRecord>& records);
std::vector<SweepRecord> read_sweep_csv(const std::filesystem::path& path);
std::string format_fit(const std::string& name, const FitResult& fit);
void write_report(const std::filesystem::path& path, const std::string& title,
                  const RunOutcome& outcome);

}  // namespace zeronoise
