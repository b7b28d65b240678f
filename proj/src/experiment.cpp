#include "zeronoise/experiment.hpp"

#include "zeronoise/csv.hpp"
#include "zeronoise/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace zeronoise {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& value, int line) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (trim(value.substr(used)).empty()) return v;
    } catch (const std::logic_error&) {
    }
    throw ConfigError(line, fmt::format("'{}' is not a number", value));
}

long parse_long(const std::string& value, int line) {
    try {
        std::size_t used = 0;
        const long v = std::stol(value, &used);
        if (trim(value.substr(used)).empty()) return v;
    } catch (const std::logic_error&) {
    }
    // Accept integral values written like 1e7.
    const double d = parse_double(value, line);
    if (d == std::floor(d) && std::abs(d) < 9e15) return static_cast<long>(d);
    throw ConfigError(line, fmt::format("'{}' is not an integer", value));
}

std::uint64_t parse_u64(const std::string& value, int line) {
    try {
        std::size_t used = 0;
        const unsigned long long v = std::stoull(value, &used);
        if (trim(value.substr(used)).empty()) return v;
    } catch (const std::logic_error&) {
    }
    throw ConfigError(line, fmt::format("'{}' is not an unsigned integer", value));
}

std::vector<double> parse_list(const std::string& value, int line) {
    std::vector<double> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(parse_double(item, line));
    }
    if (out.empty()) throw ConfigError(line, "empty list");
    return out;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    const std::filesystem::path path(p);
    if (path.is_absolute() || base.empty()) return path;
    return base / path;
}

std::string fmtv(double v) { return fmt::format("{:.6g}", v); }

Check make_check(std::string id, std::string description, bool passed, std::string measured) {
    return Check{std::move(id), std::move(description), passed, std::move(measured)};
}

std::string optional_number(const std::optional<double>& v) {
    return v ? format_number(*v) : std::string();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw Error(fmt::format("cannot write {}", path.string()));
    out << text;
}

void write_densities(const std::filesystem::path& out_dir, const SweepResult& sweep) {
    write_density_csv(out_dir / "densities" / "h0.csv", sweep.h0);
    for (std::size_t i = 0; i < sweep.densities.size(); ++i) {
        write_density_csv(out_dir / "densities" / fmt::format("h_delta_{}.csv", i),
                          sweep.densities[i]);
    }
    if (sweep.coefficient) write_density_csv(out_dir / "densities" / "R.csv", *sweep.coefficient);
}

struct SweepOutput {
    SweepResult sweep;
    std::vector<std::pair<std::string, FitResult>> fits;
};

SweepOutput sweep_and_fit(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                          RunOutcome& outcome) {
    const CircleMap map = build_map(config.map);
    const NoiseKernel kernel = build_kernel(config.kernel, config.base_dir);
    SweepConfig sc = sweep_config(config);
    sc.keep_densities = true;
    const auto deltas = effective_deltas(config);

    const RefinementCheck refine = refinement_check(map, kernel, deltas.back(), sc);
    outcome.checks.push_back(make_check(
        "resolution_self_check", refine.description, refine.passed,
        fmt::format("{} (threshold {})", fmtv(refine.measured), fmtv(refine.threshold))));

    SweepOutput out{zero_noise_sweep(map, kernel, deltas, sc), {}};
    write_sweep_csv(out_dir / "sweep.csv", out.sweep.records);
    write_densities(out_dir, out.sweep);

    const bool smooth = map.kind() == MapKind::smooth;
    auto try_fit = [&](const std::string& name, SweepField field, FitModel model) {
        try {
            out.fits.emplace_back(name, fit_exponent(out.sweep.records, field, model));
        } catch (const ValidationError& e) {
            outcome.info.push_back(fmt::format("fit {} skipped: {}", name, e.what()));
        }
    };
    if (smooth) try_fit("dist_W11", SweepField::dist_w11, FitModel::power);
    try_fit("dist_L1", SweepField::dist_l1, FitModel::power);
    if (!smooth) {
        try_fit("dist_L1_power_log", SweepField::dist_l1, FitModel::power_log);
        try {
            out.fits.emplace_back("lip_hdelta", lipschitz_diagnostics(out.sweep.records));
        } catch (const ValidationError& e) {
            outcome.info.push_back(fmt::format("fit lip_hdelta skipped: {}", e.what()));
        }
    }
    std::string text;
    for (const auto& [name, fit] : out.fits) text += format_fit(name, fit) + "\n";
    write_text(out_dir / "fits.txt", text);
    return out;
}

const FitResult* find_fit(const SweepOutput& out, const std::string& name) {
    for (const auto& [n, f] : out.fits) {
        if (n == name) return &f;
    }
    return nullptr;
}

void smooth_checks(const ExperimentConfig& config, const SweepOutput& out, RunOutcome& outcome) {
    const auto& recs = out.sweep.records;
    if (const FitResult* f = find_fit(out, "dist_W11")) {
        outcome.checks.push_back(make_check(
            "quadratic_speed", "exponent of ||h_delta - h0||_W11 in [1.85, 2.15] with r^2 >= 0.99",
            f->exponent >= 1.85 && f->exponent <= 2.15 && f->r_squared >= 0.99,
            fmt::format("exponent {} r^2 {}", fmtv(f->exponent), fmtv(f->r_squared))));
        outcome.checks.push_back(make_check("no_linear_term", "exponent of dist_W11 >= 1.8",
                                            f->exponent >= 1.8, fmtv(f->exponent)));
    }
    std::vector<double> res;
    for (const auto& r : recs) {
        if (r.response_residual) res.push_back(*r.response_residual);
    }
    if (res.size() >= 2) {
        bool monotone = true;
        for (std::size_t i = 1; i < res.size(); ++i) monotone = monotone && res[i] < res[i - 1];
        const double ratio = res.back() / res.front();
        outcome.checks.push_back(make_check(
            "explicit_coefficient",
            "||(h_delta - h0)/delta^2 - R||_W11 decreases monotonically, last <= 25% of first",
            monotone && ratio <= 0.25,
            fmt::format("monotone {} last/first {}", monotone ? "yes" : "no", fmtv(ratio))));
        outcome.checks.push_back(make_check("taylor_consistency",
                                            "residual shrinks by >= 1.5 across the sweep",
                                            res.front() / res.back() >= 1.5,
                                            fmtv(res.front() / res.back())));
    }
    if (!config.compare_kernel.empty() && recs.size() >= 2) {
        ExperimentConfig other = config;
        other.kernel = KernelSettings{config.compare_kernel, ""};
        const NoiseKernel k1 = build_kernel(config.kernel, config.base_dir);
        const NoiseKernel k2 = build_kernel(other.kernel, config.base_dir);
        const double expected = moments(k2).sigma2 / moments(k1).sigma2;
        const std::vector<double> last_two{recs[recs.size() - 2].delta, recs.back().delta};
        const SweepResult second =
            zero_noise_sweep(build_map(config.map), k2, last_two, sweep_config(config));
        bool ok = true;
        std::string measured;
        for (std::size_t i = 0; i < 2; ++i) {
            const double a = *recs[recs.size() - 2 + i].dist_w11;
            const double b = *second.records[i].dist_w11;
            const double ratio = b / a;
            ok = ok && std::abs(ratio / expected - 1.0) <= 0.10;
            measured += fmt::format("{}delta {}: {}", i ? "; " : "", fmtv(last_two[i]), fmtv(ratio));
        }
        outcome.checks.push_back(make_check(
            "variance_scaling",
            fmt::format("{}/{} distance ratio within 10% of sigma^2 ratio {}", config.compare_kernel,
                        k1.name(), fmtv(expected)),
            ok, measured));
    }
}

void piecewise_checks(const SweepOutput& out, RunOutcome& outcome) {
    const auto& recs = out.sweep.records;
    bool chain = true;
    double worst = INFINITY;
    double lower = INFINITY;
    for (const auto& r : recs) {
        if (r.flagged) continue;
        worst = std::min(worst, r.dist_l1 * r.lip_hdelta);
        lower = std::min(lower, r.dist_l1 / r.delta);
        chain = chain && r.dist_l1 * r.lip_hdelta >= 1.0 / 9.0 - 1e-3;
    }
    outcome.checks.push_back(make_check("lower_bound_chain",
                                        "dist_L1 * lip(h_delta) >= 1/9 - 1e-3 for every record",
                                        chain, fmt::format("min product {}", fmtv(worst))));
    outcome.checks.push_back(make_check("order_one_lower", "dist_L1 / delta bounded below by C > 0",
                                        lower > 0.0, fmt::format("min ratio {}", fmtv(lower))));
    if (const FitResult* f = find_fit(out, "dist_L1")) {
        outcome.checks.push_back(make_check(
            "linear_speed", "exponent of dist_L1 in [0.85, 1.15]",
            f->exponent >= 0.85 && f->exponent <= 1.15,
            fmt::format("exponent {} r^2 {}", fmtv(f->exponent), fmtv(f->r_squared))));
    }
    if (const FitResult* f = find_fit(out, "dist_L1_power_log")) {
        outcome.info.push_back(fmt::format("delta |log delta| model: exponent {} prefactor {} r^2 {}",
                                           fmtv(f->exponent), fmtv(f->prefactor),
                                           fmtv(f->r_squared)));
    }
    if (const FitResult* f = find_fit(out, "lip_hdelta")) {
        outcome.checks.push_back(make_check(
            "lipschitz_scaling", "lip(h_delta) ~ C' delta^-q with q in [0.85, 1.15]",
            f->exponent >= 0.85 && f->exponent <= 1.15,
            fmt::format("q {} C' {}", fmtv(f->exponent), fmtv(f->prefactor))));
    }
}

RunOutcome abstract_outcome(const ExperimentConfig& config, const std::filesystem::path& out_dir) {
    RunOutcome outcome;
    const MarkovFamily family = build_family(config);
    const ResponseCheck lin = verify_linear_response(family, config.abstract_deltas);
    const ResponseCheck quad = verify_quadratic_response(family, config.abstract_deltas);
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < lin.points.size(); ++i) {
        rows.push_back({format_number(lin.points[i].delta), format_number(lin.points[i].deviation),
                        format_number(quad.points[i].deviation)});
        outcome.info.push_back(fmt::format("delta {}: linear deviation {} quadratic deviation {}",
                                           fmtv(lin.points[i].delta), fmtv(lin.points[i].deviation),
                                           fmtv(quad.points[i].deviation)));
    }
    write_csv(out_dir / "abstract.csv", {"delta", "linear_deviation", "quadratic_deviation"}, rows);

    const double h0_norm = lin.h0.cwiseAbs().sum();
    auto decay = [&](const ResponseCheck& c, const std::string& id, const std::string& what) {
        bool ok = true;
        std::string measured;
        for (std::size_t i = 1; i < c.points.size(); ++i) {
            const double ratio = c.points[i - 1].deviation / c.points[i].deviation;
            const double steps = std::log10(c.points[i - 1].delta / c.points[i].delta);
            const double per_decade = std::pow(ratio, 1.0 / steps);
            ok = ok && per_decade >= 5.0 && per_decade <= 20.0;
            measured += fmt::format("{}{}", i > 1 ? ", " : "", fmtv(per_decade));
        }
        const double last = c.points.back().deviation;
        ok = ok && last <= 1e-3 * h0_norm;
        outcome.checks.push_back(make_check(
            id, what + ": deviation shrinks by a factor in [5, 20] per decade, smallest <= 1e-3 ||h0||",
            ok, fmt::format("per-decade factors [{}], smallest {}", measured, fmtv(last))));
    };
    decay(lin, "linear_response", "linear response formula");
    decay(quad, "quadratic_response", "second-order response formula");
    const double mass_lin = std::abs(lin.term.sum());
    const double mass_quad = std::abs(quad.term.sum());
    outcome.checks.push_back(make_check("response_terms_zero_sum",
                                        "response terms have zero coordinate sum within 1e-12",
                                        mass_lin <= 1e-12 && mass_quad <= 1e-12,
                                        fmt::format("{} {}", fmtv(mass_lin), fmtv(mass_quad))));
    return outcome;
}

}  // namespace

std::string to_string(RunMode mode) {
    switch (mode) {
        case RunMode::smooth: return "smooth";
        case RunMode::piecewise: return "piecewise";
        case RunMode::abstract: return "abstract";
    }
    return "smooth";
}

bool RunOutcome::all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(0, fmt::format("cannot read config {}", path.string()));
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str(), path.parent_path());
}

ExperimentConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir) {
    ExperimentConfig cfg;
    cfg.base_dir = base_dir;
    std::stringstream ss(text);
    std::string raw;
    std::string section;
    int line = 0;
    while (std::getline(ss, raw)) {
        ++line;
        std::string s = raw;
        const auto hash = s.find('#');
        if (hash != std::string::npos) s = s.substr(0, hash);
        s = trim(s);
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') throw ConfigError(line, "unterminated section header");
            section = trim(s.substr(1, s.size() - 2));
            static const std::vector<std::string> known{"map",        "kernel",   "sweep", "solver",
                                                        "montecarlo", "abstract", "output"};
            if (std::find(known.begin(), known.end(), section) == known.end()) {
                throw ConfigError(line, fmt::format("unknown section [{}]", section));
            }
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ConfigError(line, "expected key = value");
        const std::string key = trim(s.substr(0, eq));
        const std::string value = trim(s.substr(eq + 1));
        if (section.empty()) throw ConfigError(line, "key outside of a section");
        if (value.empty()) throw ConfigError(line, fmt::format("empty value for '{}'", key));
        auto unknown = [&] {
            return ConfigError(line, fmt::format("unknown key '{}' in [{}]", key, section));
        };

        if (section == "map") {
            if (key == "name") cfg.map.name = value;
            else if (key == "epsilon") cfg.map.epsilon = parse_double(value, line);
            else if (key == "expression") cfg.map.expression = value;
            else if (key == "branch") {
                const auto bar = value.find('|');
                if (bar == std::string::npos) {
                    throw ConfigError(line, "branch needs 'breakpoint | expression'");
                }
                cfg.map.branches.emplace_back(parse_double(trim(value.substr(0, bar)), line),
                                              trim(value.substr(bar + 1)));
            } else throw unknown();
        } else if (section == "kernel") {
            if (key == "name") cfg.kernel.name = value;
            else if (key == "table") cfg.kernel.table = value;
            else throw unknown();
        } else if (section == "sweep") {
            if (key == "mode") {
                if (value == "smooth") cfg.mode = RunMode::smooth;
                else if (value == "piecewise") cfg.mode = RunMode::piecewise;
                else if (value == "abstract") cfg.mode = RunMode::abstract;
                else throw ConfigError(line, fmt::format("unknown mode '{}'", value));
            } else if (key == "backend") {
                try {
                    cfg.backend = backend_from_string(value);
                } catch (const ValidationError& e) {
                    throw ConfigError(line, e.what());
                }
            } else if (key == "resolution") {
                cfg.resolution = static_cast<int>(parse_long(value, line));
            } else if (key == "deltas") {
                cfg.deltas = parse_list(value, line);
            } else if (key == "compare_kernel") {
                cfg.compare_kernel = value;
            } else if (key == "threads") {
                cfg.threads = static_cast<int>(parse_long(value, line));
            } else throw unknown();
        } else if (section == "solver") {
            if (key == "tol") cfg.tol = parse_double(value, line);
            else if (key == "max_iter") cfg.max_iter = static_cast<int>(parse_long(value, line));
            else throw unknown();
        } else if (section == "montecarlo") {
            if (key == "n_steps") cfg.montecarlo.n_steps = parse_long(value, line);
            else if (key == "burn_in") cfg.montecarlo.burn_in = parse_long(value, line);
            else if (key == "chains") cfg.montecarlo.n_chains = static_cast<int>(parse_long(value, line));
            else if (key == "bins") cfg.montecarlo.bins = static_cast<int>(parse_long(value, line));
            else if (key == "seed") cfg.montecarlo.seed = parse_u64(value, line);
            else if (key == "delta") cfg.montecarlo_delta = parse_double(value, line);
            else throw unknown();
        } else if (section == "abstract") {
            if (key == "family") cfg.family = value;
            else if (key == "dimension") cfg.family_dimension = static_cast<int>(parse_long(value, line));
            else if (key == "seed") cfg.family_seed = parse_u64(value, line);
            else if (key == "delta_max") cfg.family_delta_max = parse_double(value, line);
            else if (key == "deltas") cfg.abstract_deltas = parse_list(value, line);
            else throw unknown();
        } else if (section == "output") {
            if (key == "dir") cfg.output_dir = value;
            else throw unknown();
        }
    }
    return cfg;
}

CircleMap build_map(const MapSettings& settings) {
    if (!settings.branches.empty()) {
        std::vector<std::pair<double, Expression>> branches;
        for (const auto& [bp, text] : settings.branches) branches.emplace_back(bp, Expression::parse(text));
        return CircleMap::piecewise("custom_piecewise", branches);
    }
    if (!settings.expression.empty()) {
        return CircleMap::smooth("custom_smooth", Expression::parse(settings.expression));
    }
    return map_by_name(settings.name, settings.epsilon);
}

NoiseKernel build_kernel(const KernelSettings& settings, const std::filesystem::path& base_dir) {
    if (!settings.table.empty()) return load_kernel_csv(resolve(base_dir, settings.table));
    return kernel_by_name(settings.name);
}

RunMode effective_mode(const ExperimentConfig& config) {
    if (config.mode) return *config.mode;
    return build_map(config.map).kind() == MapKind::smooth ? RunMode::smooth : RunMode::piecewise;
}

Backend effective_backend(const ExperimentConfig& config) {
    if (config.backend) return *config.backend;
    return effective_mode(config) == RunMode::smooth ? Backend::fourier : Backend::ulam;
}

int effective_resolution(const ExperimentConfig& config) {
    if (config.resolution) return *config.resolution;
    return effective_backend(config) == Backend::fourier ? 128 : 4096;
}

std::vector<double> effective_deltas(const ExperimentConfig& config) {
    if (!config.deltas.empty()) return config.deltas;
    return effective_mode(config) == RunMode::smooth ? geometric_deltas(0.2, 7)
                                                     : geometric_deltas(0.1, 6);
}

SweepConfig sweep_config(const ExperimentConfig& config) {
    SweepConfig sc;
    sc.backend = effective_backend(config);
    sc.resolution = effective_resolution(config);
    sc.tol = config.tol;
    sc.max_iter = config.max_iter;
    sc.threads = config.threads;
    return sc;
}

MarkovFamily build_family(const ExperimentConfig& config) {
    if (config.family == "random") {
        return random_markov_family(config.family_dimension, config.family_seed,
                                    config.family_delta_max);
    }
    return load_family_csv(resolve(config.base_dir, config.family));
}

RunOutcome run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    const RunMode mode = effective_mode(config);
    RunOutcome outcome;
    if (mode == RunMode::abstract) {
        outcome = abstract_outcome(config, out_dir);
    } else {
        const SweepOutput out = sweep_and_fit(config, out_dir, outcome);
        if (mode == RunMode::smooth) smooth_checks(config, out, outcome);
        else piecewise_checks(out, outcome);
        for (const auto& [name, fit] : out.fits) {
            outcome.info.push_back(fmt::format("fit {}: exponent {} prefactor {} r^2 {}", name,
                                               fmtv(fit.exponent), fmtv(fit.prefactor),
                                               fmtv(fit.r_squared)));
        }
    }
    write_report(out_dir / "report.txt", fmt::format("experiment ({})", to_string(mode)), outcome);
    return outcome;
}

RunOutcome run_stationary(const ExperimentConfig& config, double delta,
                          const std::filesystem::path& out_dir) {
    const CircleMap map = build_map(config.map);
    const NoiseKernel kernel = build_kernel(config.kernel, config.base_dir);
    const SweepConfig sc = sweep_config(config);
    const TransferMatrix op = assemble_noisy(map, kernel, delta, sc.backend, sc.resolution);
    const StationaryResult sol = stationary_density(op, sc.tol, sc.max_iter);
    write_density_csv(out_dir / "densities" / "stationary.csv", sol.density);
    const Norms n = norms(sol.density);
    RunOutcome outcome;
    outcome.info.push_back(fmt::format(
        "map {} kernel {} delta {} backend {} resolution {}", map.name(), kernel.name(), delta,
        to_string(sc.backend), sc.resolution));
    outcome.info.push_back(fmt::format(
        "method {} iterations {} residual {} normalization defect {} min value {} clipped {}",
        sol.report.method, sol.report.iterations, fmtv(sol.report.final_residual),
        fmtv(sol.report.normalization_defect), fmtv(sol.report.min_value),
        fmtv(sol.report.clip_magnitude)));
    outcome.info.push_back(fmt::format("L1 {} W11 {} BV {} Lip {}", fmtv(n.l1), fmtv(n.w11),
                                       fmtv(n.bv), fmtv(n.lip)));
    write_report(out_dir / "report.txt", "stationary density", outcome);
    return outcome;
}

RunOutcome run_sweep(const ExperimentConfig& config, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    RunOutcome outcome;
    const SweepOutput out = sweep_and_fit(config, out_dir, outcome);
    for (const auto& [name, fit] : out.fits) {
        outcome.info.push_back(fmt::format("fit {}: exponent {} prefactor {} r^2 {}", name,
                                           fmtv(fit.exponent), fmtv(fit.prefactor),
                                           fmtv(fit.r_squared)));
    }
    write_report(out_dir / "report.txt", "sweep", outcome);
    return outcome;
}

RunOutcome run_response(const ExperimentConfig& config, const std::filesystem::path& out_dir) {
    const CircleMap map = build_map(config.map);
    const NoiseKernel kernel = build_kernel(config.kernel, config.base_dir);
    const int modes = effective_backend(config) == Backend::fourier ? effective_resolution(config)
                                                                   : 128;
    const TransferMatrix lt = assemble_fourier(map, modes);
    const StationaryResult base = stationary_density(lt, config.tol, config.max_iter);
    const FourierDensity r = quadratic_coefficient(lt, std::get<FourierDensity>(base.density),
                                                   moments(kernel).sigma2);
    write_density_csv(out_dir / "densities" / "h0.csv", base.density);
    write_density_csv(out_dir / "densities" / "R.csv", r);

    RunOutcome outcome;
    outcome.info.push_back(fmt::format("||R||_W11 {} mass {}", fmtv(sobolev_norm(r, 1)),
                                       fmtv(r.mass())));
    std::vector<std::vector<std::string>> rows;
    for (const auto& p : second_derivative_check(map, kernel, effective_deltas(config), modes)) {
        rows.push_back({format_number(p.delta), format_number(p.residual),
                        format_number(p.scaled_norm)});
        outcome.info.push_back(fmt::format("delta {}: second-derivative residual {}",
                                           fmtv(p.delta), fmtv(p.residual)));
    }
    write_csv(out_dir / "second_derivative.csv", {"delta", "residual", "scaled_norm"}, rows);
    write_report(out_dir / "report.txt", "response coefficient", outcome);
    return outcome;
}

RunOutcome run_montecarlo(const ExperimentConfig& config, const std::filesystem::path& out_dir) {
    const CircleMap map = build_map(config.map);
    const NoiseKernel kernel = build_kernel(config.kernel, config.base_dir);
    SimulationConfig mc = config.montecarlo;
    mc.threads = config.threads;
    const BinDensity hist = simulate_histogram(map, kernel, config.montecarlo_delta, mc);
    write_density_csv(out_dir / "histogram.csv", hist);
    RunOutcome outcome;
    outcome.info.push_back(fmt::format("{} samples in {} bins, delta {}, seed {}", mc.samples(),
                                       mc.bins, config.montecarlo_delta, mc.seed));
    write_report(out_dir / "report.txt", "monte carlo histogram", outcome);
    return outcome;
}

RunOutcome run_abstract(const ExperimentConfig& config, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    RunOutcome outcome = abstract_outcome(config, out_dir);
    write_report(out_dir / "report.txt", "abstract response", outcome);
    return outcome;
}

RunOutcome run_fit(const std::filesystem::path& sweep_csv, const std::filesystem::path& out_dir) {
    const auto records = read_sweep_csv(sweep_csv);
    RunOutcome outcome;
    std::string text;
    auto attempt = [&](const std::string& name, SweepField field, FitModel model) {
        try {
            const FitResult f = fit_exponent(records, field, model);
            text += format_fit(name, f) + "\n";
            outcome.info.push_back(fmt::format("fit {}: exponent {} prefactor {} r^2 {}", name,
                                               fmtv(f.exponent), fmtv(f.prefactor),
                                               fmtv(f.r_squared)));
        } catch (const ValidationError& e) {
            outcome.info.push_back(fmt::format("fit {} skipped: {}", name, e.what()));
        }
    };
    attempt("dist_L1", SweepField::dist_l1, FitModel::power);
    attempt("dist_L1_power_log", SweepField::dist_l1, FitModel::power_log);
    attempt("dist_W11", SweepField::dist_w11, FitModel::power);
    attempt("response_residual", SweepField::response_residual, FitModel::power);
    attempt("lip_hdelta", SweepField::lip_hdelta, FitModel::power);
    write_text(out_dir / "fits.txt", text);
    write_report(out_dir / "report.txt", "fit", outcome);
    return outcome;
}

void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRecord>& records) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : records) {
        rows.push_back({format_number(r.delta), format_number(r.dist_l1),
                        optional_number(r.dist_w11), optional_number(r.response_residual),
                        format_number(r.lip_hdelta), std::to_string(r.solver_report.iterations),
                        r.flagged ? "1" : "0", format_number(r.bv_hdelta),
                        format_number(r.perturbation_ratio),
                        format_number(r.solver_report.final_residual),
                        format_number(r.solver_report.normalization_defect),
                        r.solver_report.method});
    }
    write_csv(path,
              {"delta", "dist_L1", "dist_W11", "response_residual", "lip_hdelta", "iterations",
               "flagged", "bv_hdelta", "perturbation_ratio", "final_residual",
               "normalization_defect", "method"},
              rows);
}

std::vector<SweepRecord> read_sweep_csv(const std::filesystem::path& path) {
    const CsvTable table = read_csv(path, true);
    auto column = [&](const std::string& name) -> int {
        const auto it = std::find(table.header.begin(), table.header.end(), name);
        return it == table.header.end() ? -1 : static_cast<int>(it - table.header.begin());
    };
    const int c_delta = column("delta");
    const int c_l1 = column("dist_L1");
    if (c_delta < 0 || c_l1 < 0) {
        throw ConfigError(1, fmt::format("{}: needs delta and dist_L1 columns", path.string()));
    }
    const int c_w11 = column("dist_W11");
    const int c_res = column("response_residual");
    const int c_lip = column("lip_hdelta");
    const int c_it = column("iterations");
    const int c_flag = column("flagged");
    std::vector<SweepRecord> out;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const int line = table.lines[r];
        auto cell = [&](int c) -> std::string {
            return c >= 0 && c < static_cast<int>(row.size()) ? row[static_cast<std::size_t>(c)] : "";
        };
        SweepRecord rec;
        rec.delta = parse_double(cell(c_delta), line);
        rec.dist_l1 = parse_double(cell(c_l1), line);
        if (!cell(c_w11).empty()) rec.dist_w11 = parse_double(cell(c_w11), line);
        if (!cell(c_res).empty()) rec.response_residual = parse_double(cell(c_res), line);
        if (!cell(c_lip).empty()) rec.lip_hdelta = parse_double(cell(c_lip), line);
        if (!cell(c_it).empty()) rec.solver_report.iterations = static_cast<int>(parse_long(cell(c_it), line));
        rec.flagged = cell(c_flag) == "1";
        out.push_back(rec);
    }
    return out;
}

std::string format_fit(const std::string& name, const FitResult& fit) {
    std::string s = fmt::format(
        "field: {}\nmodel: {}\nexponent: {}\nprefactor: {}\nr_squared: {}\npoints: {}\n", name,
        to_string(fit.model), format_number(fit.exponent), format_number(fit.prefactor),
        format_number(fit.r_squared), fit.used);
    for (const auto& note : fit.notes) s += fmt::format("note: {}\n", note);
    return s;
}

void write_report(const std::filesystem::path& path, const std::string& title,
                  const RunOutcome& outcome) {
    std::string text = fmt::format("{}\n", title);
    for (const auto& c : outcome.checks) {
        text += fmt::format("{} {}: {} | measured {}\n", c.passed ? "PASS" : "FAIL", c.id,
                            c.description, c.measured);
    }
    for (const auto& line : outcome.info) text += fmt::format("info: {}\n", line);
    if (!outcome.checks.empty()) {
        text += fmt::format("overall: {}\n", outcome.all_passed() ? "PASS" : "FAIL");
    }
    write_text(path, text);
}

}  // namespace zeronoise
