// Acceptance checks A1-A12. One PASS/FAIL line per criterion; exit 1 on any FAIL.
#include "zeronoise/abstract_response.hpp"
#include "zeronoise/circle_map.hpp"
#include "zeronoise/density.hpp"
#include "zeronoise/montecarlo.hpp"
#include "zeronoise/noise_kernel.hpp"
#include "zeronoise/operators.hpp"
#include "zeronoise/response.hpp"
#include "zeronoise/solver.hpp"

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <exception>
#include <functional>
#include <numbers>
#include <thread>

using namespace zeronoise;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(const char* id, bool ok, const std::string& measured) {
    if (!ok) ++failures;
    fmt::print("{} {}: {}\n", ok ? "PASS" : "FAIL", id, measured);
    std::fflush(stdout);
}

void guarded(const char* id, const std::function<void()>& body) {
    try {
        body();
    } catch (const std::exception& e) {
        report(id, false, fmt::format("exception: {}", e.what()));
    }
}

bool in(double v, double lo, double hi) { return v >= lo && v <= hi; }

SweepConfig fourier_config() {
    SweepConfig c;
    c.backend = Backend::fourier;
    c.resolution = 128;
    c.tol = 1e-13;
    c.threads = 1;
    return c;
}

SweepConfig ulam_config() {
    SweepConfig c;
    c.backend = Backend::ulam;
    c.resolution = 8192;
    c.tol = 1e-13;
    c.threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    return c;
}

}  // namespace

int main() {
    const CircleMap smooth = perturbed_doubling_map(0.1);
    const CircleMap step_map = shift_fold_map();
    const NoiseKernel uniform = uniform_kernel();

    // A1-A3 share the uniform-kernel sweep.
    SweepResult uni;
    double a1_seconds = 0.0;
    guarded("A1", [&] {
        const auto t0 = Clock::now();
        uni = zero_noise_sweep(smooth, uniform, geometric_deltas(0.2, 7), fourier_config());
        a1_seconds = seconds_since(t0);
        const FitResult fit = fit_exponent(uni.records, SweepField::dist_w11, FitModel::power);
        const bool ok = in(fit.exponent, 1.85, 2.15) && fit.r_squared >= 0.99 && a1_seconds <= 60.0;
        report("A1", ok, fmt::format("exponent {:.4f} r^2 {:.6f} runtime {:.2f}s", fit.exponent,
                                     fit.r_squared, a1_seconds));
    });

    guarded("A2", [&] {
        if (uni.records.empty()) throw std::runtime_error("no sweep");
        bool monotone = true;
        std::string values;
        for (std::size_t i = 0; i < uni.records.size(); ++i) {
            const double r = uni.records[i].response_residual.value();
            values += fmt::format("{}{:.3e}", i ? " " : "", r);
            if (i > 0 && !(r < uni.records[i - 1].response_residual.value())) monotone = false;
        }
        const double first = uni.records.front().response_residual.value();
        const double last = uni.records.back().response_residual.value();
        report("A2", monotone && last <= 0.25 * first,
               fmt::format("residuals [{}] last/first {:.4f}", values, last / first));
    });

    guarded("A3", [&] {
        if (uni.records.size() < 2) throw std::runtime_error("no sweep");
        const SweepResult tri =
            zero_noise_sweep(smooth, triangular_kernel(), geometric_deltas(0.2, 7), fourier_config());
        bool ok = true;
        std::string ratios;
        for (std::size_t i = tri.records.size() - 2; i < tri.records.size(); ++i) {
            const double ratio = tri.records[i].dist_w11.value() / uni.records[i].dist_w11.value();
            ratios += fmt::format(" delta {:.5f}: {:.4f}", tri.records[i].delta, ratio);
            ok = ok && in(ratio, 0.45, 0.55);
        }
        report("A3", ok, fmt::format("triangular/uniform{}", ratios));
    });

    guarded("A4", [&] {
        const auto pts = derivative_operator_decay(smooth, uniform, {0.1, 0.05, 0.025},
                                                   trig_test_suite(128), 128);
        bool ok = true;
        std::string ratios;
        for (std::size_t i = 1; i < pts.size(); ++i) {
            const double r = pts[i].estimate / pts[i - 1].estimate;
            ratios += fmt::format(" {:.4f}", r);
            ok = ok && in(r, 0.4, 0.6);
        }
        report("A4", ok, fmt::format("estimates {:.4e} {:.4e} {:.4e} ratios{}", pts[0].estimate,
                                     pts[1].estimate, pts[2].estimate, ratios));
    });

    guarded("A5", [&] {
        const std::vector<double> deltas{0.1, 0.05, 0.025};
        auto ratios_for = [&](const NoiseKernel& k, bool& ok) {
            const auto pts = second_derivative_check(smooth, k, deltas, 128);
            std::string s;
            ok = true;
            for (std::size_t i = 1; i < pts.size(); ++i) {
                const double r = pts[i].residual / pts[i - 1].residual;
                s += fmt::format(" {:.4f}", r);
                ok = ok && in(r, 0.4, 0.6);
            }
            return s;
        };
        bool ok = false;
        bool ok_uniform = false;
        const std::string skew = ratios_for(skew_triangular_kernel(), ok);
        const std::string sym = ratios_for(uniform, ok_uniform);
        report("A5", ok,
               fmt::format("skew_triangular ratios{} (uniform ratios{})", skew, sym));
    });

    SweepResult pw;
    guarded("A6", [&] {
        const auto t0 = Clock::now();
        pw = zero_noise_sweep(step_map, uniform, geometric_deltas(0.1, 6), ulam_config());
        const double secs = seconds_since(t0);
        double worst = 1e300;
        for (const auto& r : pw.records) worst = std::min(worst, r.dist_l1 * r.lip_hdelta);
        const FitResult fit = fit_exponent(pw.records, SweepField::dist_l1, FitModel::power);
        const bool ok = worst >= 1.0 / 9.0 - 1e-3 && in(fit.exponent, 0.85, 1.15) && secs <= 120.0;
        report("A6", ok, fmt::format("min dist*lip {:.6f} exponent {:.4f} runtime {:.2f}s", worst,
                                     fit.exponent, secs));
    });

    guarded("A7", [&] {
        if (pw.records.empty()) throw std::runtime_error("no sweep");
        const FitResult fit = lipschitz_diagnostics(pw.records);
        report("A7", in(fit.exponent, 0.85, 1.15),
               fmt::format("q {:.4f} C' {:.4f} r^2 {:.6f}", fit.exponent, fit.prefactor,
                           fit.r_squared));
    });

    guarded("A8", [&] {
        const LipschitzBound b = best_lipschitz_bound(3.0, 8192);
        const bool ok = std::abs(b.bound - 1.0 / 27.0) <= 1e-15 &&
                        std::abs(b.distance - 1.0 / 27.0) <= 1e-6;
        report("A8", ok, fmt::format("bound {:.15f} distance {:.12f}", b.bound, b.distance));
    });

    guarded("A9", [&] {
        const auto t0 = Clock::now();
        const MarkovFamily fam = load_family_csv(ZN_CONFIG_DIR "/markov_family_d6.csv");
        const std::vector<double> deltas{1e-2, 1e-3, 1e-4};
        const ResponseCheck lin = verify_linear_response(fam, deltas);
        const ResponseCheck quad = verify_quadratic_response(fam, deltas);
        const double secs = seconds_since(t0);
        const double h0 = lin.h0.lpNorm<1>();
        bool ok = secs <= 1.0;
        std::string s;
        for (const ResponseCheck* c : {&lin, &quad}) {
            ok = ok && c->points.back().deviation <= 1e-3 * h0;
            for (std::size_t i = 1; i < c->points.size(); ++i) {
                const double f = c->points[i - 1].deviation / c->points[i].deviation;
                s += fmt::format(" {:.3f}", f);
                ok = ok && in(f, 5.0, 20.0);
            }
        }
        report("A9", ok, fmt::format("linear dev {:.3e} quadratic dev {:.3e} decade factors{} runtime {:.3f}s",
                                     lin.points.back().deviation, quad.points.back().deviation, s,
                                     secs));
    });

    guarded("A10", [&] {
        double worst = 0.0;
        for (int n : {4, 64, 1024, 8192}) {
            const BinDensity h = shift_fold_density(n);
            const BinDensity lh = assemble_ulam(step_map, n).apply(h);
            worst = std::max(worst, l1_norm(lh - h));
        }
        report("A10", worst <= 1e-12, fmt::format("max residual {:.3e} over n in 4 64 1024 8192", worst));
    });

    guarded("A11", [&] {
        const auto t0 = Clock::now();
        SimulationConfig mc;
        mc.n_chains = 10;
        mc.burn_in = 1000;
        mc.n_steps = 1000000 + mc.burn_in;
        mc.seed = 1;
        mc.bins = 256;
        mc.threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
        const BinDensity hist = simulate_histogram(step_map, uniform, 0.05, mc);
        const StationaryResult ref =
            stationary_density(assemble_noisy(step_map, uniform, 0.05, Backend::ulam, 8192), 1e-13);
        const BinDensity coarse = coarse_grain(std::get<BinDensity>(ref.density), mc.bins);
        const double dist = l1_norm(hist - coarse);
        const double secs = seconds_since(t0);
        report("A11", dist <= 0.02 && secs <= 120.0,
               fmt::format("L1 distance {:.5f} over {} samples runtime {:.2f}s", dist, mc.samples(),
                           secs));
    });

    guarded("A12", [&] {
        constexpr int n = 4096;
        const double tp = 2.0 * std::numbers::pi;
        std::vector<std::function<double(double)>> suite{
            [&](double x) { return 1.0 + 0.5 * std::sin(tp * x); },
            [&](double x) { return 1.0 + 0.3 * std::cos(3 * tp * x); },
            [&](double x) { return std::exp(std::sin(tp * x)); },
            [&](double x) { return 1.0 / (1.1 + std::cos(tp * x)); },
            [](double x) { return x < 0.5 ? 1.5 : 0.5; },
            [](double x) { return x < 0.25 ? 2.0 : (x < 0.75 ? 0.5 : 1.0); },
            [](double x) { return 0.2 + std::abs(x - 0.5); },
            [](double x) { return 1.0 + x; },
            [&](double x) { return 1.0 + 0.9 * std::sin(7 * tp * x); },
            [&](double x) { return 1.0 + 0.5 * std::sin(31 * tp * x) * std::cos(tp * x); },
            [](double x) { return x < 0.3 ? 0.0 : 1.0 / 0.7; },
            [](double x) { return std::exp(-50.0 * (x - 0.4) * (x - 0.4)); },
        };
        const TransferMatrix lt = assemble_ulam(smooth, n);
        double worst = -1e300;
        int checks = 0;
        for (const auto& name : builtin_kernel_names()) {
            const NoiseKernel k = kernel_by_name(name);
            for (double delta : {0.1, 0.01}) {
                const TransferMatrix ld = compose_noisy(lt, assemble_convolution(k, delta, Backend::ulam, n));
                for (const auto& f : suite) {
                    const BinDensity g = BinDensity::from_function(n, f);
                    const Norms a = norms(ld.apply(g));
                    const Norms b = norms(lt.apply(g));
                    for (int j = 0; j <= 3; ++j) worst = std::max(worst, a.sobolev(j) - b.sobolev(j));
                    worst = std::max(worst, a.bv - b.bv);
                    checks += 5;
                }
            }
        }
        report("A12", worst <= 1e-9,
               fmt::format("max excess {:.3e} over {} norm comparisons", worst, checks));
    });

    return failures == 0 ? 0 : 1;
}
