#include "zeronoise/response.hpp"

#include "zeronoise/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <numeric>
#include <thread>

namespace zeronoise {

namespace {

FourierDensity pad(const FourierDensity& g, int modes) {
    FourierDensity out(modes);
    const int keep = std::min(modes, g.modes());
    for (int k = -keep; k <= keep; ++k) out.coeff(k) = g.coeff(k);
    return out;
}

template <class F>
void parallel_for(int count, int threads, F&& body) {
    threads = std::max(1, std::min(threads, count));
    if (threads == 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (int i = next++; i < count; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    errors[static_cast<std::size_t>(i)] = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

void validate_deltas(const std::vector<double>& deltas) {
    if (deltas.empty()) throw ValidationError("sweep needs at least one delta");
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        if (!(deltas[i] > 0.0 && deltas[i] <= 0.25)) {
            throw ValidationError(fmt::format("delta = {} outside (0, 0.25]", deltas[i]));
        }
        if (i > 0 && !(deltas[i] < deltas[i - 1])) {
            throw ValidationError("deltas must be strictly decreasing");
        }
    }
}

TransferMatrix assemble_transfer(const CircleMap& map, Backend backend, int resolution) {
    return backend == Backend::ulam ? assemble_ulam(map, resolution)
                                    : assemble_fourier(map, resolution);
}

double lip_of(const DensityGrid& g) {
    if (const auto* b = std::get_if<BinDensity>(&g)) return lipschitz_constant(*b);
    return norms(std::get<FourierDensity>(g)).lip;
}

double bv_of(const DensityGrid& g) {
    if (const auto* b = std::get_if<BinDensity>(&g)) return variation(*b);
    return l1_norm(std::get<FourierDensity>(g).derivative(1));
}

DensityGrid difference(const DensityGrid& a, const DensityGrid& b) {
    if (const auto* x = std::get_if<BinDensity>(&a)) return *x - std::get<BinDensity>(b);
    return std::get<FourierDensity>(a) - std::get<FourierDensity>(b);
}

double l1_of(const DensityGrid& g) {
    return std::visit([](const auto& d) { return l1_norm(d); }, g);
}

double w11_of(const DensityGrid& g) {
    return std::visit([](const auto& d) { return sobolev_norm(d, 1); }, g);
}

/// Antiderivative of the slope-a ramp approximation of h0.
double ramp_antiderivative(double a, double x) {
    const double left = 0.5 - 1.0 / (3.0 * a);
    const double right = 0.5 + 1.0 / (3.0 * a);
    auto ramp = [a](double t) { return t + 0.5 * a * (t - 0.5) * (t - 0.5); };
    if (x <= left) return 2.0 / 3.0 * x;
    const double at_left = 2.0 / 3.0 * left;
    if (x <= right) return at_left + ramp(x) - ramp(left);
    return at_left + ramp(right) - ramp(left) + 4.0 / 3.0 * (x - right);
}

}  // namespace

FourierDensity quadratic_coefficient(const TransferMatrix& transfer, const FourierDensity& h0,
                                     double sigma2) {
    if (transfer.backend() != Backend::fourier) {
        throw UnsupportedError(
            "quadratic_coefficient needs the Fourier backend; second derivatives of bin "
            "densities are not used");
    }
    FourierDensity second = h0.derivative(2);
    second.coeff(0) = 0.0;
    const ResolventResult r = resolvent_apply(transfer, second);
    FourierDensity out = std::get<FourierDensity>(r.solution);
    out *= 0.5 * sigma2;
    return out;
}

SweepResult zero_noise_sweep(const CircleMap& map, const NoiseKernel& kernel,
                             const std::vector<double>& deltas, const SweepConfig& config) {
    validate_deltas(deltas);
    const bool smooth = map.kind() == MapKind::smooth;
    const TransferMatrix lt = assemble_transfer(map, config.backend, config.resolution);
    StationaryResult base = stationary_density(lt, config.tol, config.max_iter);

    SweepResult result{{}, base.density, base.report, std::nullopt, {}};
    if (smooth && config.backend == Backend::fourier) {
        result.coefficient = quadratic_coefficient(lt, std::get<FourierDensity>(base.density),
                                                   moments(kernel).sigma2);
    }

    const int count = static_cast<int>(deltas.size());
    result.records.resize(static_cast<std::size_t>(count));
    if (config.keep_densities) result.densities.resize(static_cast<std::size_t>(count));
    parallel_for(count, config.threads, [&](int i) {
        const double delta = deltas[static_cast<std::size_t>(i)];
        const TransferMatrix q =
            assemble_convolution(kernel, delta, config.backend, config.resolution);
        const TransferMatrix l = compose_noisy(lt, q);
        StationaryResult sol = stationary_density(l, config.tol, config.max_iter);

        SweepRecord rec;
        rec.delta = delta;
        rec.solver_report = sol.report;
        const DensityGrid diff = difference(sol.density, result.h0);
        rec.dist_l1 = l1_of(diff);
        if (smooth) rec.dist_w11 = w11_of(diff);
        if (result.coefficient) {
            FourierDensity scaled = std::get<FourierDensity>(diff);
            scaled *= 1.0 / (delta * delta);
            rec.response_residual = sobolev_norm(scaled - *result.coefficient, 1);
        }
        rec.lip_hdelta = lip_of(sol.density);
        rec.bv_hdelta = bv_of(sol.density);
        rec.perturbation_ratio = l1_of(difference(lt.apply(sol.density), sol.density)) / delta;
        if (l.info().under_resolved) {
            rec.flagged = true;
            rec.note = fmt::format("kernel under-resolved: delta {} below a quarter bin", delta);
        }
        result.records[static_cast<std::size_t>(i)] = std::move(rec);
        if (config.keep_densities) result.densities[static_cast<std::size_t>(i)] = sol.density;
    });
    return result;
}

std::vector<double> geometric_deltas(double delta_max, int count) {
    std::vector<double> out;
    for (int k = 0; k < count; ++k) out.push_back(delta_max * std::ldexp(1.0, -k));
    return out;
}

std::string to_string(FitModel model) {
    return model == FitModel::power ? "power" : "power_log";
}

std::string to_string(SweepField field) {
    switch (field) {
        case SweepField::dist_l1: return "dist_L1";
        case SweepField::dist_w11: return "dist_W11";
        case SweepField::response_residual: return "response_residual";
        case SweepField::lip_hdelta: return "lip_hdelta";
    }
    return "dist_L1";
}

FitModel fit_model_from_string(const std::string& name) {
    if (name == "power") return FitModel::power;
    if (name == "power_log") return FitModel::power_log;
    throw ValidationError(fmt::format("unknown fit model '{}' (power or power_log)", name));
}

SweepField sweep_field_from_string(const std::string& name) {
    for (SweepField f : {SweepField::dist_l1, SweepField::dist_w11, SweepField::response_residual,
                         SweepField::lip_hdelta}) {
        if (to_string(f) == name) return f;
    }
    throw ValidationError(fmt::format("unknown sweep field '{}'", name));
}

FitResult fit_values(const std::vector<double>& deltas, const std::vector<double>& values,
                     FitModel model) {
    if (deltas.size() != values.size()) throw ValidationError("fit: size mismatch");
    FitResult fit;
    fit.model = model;
    std::vector<double> xs;
    std::vector<double> ys;
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        const double d = deltas[i];
        const double v = values[i];
        if (!(v > 0.0) || !std::isfinite(v)) {
            fit.notes.push_back(fmt::format("delta {}: non-positive value {} excluded", d, v));
            continue;
        }
        if (!(d > 0.0 && d < 1.0)) {
            fit.notes.push_back(fmt::format("delta {} outside (0, 1) excluded", d));
            continue;
        }
        xs.push_back(std::log(d));
        ys.push_back(model == FitModel::power ? std::log(v)
                                              : std::log(v) - std::log(std::abs(std::log(d))));
    }
    fit.used = static_cast<int>(xs.size());
    if (xs.size() < 2) throw ValidationError("fit: fewer than two usable points");
    const double n = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (!(sxx > 0.0)) throw ValidationError("fit: all deltas coincide");
    fit.exponent = sxy / sxx;
    fit.prefactor = std::exp(my - fit.exponent * mx);
    double sse = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - (my + fit.exponent * (xs[i] - mx));
        sse += r * r;
    }
    fit.r_squared = syy > 0.0 ? std::clamp(1.0 - sse / syy, 0.0, 1.0) : 1.0;
    return fit;
}

FitResult fit_exponent(const std::vector<SweepRecord>& records, SweepField field, FitModel model) {
    std::vector<double> deltas;
    std::vector<double> values;
    std::vector<std::string> notes;
    for (const auto& r : records) {
        if (r.flagged) {
            notes.push_back(fmt::format("delta {}: flagged record excluded", r.delta));
            continue;
        }
        std::optional<double> v;
        switch (field) {
            case SweepField::dist_l1: v = r.dist_l1; break;
            case SweepField::dist_w11: v = r.dist_w11; break;
            case SweepField::response_residual: v = r.response_residual; break;
            case SweepField::lip_hdelta: v = r.lip_hdelta; break;
        }
        if (!v) {
            notes.push_back(fmt::format("delta {}: {} not computed", r.delta, to_string(field)));
            continue;
        }
        deltas.push_back(r.delta);
        values.push_back(*v);
    }
    if (deltas.size() < 4) {
        throw ValidationError(fmt::format("fit_exponent: {} usable records, need at least 4",
                                          deltas.size()));
    }
    FitResult fit = fit_values(deltas, values, model);
    fit.notes.insert(fit.notes.begin(), notes.begin(), notes.end());
    return fit;
}

FitResult lipschitz_diagnostics(const std::vector<SweepRecord>& records) {
    FitResult fit = fit_exponent(records, SweepField::lip_hdelta, FitModel::power);
    fit.exponent = -fit.exponent;
    return fit;
}

std::vector<FourierDensity> trig_test_suite(int modes) {
    std::vector<FourierDensity> suite;
    auto mode = [&](int k, std::complex<double> c) {
        FourierDensity f(modes);
        f.coeff(k) = c;
        f.coeff(-k) = std::conj(c);
        return f;
    };
    for (int k = 1; k <= 4; ++k) {
        suite.push_back(mode(k, 0.5));                               // cos(2 pi k x)
        suite.push_back(mode(k, std::complex<double>(0.0, -0.5)));  // sin(2 pi k x)
    }
    suite.push_back(mode(1, 0.5) + mode(2, std::complex<double>(0.0, -0.25)) + mode(3, 0.125));
    suite.push_back(mode(2, 0.5) + mode(4, std::complex<double>(0.2, 0.1)));
    for (auto& f : suite) f *= 1.0 / sobolev_norm(f, 3);
    return suite;
}

double derivative_operator_norm(const TransferMatrix& transfer, const NoiseKernel& kernel,
                                double delta, const FourierDensity& f) {
    const FourierDensity lf = transfer.apply(f);
    const auto mult = fourier_multiplier(kernel, delta, lf.modes());
    FourierDensity diff(lf.modes());
    for (int k = -lf.modes(); k <= lf.modes(); ++k) {
        diff.coeff(k) = (mult[static_cast<std::size_t>(k + lf.modes())] - 1.0) * lf.coeff(k);
    }
    return sobolev_norm(diff, 1);
}

std::vector<DecayPoint> derivative_operator_decay(const CircleMap& map, const NoiseKernel& kernel,
                                                  const std::vector<double>& deltas,
                                                  const std::vector<FourierDensity>& suite,
                                                  int modes) {
    const TransferMatrix lt = assemble_fourier(map, modes);
    std::vector<DecayPoint> out;
    for (double delta : deltas) {
        double best = 0.0;
        for (const auto& f : suite) {
            const FourierDensity g = pad(f, modes);
            const double strong = sobolev_norm(g, 3);
            if (!(strong > 0.0)) continue;
            best = std::max(best, derivative_operator_norm(lt, kernel, delta, g) / (delta * strong));
        }
        out.push_back({delta, best});
    }
    return out;
}

std::vector<SecondDerivativePoint> second_derivative_check(const CircleMap& map,
                                                           const NoiseKernel& kernel,
                                                           const std::vector<double>& deltas,
                                                           int modes) {
    const TransferMatrix lt = assemble_fourier(map, modes);
    const FourierDensity h0 = std::get<FourierDensity>(stationary_density(lt, 1e-13).density);
    const double sigma2 = moments(kernel).sigma2;
    FourierDensity target = h0.derivative(2);
    target *= 0.5 * sigma2;
    const FourierDensity lh0 = lt.apply(h0);

    std::vector<SecondDerivativePoint> out;
    for (double delta : deltas) {
        const auto mult = fourier_multiplier(kernel, delta, modes);
        FourierDensity scaled(modes);
        // (L_delta - L_0) h0 = (Q_delta - Id) L_T h0.
        for (int k = -modes; k <= modes; ++k) {
            scaled.coeff(k) =
                (mult[static_cast<std::size_t>(k + modes)] - 1.0) * lh0.coeff(k) / (delta * delta);
        }
        out.push_back({delta, sobolev_norm(scaled - target, 1), sobolev_norm(scaled, 1)});
    }
    return out;
}

BinDensity shift_fold_density(int n) {
    std::vector<double> values(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double u = static_cast<double>(i) / n;
        const double v = static_cast<double>(i + 1) / n;
        double value = 4.0 / 3.0;
        if (v <= 0.5) value = 2.0 / 3.0;
        else if (u < 0.5) value = (2.0 / 3.0 * (0.5 - u) + 4.0 / 3.0 * (v - 0.5)) * n;
        values[static_cast<std::size_t>(i)] = value;
    }
    return BinDensity(std::move(values));
}

LipschitzBound best_lipschitz_bound(double a, int n) {
    if (!(a > 2.0 / 3.0)) {
        throw UnsupportedError(fmt::format(
            "best_lipschitz_bound: slope a = {} must exceed 2/3 so the ramp fits in [0, 1]", a));
    }
    LipschitzBound out;
    out.bound = 1.0 / (9.0 * a);
    std::vector<double> values(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double u = static_cast<double>(i) / n;
        const double v = static_cast<double>(i + 1) / n;
        values[static_cast<std::size_t>(i)] =
            (ramp_antiderivative(a, v) - ramp_antiderivative(a, u)) * n;
    }
    out.f_a = BinDensity(std::move(values));
    out.distance = l1_norm(out.f_a - shift_fold_density(n));
    return out;
}

RefinementCheck refinement_check(const CircleMap& map, const NoiseKernel& kernel,
                                 double delta_min, const SweepConfig& config) {
    RefinementCheck check;
    const int n = config.resolution;
    if (config.backend == Backend::fourier) {
        const auto coarse = std::get<FourierDensity>(
            stationary_density(assemble_fourier(map, n), config.tol, config.max_iter).density);
        const auto fine = std::get<FourierDensity>(
            stationary_density(assemble_fourier(map, 2 * n), config.tol, config.max_iter).density);
        check.measured = sobolev_norm(pad(coarse, 2 * n) - fine, 1);
        check.threshold = 1e-3 * delta_min * delta_min;
        check.description = fmt::format("W11 change of h0 from N={} to N={}", n, 2 * n);
    } else {
        auto solve = [&](int bins, double delta) {
            const TransferMatrix lt = assemble_ulam(map, bins);
            const TransferMatrix l =
                delta > 0.0 ? compose_noisy(lt, assemble_convolution(kernel, delta, Backend::ulam, bins))
                            : lt;
            return std::get<BinDensity>(stationary_density(l, config.tol, config.max_iter).density);
        };
        const BinDensity h0 = solve(n, 0.0);
        const BinDensity coarse = solve(n, delta_min);
        const BinDensity fine = solve(2 * n, delta_min);
        check.measured = l1_norm(coarse - coarse_grain(fine, n));
        check.threshold = 0.05 * l1_norm(coarse - h0);
        check.description =
            fmt::format("L1 change of h_delta at delta={} from n={} to n={}", delta_min, n, 2 * n);
    }
    check.passed = check.measured <= check.threshold;
    return check;
}

}  // namespace zeronoise
