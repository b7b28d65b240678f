#include "zeronoise/solver.hpp"

#include "zeronoise/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <numeric>

namespace zeronoise {

namespace {

constexpr int kDenseLimit = 1024;
constexpr int kStallCheck = 200;
constexpr double kStallRatio = 0.999;

using RealOp = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// Restarted GMRES for A x = b with a matrix-free A.
Eigen::VectorXd gmres(const RealOp& a, const Eigen::VectorXd& b, double tol, int restart,
                      int max_iter, int& iterations) {
    const Eigen::Index n = b.size();
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    const double bnorm = std::max(b.norm(), 1e-300);
    iterations = 0;
    while (iterations < max_iter) {
        Eigen::VectorXd r = b - a(x);
        double beta = r.norm();
        if (beta <= tol * bnorm) return x;
        Eigen::MatrixXd v(n, restart + 1);
        Eigen::MatrixXd h = Eigen::MatrixXd::Zero(restart + 1, restart);
        Eigen::VectorXd cs = Eigen::VectorXd::Zero(restart);
        Eigen::VectorXd sn = Eigen::VectorXd::Zero(restart);
        Eigen::VectorXd s = Eigen::VectorXd::Zero(restart + 1);
        v.col(0) = r / beta;
        s(0) = beta;
        int k = 0;
        for (; k < restart && iterations < max_iter; ++k, ++iterations) {
            Eigen::VectorXd w = a(v.col(k));
            for (int i = 0; i <= k; ++i) {
                h(i, k) = w.dot(v.col(i));
                w -= h(i, k) * v.col(i);
            }
            h(k + 1, k) = w.norm();
            if (h(k + 1, k) > 0.0) v.col(k + 1) = w / h(k + 1, k);
            for (int i = 0; i < k; ++i) {
                const double t = cs(i) * h(i, k) + sn(i) * h(i + 1, k);
                h(i + 1, k) = -sn(i) * h(i, k) + cs(i) * h(i + 1, k);
                h(i, k) = t;
            }
            const double denom = std::hypot(h(k, k), h(k + 1, k));
            cs(k) = h(k, k) / denom;
            sn(k) = h(k + 1, k) / denom;
            h(k, k) = denom;
            h(k + 1, k) = 0.0;
            s(k + 1) = -sn(k) * s(k);
            s(k) = cs(k) * s(k);
            if (std::abs(s(k + 1)) <= tol * bnorm) {
                ++k;
                ++iterations;
                break;
            }
        }
        const Eigen::VectorXd y =
            h.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(s.head(k));
        x += v.leftCols(k) * y;
    }
    return x;
}

double l1_mean(const Eigen::VectorXd& v) { return v.cwiseAbs().mean(); }

/// Upper bound for the L1 norm of a Fourier series.
double coefficient_l1(const Eigen::VectorXcd& c) { return c.cwiseAbs().sum(); }

struct UlamDeflated {
    Eigen::VectorXd x;
    int iterations = 0;
    std::string method;
};

/// Solves (Id - L + e m) x = rhs with e = ones, m = mean.
UlamDeflated solve_ulam_deflated(const UlamOperator& op, const Eigen::VectorXd& rhs) {
    const int n = op.size();
    if (op.is_generic() || n <= kDenseLimit) {
        Eigen::MatrixXd a = -op.dense();
        a.diagonal().array() += 1.0;
        a.array() += 1.0 / n;
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
        const double rcond = lu.rcond();
        if (!(rcond > 1e-14)) {
            throw ConvergenceError(fmt::format(
                "deflated system is singular (rcond {:.3g}); the leading eigenvalue is not simple",
                rcond));
        }
        return {lu.solve(rhs), 0, "direct"};
    }
    const RealOp a = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
        return v - op.apply(v) + Eigen::VectorXd::Constant(n, v.mean());
    };
    UlamDeflated out;
    out.method = "gmres";
    out.x = gmres(a, rhs, 1e-14, 80, 4000, out.iterations);
    if (l1_mean(a(out.x) - rhs) > 1e-10 * std::max(1.0, l1_mean(rhs))) {
        throw ConvergenceError(
            fmt::format("GMRES on the deflated system did not converge in {} iterations",
                        out.iterations));
    }
    return out;
}

/// Solves (Id - M + e0 e0^T) x = rhs for the k = 0 unit vector e0.
Eigen::VectorXcd solve_fourier_deflated(const FourierOperator& op, const Eigen::VectorXcd& rhs) {
    const int size = op.size();
    const int zero = op.modes();
    Eigen::MatrixXcd a = -op.matrix();
    a.diagonal().array() += 1.0;
    a(zero, zero) += 1.0;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a);
    if (!(lu.rcond() > 1e-14)) {
        throw ConvergenceError(fmt::format(
            "deflated Fourier system of size {} is singular (rcond {:.3g})", size, lu.rcond()));
    }
    return lu.solve(rhs);
}

StationaryResult stationary_ulam(const TransferMatrix& top, double tol, int max_iter) {
    const UlamOperator& op = top.ulam();
    const int n = op.size();
    SolveReport report;
    Eigen::VectorXd h = Eigen::VectorXd::Ones(n);
    double previous = 0.0;
    double residual = 0.0;
    bool converged = false;
    for (int it = 1; it <= max_iter; ++it) {
        Eigen::VectorXd next = op.apply(h);
        next /= next.mean();
        residual = l1_mean(next - h);
        if (previous > 0.0 && residual > 0.0) report.contraction_ratio = residual / previous;
        previous = residual;
        h.swap(next);
        report.iterations = it;
        if (residual < tol) {
            converged = true;
            break;
        }
        if (it >= kStallCheck && report.contraction_ratio > kStallRatio) break;
    }
    if (!converged) {
        try {
            const UlamDeflated d = solve_ulam_deflated(op, Eigen::VectorXd::Ones(n));
            h = d.x / d.x.mean();
            report.method = d.method;
            report.iterations += d.iterations;
        } catch (const ConvergenceError& e) {
            throw ConvergenceError(fmt::format(
                "power iteration stopped after {} iterations with residual {:.3g} and "
                "contraction ratio {:.6f}; fallback failed: {}",
                report.iterations, residual, report.contraction_ratio, e.what()));
        }
    }

    report.min_value = h.minCoeff();
    if (report.min_value < 0.0) {
        double removed = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (h(i) < 0.0) {
                removed -= h(i);
                h(i) = 0.0;
            }
        }
        report.clip_magnitude = removed / n;
        h /= h.mean();
    }
    const Eigen::VectorXd lh = op.apply(h);
    report.final_residual = l1_mean(lh - h);
    report.normalization_defect = std::abs(lh.mean() - h.mean());
    if (!(report.final_residual <= std::max(tol, 1e-13))) {
        throw ConvergenceError(fmt::format(
            "stationary density residual {:.3g} above tolerance {:.3g} (method {}, contraction "
            "ratio {:.6f})",
            report.final_residual, tol, report.method, report.contraction_ratio));
    }
    return {BinDensity(std::vector<double>(h.data(), h.data() + n)), report};
}

StationaryResult stationary_fourier(const TransferMatrix& top, double tol, int max_iter) {
    const FourierOperator& op = top.fourier();
    const int modes = op.modes();
    SolveReport report;
    Eigen::VectorXcd h = Eigen::VectorXcd::Zero(op.size());
    h(modes) = 1.0;
    double previous = 0.0;
    double residual = 0.0;
    bool converged = false;
    for (int it = 1; it <= max_iter; ++it) {
        Eigen::VectorXcd next = op.matrix() * h;
        next /= next(modes).real();
        residual = coefficient_l1(next - h);
        if (previous > 0.0 && residual > 0.0) report.contraction_ratio = residual / previous;
        previous = residual;
        h.swap(next);
        report.iterations = it;
        if (residual < tol) {
            converged = true;
            break;
        }
        if (it >= kStallCheck && report.contraction_ratio > kStallRatio) break;
    }
    if (!converged) {
        Eigen::VectorXcd e0 = Eigen::VectorXcd::Zero(op.size());
        e0(modes) = 1.0;
        try {
            h = solve_fourier_deflated(op, e0);
        } catch (const ConvergenceError& e) {
            throw ConvergenceError(fmt::format(
                "power iteration stopped after {} iterations with residual {:.3g} and "
                "contraction ratio {:.6f}; fallback failed: {}",
                report.iterations, residual, report.contraction_ratio, e.what()));
        }
        h /= h(modes).real();
        report.method = "direct";
    }
    // Real densities have conjugate-symmetric coefficients; remove roundoff drift.
    for (int k = 1; k <= modes; ++k) {
        const std::complex<double> avg = 0.5 * (h(modes + k) + std::conj(h(modes - k)));
        h(modes + k) = avg;
        h(modes - k) = std::conj(avg);
    }
    h(modes) = 1.0;

    FourierDensity density(modes, h);
    const FourierDensity lh = op.apply(density);
    report.final_residual = l1_norm(lh - density);
    report.normalization_defect = std::abs(lh.mass() - density.mass());
    const auto samples = density.sample(fourier_norm_samples(modes));
    report.min_value = *std::min_element(samples.begin(), samples.end());
    if (!(report.final_residual <= std::max(tol, 1e-13))) {
        throw ConvergenceError(fmt::format(
            "stationary density residual {:.3g} above tolerance {:.3g} (method {}, contraction "
            "ratio {:.6f})",
            report.final_residual, tol, report.method, report.contraction_ratio));
    }
    return {std::move(density), report};
}

}  // namespace

StationaryResult stationary_density(const TransferMatrix& op, double tol, int max_iter) {
    if (!(tol >= 1e-13)) throw ValidationError(fmt::format("tolerance {} below 1e-13", tol));
    if (max_iter < 1) throw ValidationError("max_iter must be positive");
    return op.backend() == Backend::ulam ? stationary_ulam(op, tol, max_iter)
                                         : stationary_fourier(op, tol, max_iter);
}

ResolventResult resolvent_apply(const TransferMatrix& op, const DensityGrid& g) {
    const double m = mass(g);
    if (std::abs(m) > 1e-9) {
        throw ValidationError(
            fmt::format("resolvent_apply: right-hand side has mass {:.3g}, expected 0", m));
    }
    ResolventResult out;
    if (op.backend() == Backend::ulam) {
        const auto& bins = std::get<BinDensity>(g);
        const UlamOperator& u = op.ulam();
        if (bins.size() != u.size()) throw ValidationError("resolvent_apply: size mismatch");
        const Eigen::VectorXd rhs =
            Eigen::Map<const Eigen::VectorXd>(bins.values().data(), bins.size());
        const UlamDeflated d = solve_ulam_deflated(u, rhs);
        Eigen::VectorXd x = d.x.array() - d.x.mean();
        out.residual = l1_mean(x - u.apply(x) - rhs);
        out.iterations = d.iterations;
        out.solution = BinDensity(std::vector<double>(x.data(), x.data() + x.size()));
        return out;
    }
    const auto& f = std::get<FourierDensity>(g);
    const FourierOperator& fop = op.fourier();
    if (f.modes() != fop.modes()) throw ValidationError("resolvent_apply: mode count mismatch");
    Eigen::VectorXcd x = solve_fourier_deflated(fop, f.coefficients());
    x(fop.modes()) = 0.0;
    FourierDensity u(fop.modes(), x);
    out.residual = l1_norm(u - fop.apply(u) - f);
    out.solution = std::move(u);
    return out;
}

EquilibriumRate equilibrium_rate(const TransferMatrix& op, int trials, int n_max) {
    if (trials < 3) throw ValidationError("equilibrium_rate: need at least 3 trials");
    if (n_max < 2) throw ValidationError("equilibrium_rate: n_max must be at least 2");
    const Backend backend = op.backend();
    const int res = op.resolution();

    std::vector<double> worst(static_cast<std::size_t>(n_max) + 1, 0.0);
    for (int t = 0; t < trials; ++t) {
        const double freq = std::ldexp(1.0, t);
        const double phase = 0.7 * t;
        auto f = [=](double x) { return std::cos(2.0 * std::numbers::pi * freq * x + phase); };
        DensityGrid g = discretize(f, backend, res);
        double strength = 0.0;
        if (auto* b = std::get_if<BinDensity>(&g)) {
            const double mean = b->mass();
            for (double& v : b->data()) v -= mean;
            strength = variation(*b);
        } else {
            auto& fd = std::get<FourierDensity>(g);
            fd.coeff(0) = 0.0;
            strength = l1_norm(fd.derivative(1));
        }
        if (!(strength > 1e-12)) continue;  // unresolved at this resolution
        for (int n = 0; n <= n_max; ++n) {
            const double v =
                std::visit([](const auto& d) { return l1_norm(d); }, g) / strength;
            worst[static_cast<std::size_t>(n)] = std::max(worst[static_cast<std::size_t>(n)], v);
            if (n < n_max) g = op.apply(g);
        }
    }

    EquilibriumRate out;
    const double floor = 1e-12 * worst[0];
    std::vector<double> xs;
    std::vector<double> ys;
    for (int n = 0; n <= n_max; ++n) {
        const double v = worst[static_cast<std::size_t>(n)];
        if (v > floor && v > 0.0) {
            xs.push_back(n);
            ys.push_back(std::log(v));
        }
    }
    out.points = static_cast<int>(xs.size());
    if (xs.size() < 2) {
        out.rate = 0.0;
        out.prefactor = worst[0];
        out.diagnostic = "fewer than two iterates above the noise floor; decay faster than any fit";
        return out;
    }
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(ys.size());
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    out.rate = std::exp(sxy / sxx);
    if (out.rate >= 1.0 - 1e-9) {
        out.rate = std::max(out.rate, 1.0);
        out.diagnostic = "no decay: norms of iterates do not shrink";
    }
    for (std::size_t i = 0; i < xs.size(); ++i) {
        out.prefactor = std::max(out.prefactor, std::exp(ys[i]) / std::pow(out.rate, xs[i]));
    }
    return out;
}

Eigen::VectorXd stationary_vector(const Eigen::MatrixXd& markov) {
    const UlamOperator op = UlamOperator::from_matrix(markov);
    const Eigen::Index d = markov.rows();
    const UlamDeflated sol = solve_ulam_deflated(op, Eigen::VectorXd::Ones(d));
    return sol.x / sol.x.sum();
}

Eigen::VectorXd markov_resolvent(const Eigen::MatrixXd& markov, const Eigen::VectorXd& g) {
    if (std::abs(g.sum()) > 1e-9 * std::max(1.0, g.cwiseAbs().sum())) {
        throw ValidationError(
            fmt::format("markov_resolvent: right-hand side sums to {:.3g}, expected 0", g.sum()));
    }
    const UlamOperator op = UlamOperator::from_matrix(markov);
    const UlamDeflated sol = solve_ulam_deflated(op, g);
    return sol.x.array() - sol.x.mean();
}

}  // namespace zeronoise
