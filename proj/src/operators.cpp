#include "zeronoise/operators.hpp"

#include "zeronoise/errors.hpp"
#include "zeronoise/quadrature.hpp"

#include <fmt/format.h>
#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace zeronoise {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double frac(double v) {
    const double f = v - std::floor(v);
    return f >= 1.0 ? 0.0 : f;
}

int wrap(long i, int n) {
    const long r = i % n;
    return static_cast<int>(r < 0 ? r + n : r);
}

void apply_circulant(const Circulant& c, const double* in, double* out, int n) {
    std::fill(out, out + n, 0.0);
    const int width = static_cast<int>(c.coefficients.size());
    for (int t = 0; t < width; ++t) {
        const double w = c.coefficients[static_cast<std::size_t>(t)];
        if (w == 0.0) continue;
        // out_i += w g_{i - d}; split the wrapped index range into two loops.
        const int shift = wrap(-(c.first + t), n);
        const int head = n - shift;
        for (int i = 0; i < head; ++i) out[i] += w * in[i + shift];
        for (int i = head; i < n; ++i) out[i] += w * in[i + shift - n];
    }
}

}  // namespace

std::string to_string(OperatorKind kind) {
    switch (kind) {
        case OperatorKind::deterministic: return "deterministic";
        case OperatorKind::convolution: return "convolution";
        case OperatorKind::composed: return "composed";
        case OperatorKind::generic: return "generic";
    }
    return "generic";
}

std::string to_string(Backend backend) { return backend == Backend::ulam ? "ulam" : "fourier"; }

Backend backend_from_string(const std::string& name) {
    if (name == "ulam") return Backend::ulam;
    if (name == "fourier") return Backend::fourier;
    throw ValidationError(fmt::format("unknown backend '{}' (expected ulam or fourier)", name));
}

// ---------------------------------------------------------------------------
// UlamOperator

UlamOperator::UlamOperator(int n, std::optional<Eigen::SparseMatrix<double>> transfer,
                           std::optional<Circulant> convolution)
    : n_(n), transfer_(std::move(transfer)), convolution_(std::move(convolution)) {
    if (transfer_ && (transfer_->rows() != n || transfer_->cols() != n)) {
        throw ValidationError("Ulam transfer matrix has the wrong size");
    }
}

UlamOperator UlamOperator::from_matrix(Eigen::MatrixXd matrix) {
    if (matrix.rows() != matrix.cols() || matrix.rows() == 0) {
        throw ValidationError("Markov matrix must be square and non-empty");
    }
    for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
        if (std::abs(matrix.col(j).sum() - 1.0) > 1e-9 || matrix.col(j).minCoeff() < 0.0) {
            throw ValidationError(
                fmt::format("Markov matrix column {} is not a probability vector", j));
        }
    }
    UlamOperator op(static_cast<int>(matrix.rows()), std::nullopt, std::nullopt);
    op.generic_ = std::move(matrix);
    return op;
}

Eigen::VectorXd UlamOperator::apply(const Eigen::VectorXd& v) const {
    if (v.size() != n_) throw ValidationError("Ulam operator applied to a vector of wrong size");
    if (generic_) return *generic_ * v;
    Eigen::VectorXd mid = transfer_ ? Eigen::VectorXd(*transfer_ * v) : v;
    if (!convolution_) return mid;
    Eigen::VectorXd out(n_);
    apply_circulant(*convolution_, mid.data(), out.data(), n_);
    return out;
}

BinDensity UlamOperator::apply(const BinDensity& g) const {
    const Eigen::Map<const Eigen::VectorXd> v(g.values().data(), g.size());
    const Eigen::VectorXd out = apply(Eigen::VectorXd(v));
    return BinDensity(std::vector<double>(out.data(), out.data() + out.size()));
}

Eigen::MatrixXd UlamOperator::dense() const {
    if (generic_) return *generic_;
    Eigen::MatrixXd p = transfer_ ? Eigen::MatrixXd(*transfer_)
                                  : Eigen::MatrixXd(Eigen::MatrixXd::Identity(n_, n_));
    if (!convolution_) return p;
    Eigen::MatrixXd out(n_, n_);
    for (int j = 0; j < n_; ++j) apply_circulant(*convolution_, p.col(j).data(), out.col(j).data(), n_);
    return out;
}

// ---------------------------------------------------------------------------
// FourierOperator

FourierOperator::FourierOperator(int modes, Eigen::MatrixXcd matrix)
    : modes_(modes), matrix_(std::move(matrix)) {
    if (matrix_.rows() != size() || matrix_.cols() != size()) {
        throw ValidationError("Fourier operator matrix has the wrong size");
    }
}

FourierDensity FourierOperator::apply(const FourierDensity& g) const {
    if (g.modes() != modes_) {
        throw ValidationError(
            fmt::format("Fourier operator with {} modes applied to density with {} modes", modes_,
                        g.modes()));
    }
    return FourierDensity(modes_, matrix_ * g.coefficients());
}

// ---------------------------------------------------------------------------
// TransferMatrix

TransferMatrix::TransferMatrix(UlamOperator op, OperatorInfo info)
    : op_(std::move(op)), info_(std::move(info)) {}

TransferMatrix::TransferMatrix(FourierOperator op, OperatorInfo info)
    : op_(std::move(op)), info_(std::move(info)) {}

Backend TransferMatrix::backend() const noexcept {
    return std::holds_alternative<UlamOperator>(op_) ? Backend::ulam : Backend::fourier;
}

int TransferMatrix::resolution() const noexcept {
    if (const auto* u = std::get_if<UlamOperator>(&op_)) return u->size();
    return std::get<FourierOperator>(op_).modes();
}

int TransferMatrix::dimension() const noexcept {
    if (const auto* u = std::get_if<UlamOperator>(&op_)) return u->size();
    return std::get<FourierOperator>(op_).size();
}

const UlamOperator& TransferMatrix::ulam() const {
    if (const auto* u = std::get_if<UlamOperator>(&op_)) return *u;
    throw UnsupportedError("operator is not in the Ulam representation");
}

const FourierOperator& TransferMatrix::fourier() const {
    if (const auto* f = std::get_if<FourierOperator>(&op_)) return *f;
    throw UnsupportedError("operator is not in the Fourier representation");
}

BinDensity TransferMatrix::apply(const BinDensity& g) const { return ulam().apply(g); }

FourierDensity TransferMatrix::apply(const FourierDensity& g) const { return fourier().apply(g); }

DensityGrid TransferMatrix::apply(const DensityGrid& g) const {
    return std::visit([this](const auto& d) -> DensityGrid { return apply(d); }, g);
}

TransferMatrix identity_operator(Backend backend, int resolution) {
    OperatorInfo info;
    info.kind = OperatorKind::convolution;
    info.kernel_name = "dirac";
    if (backend == Backend::ulam) {
        return TransferMatrix(UlamOperator(resolution, std::nullopt, std::nullopt), info);
    }
    const int size = 2 * resolution + 1;
    return TransferMatrix(
        FourierOperator(resolution, Eigen::MatrixXcd::Identity(size, size)), info);
}

// ---------------------------------------------------------------------------
// Assembly

TransferMatrix assemble_ulam(const CircleMap& map, int n) {
    if (n < 2) throw ValidationError(fmt::format("assemble_ulam: n = {} must be at least 2", n));
    const double h = 1.0 / n;
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(4 * n));

    std::vector<double> cuts;
    for (const Branch& b : map.branches()) {
        cuts.clear();
        // Domain bin boundaries inside the branch.
        cuts.push_back(b.lo);
        for (long j = static_cast<long>(std::floor(b.lo * n)) + 1; j * h < b.hi; ++j) {
            cuts.push_back(static_cast<double>(j) * h);
        }
        cuts.push_back(b.hi);
        // Preimages of image bin boundaries.
        const double ylo = b.image_lo();
        const double yhi = b.image_hi();
        for (long k = static_cast<long>(std::ceil(ylo * n)); static_cast<double>(k) * h <= yhi;
             ++k) {
            cuts.push_back(branch_inverse(b, static_cast<double>(k) * h));
        }
        std::sort(cuts.begin(), cuts.end());

        for (std::size_t t = 0; t + 1 < cuts.size(); ++t) {
            const double u = cuts[t];
            const double v = cuts[t + 1];
            if (v <= u) continue;
            const double mid = 0.5 * (u + v);
            const double y = b.lift()(mid);
            if (!std::isfinite(y)) {
                throw Error(fmt::format("assemble_ulam: map '{}' is not finite on bin {}",
                                        map.name(), static_cast<int>(mid * n)));
            }
            const int j = std::min(n - 1, static_cast<int>(mid * n));
            const int i = std::min(n - 1, static_cast<int>(frac(y) * n));
            triplets.emplace_back(i, j, (v - u) * n);
        }
    }
    Eigen::SparseMatrix<double> p(n, n);
    p.setFromTriplets(triplets.begin(), triplets.end());
    p.makeCompressed();

    OperatorInfo info;
    info.kind = OperatorKind::deterministic;
    info.map_name = map.name();
    return TransferMatrix(UlamOperator(n, std::move(p), std::nullopt), info);
}

TransferMatrix assemble_fourier(const CircleMap& map, int modes, int quad_points) {
    if (map.kind() != MapKind::smooth) {
        throw UnsupportedError(
            fmt::format("assemble_fourier: map '{}' is piecewise; use the Ulam backend", map.name()));
    }
    if (modes < 1) throw ValidationError("assemble_fourier: need at least one mode");
    if (quad_points == 0) quad_points = 16 * modes;
    if (quad_points < 8 * modes) {
        throw ResolutionError(fmt::format(
            "assemble_fourier: {} quadrature points for {} modes; need at least {}", quad_points,
            modes, 8 * modes));
    }

    const int size = 2 * modes + 1;
    auto build = [&](int q) {
        std::vector<double> t(static_cast<std::size_t>(q));
        for (int j = 0; j < q; ++j) t[static_cast<std::size_t>(j)] = map(static_cast<double>(j) / q);
        Eigen::FFT<double> fft;
        Eigen::MatrixXcd m(size, size);
        std::vector<std::complex<double>> a(static_cast<std::size_t>(q));
        std::vector<std::complex<double>> b;
        for (int k = -modes; k <= modes; ++k) {
            for (int j = 0; j < q; ++j) {
                a[static_cast<std::size_t>(j)] =
                    std::polar(1.0, -kTwoPi * frac(k * t[static_cast<std::size_t>(j)]));
            }
            // inv computes (1/q) sum_j a_j exp(2 pi i j m / q).
            fft.inv(b, a);
            for (int mm = -modes; mm <= modes; ++mm) {
                m(k + modes, mm + modes) = b[static_cast<std::size_t>(wrap(mm, q))];
            }
        }
        m.row(modes).setZero();
        m(modes, modes) = 1.0;
        return m;
    };

    Eigen::MatrixXcd m = build(quad_points);
    const Eigen::MatrixXcd fine = build(2 * quad_points);
    const double change = (fine - m).cwiseAbs().maxCoeff();
    if (change > 1e-8) {
        throw ResolutionError(fmt::format(
            "assemble_fourier: {} quadrature points alias for map '{}' (entries move by {:.3g} "
            "when doubled)",
            quad_points, map.name(), change));
    }

    OperatorInfo info;
    info.kind = OperatorKind::deterministic;
    info.map_name = map.name();
    return TransferMatrix(FourierOperator(modes, std::move(m)), info);
}

Circulant ulam_stencil(const NoiseKernel& kernel, double delta, int n) {
    const ScaledKernel rho = rescale(kernel, delta);
    const double h = 1.0 / n;
    const double lo = rho.support_lo();
    const double hi = rho.support_hi();
    const int dmin = static_cast<int>(std::floor(lo / h)) - 1;
    const int dmax = static_cast<int>(std::ceil(hi / h)) + 1;
    static const GaussLegendre rule(8);

    std::vector<double> knots = rho.pieces();
    Circulant c;
    c.first = dmin;
    c.coefficients.assign(static_cast<std::size_t>(dmax - dmin + 1), 0.0);
    std::vector<double> cuts;
    for (int d = dmin; d <= dmax; ++d) {
        const double a = std::max(lo, (d - 1) * h);
        const double b = std::min(hi, (d + 1) * h);
        if (b <= a) continue;
        cuts.assign({a, b});
        if (d * h > a && d * h < b) cuts.push_back(d * h);
        for (double k : knots) {
            if (k > a && k < b) cuts.push_back(k);
        }
        std::sort(cuts.begin(), cuts.end());
        double total = 0.0;
        for (std::size_t t = 0; t + 1 < cuts.size(); ++t) {
            total += rule.integrate(
                [&](double s) { return rho(s) * std::max(0.0, 1.0 - std::abs(s - d * h) / h); },
                cuts[t], cuts[t + 1]);
        }
        c.coefficients[static_cast<std::size_t>(d - dmin)] = total;
    }
    // Trim zero tails, then fold offsets larger than the circle.
    while (!c.coefficients.empty() && c.coefficients.back() == 0.0) c.coefficients.pop_back();
    std::size_t lead = 0;
    while (lead < c.coefficients.size() && c.coefficients[lead] == 0.0) ++lead;
    c.coefficients.erase(c.coefficients.begin(), c.coefficients.begin() + static_cast<long>(lead));
    c.first += static_cast<int>(lead);
    if (static_cast<int>(c.coefficients.size()) > n) {
        std::vector<double> folded(static_cast<std::size_t>(n), 0.0);
        for (std::size_t t = 0; t < c.coefficients.size(); ++t) {
            folded[static_cast<std::size_t>(wrap(c.first + static_cast<long>(t), n))] +=
                c.coefficients[t];
        }
        c.first = 0;
        c.coefficients = std::move(folded);
    }
    const double total = std::accumulate(c.coefficients.begin(), c.coefficients.end(), 0.0);
    for (double& v : c.coefficients) v /= total;
    return c;
}

TransferMatrix assemble_convolution(const NoiseKernel& kernel, double delta, Backend backend,
                                    int resolution) {
    if (!(delta >= 0.0 && delta <= 1.0)) {
        throw ValidationError(
            fmt::format("assemble_convolution: delta = {} outside [0, 1]", delta));
    }
    if (delta == 0.0) return identity_operator(backend, resolution);

    OperatorInfo info;
    info.kind = OperatorKind::convolution;
    info.kernel_name = kernel.name();
    info.delta = delta;
    if (backend == Backend::ulam) {
        info.under_resolved = delta < 0.25 / resolution;
        return TransferMatrix(
            UlamOperator(resolution, std::nullopt, ulam_stencil(kernel, delta, resolution)), info);
    }
    const auto mult = fourier_multiplier(kernel, delta, resolution);
    const int size = 2 * resolution + 1;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(size, size);
    for (int i = 0; i < size; ++i) m(i, i) = mult[static_cast<std::size_t>(i)];
    return TransferMatrix(FourierOperator(resolution, std::move(m)), info);
}

TransferMatrix compose_noisy(const TransferMatrix& transfer, const TransferMatrix& convolution) {
    if (transfer.backend() != convolution.backend() ||
        transfer.resolution() != convolution.resolution()) {
        throw ValidationError(fmt::format(
            "compose_noisy: cannot compose {} operator of resolution {} with {} operator of "
            "resolution {}",
            to_string(transfer.backend()), transfer.resolution(), to_string(convolution.backend()),
            convolution.resolution()));
    }
    OperatorInfo info = transfer.info();
    info.kind = OperatorKind::composed;
    info.kernel_name = convolution.info().kernel_name;
    info.delta = convolution.info().delta;
    info.under_resolved = convolution.info().under_resolved;

    if (transfer.backend() == Backend::fourier) {
        return TransferMatrix(FourierOperator(transfer.resolution(),
                                              convolution.fourier().matrix() *
                                                  transfer.fourier().matrix()),
                              info);
    }
    const UlamOperator& p = transfer.ulam();
    const UlamOperator& q = convolution.ulam();
    if (q.is_generic() || q.transfer() || (p.is_generic() && q.convolution()) ||
        (p.convolution() && q.convolution())) {
        // General product; only small operators reach this branch.
        return TransferMatrix(UlamOperator::from_matrix(q.dense() * p.dense()), info);
    }
    if (p.is_generic()) return TransferMatrix(p, info);
    return TransferMatrix(UlamOperator(p.size(), p.transfer(), q.convolution() ? q.convolution()
                                                                              : p.convolution()),
                          info);
}

TransferMatrix assemble_noisy(const CircleMap& map, const NoiseKernel& kernel, double delta,
                              Backend backend, int resolution) {
    const TransferMatrix lt =
        backend == Backend::ulam ? assemble_ulam(map, resolution) : assemble_fourier(map, resolution);
    return compose_noisy(lt, assemble_convolution(kernel, delta, backend, resolution));
}

DensityGrid discretize(const std::function<double(double)>& f, Backend backend, int resolution) {
    if (backend == Backend::ulam) return BinDensity::from_function(resolution, f);
    return FourierDensity::from_function(resolution, f);
}

}  // namespace zeronoise
