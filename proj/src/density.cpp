#include "zeronoise/density.hpp"

#include "zeronoise/errors.hpp"
#include "zeronoise/quadrature.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <functional>
#include <cmath>
#include <numbers>
#include <numeric>

namespace zeronoise {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double sinc(double u) { return u == 0.0 ? 1.0 : std::sin(u) / u; }

void require_same_size(std::size_t a, std::size_t b) {
    if (a != b) throw ValidationError(fmt::format("density size mismatch: {} vs {}", a, b));
}

std::vector<double> forward_difference(std::span<const double> v) {
    const std::size_t n = v.size();
    const double scale = static_cast<double>(n);
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = (v[(i + 1) % n] - v[i]) * scale;
    return d;
}

/// Neumaier-compensated mean of |v|.
double mean_abs(std::span<const double> v) {
    double total = 0.0;
    double carry = 0.0;
    for (double x : v) {
        const double a = std::abs(x);
        const double t = total + a;
        carry += std::abs(total) >= a ? (total - t) + a : (a - t) + total;
        total = t;
    }
    return (total + carry) / static_cast<double>(v.size());
}

double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

/// Table of exp(2 pi i j / M) for j < M; index arithmetic mod M keeps
/// every phase exact.
const std::vector<std::complex<double>>& roots_of_unity(int m) {
    thread_local int cached = 0;
    thread_local std::vector<std::complex<double>> table;
    if (cached != m) {
        table.resize(static_cast<std::size_t>(m));
        for (int j = 0; j < m; ++j) table[static_cast<std::size_t>(j)] = std::polar(1.0, kTwoPi * j / m);
        cached = m;
    }
    return table;
}

/// Sum over |k| <= N of c_k w_k e^{2 pi i k x}, powers by recurrence.
double eval_weighted(const FourierDensity& g, double x, const std::function<std::complex<double>(int)>& w) {
    const std::complex<double> z = std::polar(1.0, kTwoPi * x);
    std::complex<double> up = 1.0;
    std::complex<double> sum = g.coeff(0) * w(0);
    for (int k = 1; k <= g.modes(); ++k) {
        up *= z;
        sum += g.coeff(k) * w(k) * up + g.coeff(-k) * w(-k) * std::conj(up);
    }
    return sum.real();
}

/// Integral of |G'| over the circle, G = periodic part of `anti` plus slope x.
/// Zeros of G' are bracketed on the samples and refined; between zeros
/// |G'| integrates to |G(b) - G(a)| exactly.
double abs_integral(const FourierDensity& anti, double slope, int order,
                    std::span<const double> samples) {
    const int m = static_cast<int>(samples.size());
    auto deriv_weight = [](int j) {
        return [j](int k) {
            std::complex<double> w = 1.0;
            for (int i = 0; i < j; ++i) w *= std::complex<double>(0.0, kTwoPi * k);
            return w;
        };
    };
    const auto w1 = deriv_weight(order);
    const auto w2 = deriv_weight(order + 1);
    auto f = [&](double x) { return eval_weighted(anti, x, w1) + slope; };
    auto fp = [&](double x) { return eval_weighted(anti, x, w2); };
    auto G = [&](double x) { return eval_weighted(anti, x, deriv_weight(order - 1)) + slope * x; };

    std::vector<double> zeros;
    for (int j = 0; j < m; ++j) {
        const double sa = samples[static_cast<std::size_t>(j)];
        const double sb = samples[static_cast<std::size_t>((j + 1) % m)];
        if ((sa >= 0.0) == (sb >= 0.0)) continue;
        double a = static_cast<double>(j) / m;
        double b = static_cast<double>(j + 1) / m;
        double fa = sa;
        double x = a + (b - a) * sa / (sa - sb);
        for (int it = 0; it < 60 && b - a > 4e-16; ++it) {
            const double fx = f(x);
            if (fx == 0.0) break;
            if ((fx >= 0.0) == (fa >= 0.0)) {
                a = x;
                fa = fx;
            } else {
                b = x;
            }
            const double d = fp(x);
            double next = d != 0.0 ? x - fx / d : 0.5 * (a + b);
            if (!(next > a && next < b)) next = 0.5 * (a + b);
            if (std::abs(next - x) < 1e-17) break;
            x = next;
        }
        zeros.push_back(x);
    }
    if (zeros.empty()) return std::abs(G(1.0) - G(0.0));
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < zeros.size(); ++i) total += std::abs(G(zeros[i + 1]) - G(zeros[i]));
    total += std::abs(G(zeros.front() + 1.0) - G(zeros.back()));
    return total;
}

/// Integral of |g^(order)| over the circle.
double fourier_abs_integral(const FourierDensity& g, int order, std::span<const double> samples) {
    if (order >= 1) return abs_integral(g, 0.0, order, samples);
    FourierDensity anti(g);
    anti.coeff(0) = 0.0;
    for (int k = 1; k <= g.modes(); ++k) {
        anti.coeff(k) /= std::complex<double>(0.0, kTwoPi * k);
        anti.coeff(-k) /= std::complex<double>(0.0, -kTwoPi * k);
    }
    return abs_integral(anti, g.coeff(0).real(), 1, samples);
}

}  // namespace

// ---------------------------------------------------------------------------
// BinDensity

BinDensity::BinDensity(std::vector<double> values) : values_(std::move(values)) {}

BinDensity BinDensity::constant(int n, double value) {
    return BinDensity(std::vector<double>(static_cast<std::size_t>(n), value));
}

BinDensity BinDensity::from_function(int n, const std::function<double(double)>& f,
                                     int nodes_per_bin) {
    const GaussLegendre rule(nodes_per_bin);
    std::vector<double> values(static_cast<std::size_t>(n));
    const double h = 1.0 / n;
    for (int i = 0; i < n; ++i) {
        values[static_cast<std::size_t>(i)] = rule.integrate(f, i * h, (i + 1) * h) / h;
    }
    return BinDensity(std::move(values));
}

double BinDensity::mass() const {
    return std::accumulate(values_.begin(), values_.end(), 0.0) /
           static_cast<double>(values_.size());
}

BinDensity& BinDensity::operator+=(const BinDensity& other) {
    require_same_size(values_.size(), other.values_.size());
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
    return *this;
}

BinDensity& BinDensity::operator-=(const BinDensity& other) {
    require_same_size(values_.size(), other.values_.size());
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
    return *this;
}

BinDensity& BinDensity::operator*=(double s) {
    for (double& v : values_) v *= s;
    return *this;
}

BinDensity operator+(BinDensity a, const BinDensity& b) { return a += b; }
BinDensity operator-(BinDensity a, const BinDensity& b) { return a -= b; }
BinDensity operator*(double s, BinDensity a) { return a *= s; }

// ---------------------------------------------------------------------------
// FourierDensity

FourierDensity::FourierDensity(int modes)
    : modes_(modes), c_(Eigen::VectorXcd::Zero(2 * modes + 1)) {}

FourierDensity::FourierDensity(int modes, Eigen::VectorXcd coefficients)
    : modes_(modes), c_(std::move(coefficients)) {
    if (c_.size() != 2 * modes + 1) {
        throw ValidationError(fmt::format("Fourier density with {} modes needs {} coefficients",
                                          modes, 2 * modes + 1));
    }
}

FourierDensity FourierDensity::constant(int modes, double value) {
    FourierDensity g(modes);
    g.coeff(0) = value;
    return g;
}

FourierDensity FourierDensity::from_function(int modes, const std::function<double(double)>& f,
                                             int quad_points) {
    if (quad_points <= 0) quad_points = fourier_norm_samples(modes);
    const auto& w = roots_of_unity(quad_points);
    std::vector<double> values(static_cast<std::size_t>(quad_points));
    for (int j = 0; j < quad_points; ++j) {
        values[static_cast<std::size_t>(j)] = f(static_cast<double>(j) / quad_points);
    }
    FourierDensity g(modes);
    for (int k = -modes; k <= modes; ++k) {
        std::complex<double> sum = 0.0;
        for (int j = 0; j < quad_points; ++j) {
            const long idx = (static_cast<long>(-k) * j) % quad_points;
            sum += values[static_cast<std::size_t>(j)] *
                   w[static_cast<std::size_t>(idx < 0 ? idx + quad_points : idx)];
        }
        g.coeff(k) = sum / static_cast<double>(quad_points);
    }
    return g;
}

FourierDensity FourierDensity::derivative(int order) const {
    FourierDensity d(*this);
    for (int k = -modes_; k <= modes_; ++k) {
        d.coeff(k) *= std::pow(std::complex<double>(0.0, kTwoPi * k), order);
    }
    return d;
}

double FourierDensity::operator()(double x) const {
    std::complex<double> sum = 0.0;
    for (int k = -modes_; k <= modes_; ++k) sum += coeff(k) * std::polar(1.0, kTwoPi * k * x);
    return sum.real();
}

std::vector<double> FourierDensity::sample(int samples) const {
    const auto& w = roots_of_unity(samples);
    std::vector<double> out(static_cast<std::size_t>(samples));
    for (int j = 0; j < samples; ++j) {
        std::complex<double> sum = 0.0;
        for (int k = -modes_; k <= modes_; ++k) {
            const long idx = (static_cast<long>(k) * j) % samples;
            sum += coeff(k) * w[static_cast<std::size_t>(idx < 0 ? idx + samples : idx)];
        }
        out[static_cast<std::size_t>(j)] = sum.real();
    }
    return out;
}

FourierDensity& FourierDensity::operator+=(const FourierDensity& other) {
    require_same_size(static_cast<std::size_t>(c_.size()), static_cast<std::size_t>(other.c_.size()));
    c_ += other.c_;
    return *this;
}

FourierDensity& FourierDensity::operator-=(const FourierDensity& other) {
    require_same_size(static_cast<std::size_t>(c_.size()), static_cast<std::size_t>(other.c_.size()));
    c_ -= other.c_;
    return *this;
}

FourierDensity& FourierDensity::operator*=(double s) {
    c_ *= s;
    return *this;
}

FourierDensity operator+(FourierDensity a, const FourierDensity& b) { return a += b; }
FourierDensity operator-(FourierDensity a, const FourierDensity& b) { return a -= b; }
FourierDensity operator*(double s, FourierDensity a) { return a *= s; }

// ---------------------------------------------------------------------------
// Norms

double Norms::sobolev(int k) const {
    switch (k) {
        case 0: return l1;
        case 1: return w11;
        case 2: return w21;
        case 3: return w31;
        default: throw ValidationError("Sobolev order must lie in [0, 3]");
    }
}

int fourier_norm_samples(int modes) {
    int m = 8192;
    while (m < 16 * (2 * modes + 1)) m *= 2;
    return m;
}

Norms norms(const BinDensity& g) {
    Norms out;
    std::vector<double> d0(g.values().begin(), g.values().end());
    const auto d1 = forward_difference(d0);
    const auto d2 = forward_difference(d1);
    const auto d3 = forward_difference(d2);
    out.l1 = mean_abs(d0);
    const double s1 = mean_abs(d1);
    out.w11 = out.l1 + s1;
    out.w21 = out.w11 + mean_abs(d2);
    out.w31 = out.w21 + mean_abs(d3);
    out.bv = s1;
    out.lip = max_abs(d1);
    return out;
}

Norms norms(const FourierDensity& g) {
    const int m = fourier_norm_samples(g.modes());
    Norms out;
    const auto v0 = g.sample(m);
    const auto v1 = g.derivative(1).sample(m);
    const auto v2 = g.derivative(2).sample(m);
    const auto v3 = g.derivative(3).sample(m);
    out.l1 = fourier_abs_integral(g, 0, v0);
    const double s1 = fourier_abs_integral(g, 1, v1);
    out.w11 = out.l1 + s1;
    out.w21 = out.w11 + fourier_abs_integral(g, 2, v2);
    out.w31 = out.w21 + fourier_abs_integral(g, 3, v3);
    out.bv = s1;
    out.lip = max_abs(v1);
    return out;
}

Norms norms(const DensityGrid& g) {
    return std::visit([](const auto& d) { return norms(d); }, g);
}

double l1_norm(const BinDensity& g) { return mean_abs(g.values()); }

double l1_norm(const FourierDensity& g) {
    return fourier_abs_integral(g, 0, g.sample(fourier_norm_samples(g.modes())));
}

double sobolev_norm(const BinDensity& g, int k) {
    if (k < 0 || k > 3) throw ValidationError("Sobolev order must lie in [0, 3]");
    std::vector<double> d(g.values().begin(), g.values().end());
    double total = mean_abs(d);
    for (int j = 1; j <= k; ++j) {
        d = forward_difference(d);
        total += mean_abs(d);
    }
    return total;
}

double sobolev_norm(const FourierDensity& g, int k) {
    if (k < 0 || k > 3) throw ValidationError("Sobolev order must lie in [0, 3]");
    const int m = fourier_norm_samples(g.modes());
    double total = 0.0;
    for (int j = 0; j <= k; ++j) total += fourier_abs_integral(g, j, g.derivative(j).sample(m));
    return total;
}

double variation(const BinDensity& g) {
    const auto v = g.values();
    const std::size_t n = v.size();
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += std::abs(v[(i + 1) % n] - v[i]);
    return total;
}

double lipschitz_constant(const BinDensity& g) {
    const auto v = g.values();
    const std::size_t n = v.size();
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(v[(i + 1) % n] - v[i]));
    return m * static_cast<double>(n);
}

BinDensity to_bins(const FourierDensity& g, int bins) {
    std::vector<double> values(static_cast<std::size_t>(bins));
    const auto& w = roots_of_unity(2 * bins);  // bin centers are odd multiples of 1/(2 bins)
    std::vector<double> damping(static_cast<std::size_t>(g.modes() + 1));
    for (int k = 0; k <= g.modes(); ++k) {
        damping[static_cast<std::size_t>(k)] = sinc(std::numbers::pi * k / bins);
    }
    for (int i = 0; i < bins; ++i) {
        std::complex<double> sum = g.coeff(0);
        for (int k = 1; k <= g.modes(); ++k) {
            const long idx = (static_cast<long>(k) * (2 * i + 1)) % (2 * bins);
            const auto phase = w[static_cast<std::size_t>(idx)];
            sum += damping[static_cast<std::size_t>(k)] *
                   (g.coeff(k) * phase + g.coeff(-k) * std::conj(phase));
        }
        values[static_cast<std::size_t>(i)] = sum.real();
    }
    return BinDensity(std::move(values));
}

FourierDensity to_fourier(const BinDensity& g, int modes) {
    const int n = g.size();
    const auto& w = roots_of_unity(2 * n);
    FourierDensity out(modes);
    for (int k = -modes; k <= modes; ++k) {
        std::complex<double> sum = 0.0;
        for (int i = 0; i < n; ++i) {
            long idx = (static_cast<long>(-k) * (2 * i + 1)) % (2 * n);
            if (idx < 0) idx += 2 * n;
            sum += g[i] * w[static_cast<std::size_t>(idx)];
        }
        out.coeff(k) = sum * sinc(std::numbers::pi * k / n) / static_cast<double>(n);
    }
    out.coeff(0) = g.mass();
    return out;
}

BinDensity coarse_grain(const BinDensity& g, int bins) {
    if (bins <= 0 || g.size() % bins != 0) {
        throw ValidationError(
            fmt::format("coarse_grain: {} bins do not divide {} bins", bins, g.size()));
    }
    const int group = g.size() / bins;
    std::vector<double> values(static_cast<std::size_t>(bins), 0.0);
    for (int i = 0; i < g.size(); ++i) values[static_cast<std::size_t>(i / group)] += g[i];
    for (double& v : values) v /= group;
    return BinDensity(std::move(values));
}

double mass(const DensityGrid& g) {
    return std::visit([](const auto& d) { return d.mass(); }, g);
}

}  // namespace zeronoise
