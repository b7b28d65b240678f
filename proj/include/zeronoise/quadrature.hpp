#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace zeronoise {

/// Gauss-Legendre rule on [-1, 1] with composite integration over panels.
class GaussLegendre {
public:
    explicit GaussLegendre(int order);

    int order() const noexcept { return static_cast<int>(nodes_.size()); }
    std::span<const double> nodes() const noexcept { return nodes_; }
    std::span<const double> weights() const noexcept { return weights_; }

    /// Integrates f over [a, b] split into `panels` equal sub-intervals.
    template <class F>
    auto integrate(F&& f, double a, double b, int panels = 1) const {
        using R = decltype(f(a));
        R total{};
        const double width = (b - a) / panels;
        for (int p = 0; p < panels; ++p) {
            const double lo = a + p * width;
            const double mid = lo + 0.5 * width;
            const double half = 0.5 * width;
            R panel{};
            for (std::size_t i = 0; i < nodes_.size(); ++i) {
                panel += weights_[i] * f(mid + half * nodes_[i]);
            }
            total += half * panel;
        }
        return total;
    }

private:
    std::vector<double> nodes_;
    std::vector<double> weights_;
};

}  // namespace zeronoise
