#pragma once

#include "zeronoise/expression.hpp"

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace zeronoise {

enum class MapKind { smooth, piecewise };

/// One monotone C^2 (or smoother) piece of a circle map.
///
/// `lift` is a real-valued function on [lo, hi]; the map sends x to
/// lift(x) mod 1. Points are assigned to branches on half-open intervals
/// [lo, hi), i.e. branches are right-continuous at breakpoints.
struct Branch {
    double lo = 0.0;
    double hi = 1.0;
    std::array<Expression, 5> derivatives{Expression::constant(0.0), Expression::constant(0.0),
                                          Expression::constant(0.0), Expression::constant(0.0),
                                          Expression::constant(0.0)};
    bool increasing = true;
    bool affine = false;

    const Expression& lift() const noexcept { return derivatives[0]; }
    double image_lo() const;  ///< min of lift over [lo, hi]
    double image_hi() const;  ///< max of lift over [lo, hi]
};

/// Solves lift(x) = target on [lo, hi] by safeguarded Newton; target must
/// lie in the closed image of the branch.
double branch_inverse(const Branch& branch, double target);

struct Evaluation {
    double value = 0.0;
    bool at_breakpoint = false;
};

struct Preimage {
    double x = 0.0;
    double abs_derivative = 0.0;
    int branch = 0;
};

struct PreimageSet {
    std::vector<Preimage> points;
    bool at_image_endpoint = false;
};

struct ExpansionEstimate {
    double value = 0.0;
    int skipped_points = 0;  ///< grid points whose orbit hit a breakpoint
};

struct TurningPointReport {
    bool found = false;
    std::vector<double> orbit;  ///< starts and ends at the same turning point
};

/// Expanding self-map of the circle R/Z, smooth or piecewise.
class CircleMap {
public:
    /// Smooth map from a lift with lift(1) - lift(0) = degree, |degree| >= 2.
    /// Throws ValidationError when the grid minimum of |T'| is not above 1
    /// (or below `min_expansion` when given) or the lift is not periodic.
    static CircleMap smooth(std::string name, const Expression& lift,
                            std::optional<double> min_expansion = std::nullopt,
                            bool real_analytic = false);

    /// Piecewise map from (left breakpoint, lift) pairs. The first breakpoint
    /// must be 0; each branch ends where the next begins and the last at 1.
    static CircleMap piecewise(std::string name,
                               const std::vector<std::pair<double, Expression>>& branches);

    const std::string& name() const noexcept { return name_; }
    MapKind kind() const noexcept { return kind_; }
    const std::vector<Branch>& branches() const noexcept { return branches_; }
    /// d_1 = 0 < ... < d_n = 1.
    std::vector<double> breakpoints() const;
    /// Breakpoints where the map or its derivative jumps; 0 stands for 0 = 1.
    const std::vector<double>& turning_points() const noexcept { return turning_points_; }
    int degree() const noexcept { return degree_; }
    bool real_analytic() const noexcept { return real_analytic_; }

    /// Index of the branch containing x in [0, 1) (right-continuous).
    std::size_t branch_index(double x) const;

    Evaluation evaluate(double x) const;
    double operator()(double x) const { return evaluate(x).value; }
    /// order-th derivative of the active branch lift, order in [1, 4].
    double derivative(double x, int order = 1) const;

    PreimageSet branch_preimages(double y) const;

private:
    CircleMap() = default;

    std::string name_;
    MapKind kind_ = MapKind::smooth;
    std::vector<Branch> branches_;
    std::vector<double> turning_points_;
    int degree_ = 0;
    bool real_analytic_ = false;
};

/// inf over 8192 grid points of |(T^k)'(x)|, chain rule along orbits.
ExpansionEstimate expansion_constant(const CircleMap& map, int k);

/// Follows every turning point for up to max_period steps, branching on
/// both one-sided continuations whenever an orbit lands on a turning point.
TurningPointReport has_periodic_turning_point(const CircleMap& map, int max_period);

/// (L_T f)(y) = sum over preimages of f(x) / |T'(x)|.
template <class F>
double transfer_pointwise(const CircleMap& map, F&& f, double y) {
    double total = 0.0;
    for (const auto& p : map.branch_preimages(y).points) total += f(p.x) / p.abs_derivative;
    return total;
}

CircleMap doubling_map();
/// T(x) = 2x + eps sin(2 pi x); expanding while 2 - 2 pi |eps| > 1.
CircleMap perturbed_doubling_map(double epsilon = 0.1);
/// x + 1/2 on [0, 1/2), 2(1 - x) on [1/2, 1): discontinuous invariant density.
CircleMap shift_fold_map();

/// Built-in map by name: doubling, perturbed_doubling, shift_fold.
CircleMap map_by_name(const std::string& name, double epsilon = 0.1);

}  // namespace zeronoise
