#include "zeronoise/circle_map.hpp"

#include "zeronoise/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace zeronoise {

namespace {

constexpr double kBreakpointTolerance = 1e-12;
constexpr int kExpansionGrid = 8192;
constexpr int kSmoothCheckGrid = 4096;

double frac(double v) {
    const double f = v - std::floor(v);
    return f >= 1.0 ? 0.0 : f;
}

double circle_distance(double a, double b) {
    const double d = frac(a - b);
    return std::min(d, 1.0 - d);
}

Branch make_branch(double lo, double hi, const Expression& lift) {
    Branch b;
    b.lo = lo;
    b.hi = hi;
    b.derivatives[0] = lift;
    for (int k = 1; k < 5; ++k) b.derivatives[k] = b.derivatives[k - 1].derivative();
    b.affine = lift.is_affine();

    const int samples = 256;
    int positive = 0;
    int negative = 0;
    for (int i = 0; i <= samples; ++i) {
        const double x = lo + (hi - lo) * i / samples;
        const double d = b.derivatives[1](x);
        if (d > 0.0) ++positive;
        else if (d < 0.0) ++negative;
    }
    if (positive > 0 && negative > 0) {
        throw ValidationError(fmt::format("branch on [{}, {}] with lift {} is not monotone", lo,
                                          hi, lift.to_string()));
    }
    if (positive == 0 && negative == 0) {
        throw ValidationError(fmt::format("branch on [{}, {}] is constant", lo, hi));
    }
    b.increasing = positive > 0;
    return b;
}

}  // namespace

double Branch::image_lo() const {
    return increasing ? lift()(lo) : lift()(hi);
}

double Branch::image_hi() const {
    return increasing ? lift()(hi) : lift()(lo);
}

double branch_inverse(const Branch& branch, double target) {
    const auto& f = branch.lift();
    const auto& df = branch.derivatives[1];
    double a = branch.lo;
    double b = branch.hi;
    // g(x) = s (f(x) - target) is increasing with g(a) <= 0 <= g(b).
    const double s = branch.increasing ? 1.0 : -1.0;
    const double ga = s * (f(a) - target);
    const double gb = s * (f(b) - target);
    if (ga >= 0.0) return a;
    if (gb <= 0.0) return b;

    double x = a + (b - a) * (-ga) / (gb - ga);
    for (int iter = 0; iter < 200; ++iter) {
        const double g = s * (f(x) - target);
        if (g == 0.0) return x;
        if (g < 0.0) a = x;
        else b = x;
        const double step = g / (s * df(x));
        double next = x - step;
        if (!(next > a && next < b)) next = 0.5 * (a + b);
        if (std::abs(next - x) <= 1e-16 * std::max(1.0, std::abs(x)) || b - a <= 1e-16) {
            return next;
        }
        x = next;
    }
    return x;
}

CircleMap CircleMap::smooth(std::string name, const Expression& lift,
                            std::optional<double> min_expansion, bool real_analytic) {
    CircleMap map;
    map.name_ = std::move(name);
    map.kind_ = MapKind::smooth;
    map.real_analytic_ = real_analytic;
    map.branches_.push_back(make_branch(0.0, 1.0, lift));
    const Branch& b = map.branches_.front();

    const double span = lift(1.0) - lift(0.0);
    const double degree = std::round(span);
    if (std::abs(span - degree) > 1e-9 || std::abs(degree) < 2.0) {
        throw ValidationError(fmt::format(
            "smooth map '{}': lift(1) - lift(0) = {} is not an integer degree of modulus >= 2",
            map.name_, span));
    }
    map.degree_ = static_cast<int>(degree);
    for (double x : {0.0, 0.125, 0.3, 0.5, 0.77}) {
        if (std::abs(lift(x + 1.0) - lift(x) - degree) > 1e-9 ||
            std::abs(b.derivatives[1](x + 1.0) - b.derivatives[1](x)) > 1e-9) {
            throw ValidationError(
                fmt::format("smooth map '{}': lift is not periodic of degree {} at x={}",
                            map.name_, map.degree_, x));
        }
    }
    double min_slope = std::numeric_limits<double>::infinity();
    for (int i = 0; i < kSmoothCheckGrid; ++i) {
        min_slope = std::min(min_slope, std::abs(b.derivatives[1](double(i) / kSmoothCheckGrid)));
    }
    const double required = min_expansion.value_or(1.0);
    if (!(min_slope > 1.0) || min_slope < required) {
        throw ValidationError(fmt::format(
            "smooth map '{}': grid minimum |T'| = {} does not exceed the required {}", map.name_,
            min_slope, required));
    }
    return map;
}

CircleMap CircleMap::piecewise(std::string name,
                               const std::vector<std::pair<double, Expression>>& branches) {
    if (branches.empty()) throw ValidationError("piecewise map needs at least one branch");
    if (branches.front().first != 0.0) {
        throw ValidationError("piecewise map: first breakpoint must be 0");
    }
    CircleMap map;
    map.name_ = std::move(name);
    map.kind_ = MapKind::piecewise;
    for (std::size_t i = 0; i < branches.size(); ++i) {
        const double lo = branches[i].first;
        const double hi = i + 1 < branches.size() ? branches[i + 1].first : 1.0;
        if (!(hi > lo) || lo < 0.0 || hi > 1.0) {
            throw ValidationError(
                fmt::format("piecewise map '{}': breakpoints must increase within [0, 1]",
                            map.name_));
        }
        map.branches_.push_back(make_branch(lo, hi, branches[i].second));
    }

    // A junction is a turning point unless value (mod 1) and slope both match.
    const std::size_t n = map.branches_.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Branch& left = map.branches_[(i + n - 1) % n];
        const Branch& right = map.branches_[i];
        const double at_left = left.lift()(left.hi);
        const double at_right = right.lift()(right.lo);
        const bool continuous = circle_distance(at_left, at_right) < 1e-12;
        const bool smooth_join =
            std::abs(left.derivatives[1](left.hi) - right.derivatives[1](right.lo)) < 1e-12;
        if (!(continuous && smooth_join)) map.turning_points_.push_back(right.lo);
    }

    bool expanding = false;
    for (int k = 1; k <= 4 && !expanding; ++k) {
        expanding = expansion_constant(map, k).value > 1.0;
    }
    if (!expanding) {
        throw ValidationError(fmt::format(
            "piecewise map '{}': expansion constant of T^k is not above 1 for any k <= 4",
            map.name_));
    }
    return map;
}

std::vector<double> CircleMap::breakpoints() const {
    std::vector<double> out;
    for (const auto& b : branches_) out.push_back(b.lo);
    out.push_back(1.0);
    return out;
}

std::size_t CircleMap::branch_index(double x) const {
    auto it = std::upper_bound(branches_.begin(), branches_.end(), x,
                               [](double v, const Branch& b) { return v < b.lo; });
    if (it == branches_.begin()) return 0;
    return static_cast<std::size_t>(std::distance(branches_.begin(), it) - 1);
}

Evaluation CircleMap::evaluate(double x) const {
    x = frac(x);
    const std::size_t i = branch_index(x);
    Evaluation e;
    e.value = frac(branches_[i].lift()(x));
    e.at_breakpoint = kind_ == MapKind::piecewise && x == branches_[i].lo;
    return e;
}

double CircleMap::derivative(double x, int order) const {
    if (order < 1 || order > 4) throw ValidationError("derivative order must be in [1, 4]");
    x = frac(x);
    return branches_[branch_index(x)].derivatives[static_cast<std::size_t>(order)](x);
}

PreimageSet CircleMap::branch_preimages(double y) const {
    constexpr double eps = 1e-14;
    PreimageSet out;
    y = frac(y);
    for (std::size_t bi = 0; bi < branches_.size(); ++bi) {
        const Branch& b = branches_[bi];
        const double f_lo = b.lift()(b.lo);
        const double f_hi = b.lift()(b.hi);
        // Half-open domain [lo, hi) maps onto [f_lo, f_hi) or (f_hi, f_lo].
        const double img_lo = std::min(f_lo, f_hi);
        const double img_hi = std::max(f_lo, f_hi);
        const auto j_first = static_cast<long>(std::floor(img_lo - y)) - 1;
        const auto j_last = static_cast<long>(std::ceil(img_hi - y)) + 1;
        for (long j = j_first; j <= j_last; ++j) {
            const double target = y + static_cast<double>(j);
            if (std::abs(target - f_lo) < eps || std::abs(target - f_hi) < eps) {
                out.at_image_endpoint = true;
            }
            const bool inside = b.increasing ? (target >= f_lo && target < f_hi)
                                             : (target > f_hi && target <= f_lo);
            if (!inside) continue;
            const double x = branch_inverse(b, target);
            out.points.push_back({x, std::abs(b.derivatives[1](x)), static_cast<int>(bi)});
        }
    }
    std::sort(out.points.begin(), out.points.end(),
              [](const Preimage& a, const Preimage& b) { return a.x < b.x; });
    return out;
}

ExpansionEstimate expansion_constant(const CircleMap& map, int k) {
    if (k < 1 || k > 8) throw ValidationError("expansion_constant: k must lie in [1, 8]");
    const auto& turning = map.turning_points();
    auto near_turning = [&](double y) {
        return std::any_of(turning.begin(), turning.end(), [&](double t) {
            return circle_distance(y, t) < kBreakpointTolerance;
        });
    };
    ExpansionEstimate est;
    est.value = std::numeric_limits<double>::infinity();
    for (int i = 0; i < kExpansionGrid; ++i) {
        double y = (i + 0.5) / kExpansionGrid;
        double slope = 1.0;
        bool skipped = false;
        for (int step = 0; step < k; ++step) {
            if (near_turning(y)) {
                skipped = true;
                break;
            }
            slope *= std::abs(map.derivative(y, 1));
            y = map(y);
        }
        if (skipped) {
            ++est.skipped_points;
            continue;
        }
        est.value = std::min(est.value, slope);
    }
    return est;
}

TurningPointReport has_periodic_turning_point(const CircleMap& map, int max_period) {
    if (max_period < 1 || max_period > 32) {
        throw ValidationError("has_periodic_turning_point: max_period must lie in [1, 32]");
    }
    TurningPointReport report;
    const auto& turning = map.turning_points();
    if (turning.empty()) return report;

    const auto& branches = map.branches();
    auto reduce = [](double raw) { return (raw >= 0.0 && raw <= 1.0) ? raw : frac(raw); };
    // One-sided images at a turning point, the natural side first.
    auto continuations = [&](double t, double raw_position) {
        const std::size_t right = map.branch_index(t);
        const std::size_t left = (right + branches.size() - 1) % branches.size();
        const double from_right = reduce(branches[right].lift()(branches[right].lo));
        const double from_left = reduce(branches[left].lift()(branches[left].hi));
        if (t == 0.0 && raw_position > 0.5) return std::vector<double>{from_left, from_right};
        return std::vector<double>{from_right, from_left};
    };
    auto turning_at = [&](double y) -> std::optional<double> {
        for (double t : turning) {
            if (circle_distance(y, t) < kBreakpointTolerance) return t;
        }
        return std::nullopt;
    };

    // Interior turning points first, then the junction at 0 = 1.
    std::vector<double> starts;
    for (double t : turning) if (t != 0.0) starts.push_back(t);
    for (double t : turning) if (t == 0.0) starts.push_back(t);

    std::size_t visited = 0;
    constexpr std::size_t kMaxNodes = 1u << 20;
    std::vector<double> path;
    std::function<bool(double, int)> explore = [&](double start, int depth) -> bool {
        if (++visited > kMaxNodes) return false;
        const double current = path.back();
        if (depth > 0 && circle_distance(current, start) < 1e-9) return true;
        if (depth == max_period) return false;
        std::vector<double> next;
        if (auto t = turning_at(current)) {
            next = continuations(*t, current);
        } else {
            next.push_back(map(current));
        }
        for (double v : next) {
            path.push_back(v);
            if (explore(start, depth + 1)) return true;
            path.pop_back();
        }
        return false;
    };
    for (double start : starts) {
        path.assign(1, start);
        if (explore(start, 0)) {
            report.found = true;
            report.orbit = path;
            return report;
        }
    }
    return report;
}

CircleMap doubling_map() {
    return CircleMap::smooth("doubling", Expression::parse("2*x"), 2.0, true);
}

CircleMap perturbed_doubling_map(double epsilon) {
    return CircleMap::smooth(fmt::format("perturbed_doubling({})", epsilon),
                             Expression::parse(fmt::format("2*x + {:.17g}*sin(2*pi*x)", epsilon)),
                             std::nullopt, true);
}

CircleMap shift_fold_map() {
    return CircleMap::piecewise("shift_fold", {{0.0, Expression::parse("x + 0.5")},
                                               {0.5, Expression::parse("2*(1 - x)")}});
}

CircleMap map_by_name(const std::string& name, double epsilon) {
    if (name == "doubling") return doubling_map();
    if (name == "perturbed_doubling") return perturbed_doubling_map(epsilon);
    if (name == "shift_fold") return shift_fold_map();
    throw ValidationError(fmt::format("unknown map '{}'", name));
}

}  // namespace zeronoise
