#include "zeronoise/quadrature.hpp"

#include <boost/math/special_functions/legendre.hpp>

#include <algorithm>
#include <stdexcept>

namespace zeronoise {

GaussLegendre::GaussLegendre(int order) {
    if (order < 1) {
        throw std::invalid_argument("Gauss-Legendre order must be positive");
    }
    // Boost returns the non-negative zeros in increasing order.
    const auto positive = boost::math::legendre_p_zeros<double>(order);
    for (auto it = positive.rbegin(); it != positive.rend(); ++it) {
        if (*it != 0.0) nodes_.push_back(-*it);
    }
    for (double x : positive) nodes_.push_back(x);

    weights_.reserve(nodes_.size());
    for (double x : nodes_) {
        const double dp = boost::math::legendre_p_prime(order, x);
        weights_.push_back(2.0 / ((1.0 - x * x) * dp * dp));
    }
}

}  // namespace zeronoise
