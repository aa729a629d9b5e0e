#pragma once

#include <boost/math/special_functions/legendre.hpp>

#include <cstddef>
#include <vector>

namespace halfheavy::detail {

// Full Gauss-Legendre rule on [-1, 1]; boost supplies the non-negative zeros.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  explicit GaussRule(unsigned n) {
    const auto zeros = boost::math::legendre_p_zeros<double>(static_cast<int>(n));
    for (double x : zeros) {
      const double dp = boost::math::legendre_p_prime(static_cast<int>(n), x);
      const double w = 2.0 / ((1.0 - x * x) * dp * dp);
      if (x == 0.0) {
        nodes.push_back(0.0);
        weights.push_back(w);
      } else {
        nodes.push_back(-x);
        weights.push_back(w);
        nodes.push_back(x);
        weights.push_back(w);
      }
    }
  }

  std::size_t size() const { return nodes.size(); }

  // Integrates f over [a, b].
  template <class F>
  auto integrate(F&& f, double a, double b) const {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    decltype(f(mid)) acc{};
    for (std::size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * f(mid + half * nodes[i]);
    return acc * half;
  }
};

}  // namespace halfheavy::detail
