#include "mhdens/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace mhdens {

Rule1D gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  Rule1D rule;
  rule.points.resize(n);
  rule.weights.resize(n);
  // Newton iteration on P_n with Chebyshev-like initial guesses; symmetric
  // roots are filled in pairs.
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * pp * pp);
    rule.points[i] = -x;
    rule.points[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.points[n / 2] = 0.0;
  return rule;
}

Quadrature tensor_gauss(int n) {
  const Rule1D r = gauss_legendre(n);
  Quadrature q;
  q.points.reserve(static_cast<std::size_t>(n) * n);
  q.weights.reserve(static_cast<std::size_t>(n) * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      q.points.push_back({r.points[i], r.points[j]});
      q.weights.push_back(r.weights[i] * r.weights[j]);
    }
  return q;
}

const Quadrature& assembly_rule() {
  static const Quadrature rule = tensor_gauss(3);
  return rule;
}

}  // namespace mhdens
