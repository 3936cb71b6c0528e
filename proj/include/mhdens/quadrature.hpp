// Gauss-Legendre rules on [-1,1] and their tensor products on the reference
// square. The default assembly rule is the 3x3 tensor rule (degree-5 exact).
#pragma once

#include <array>
#include <vector>

namespace mhdens {

struct Rule1D {
  std::vector<double> points;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1,1], exact for degree 2n-1.
Rule1D gauss_legendre(int n);

struct Quadrature {
  std::vector<std::array<double, 2>> points;  // on [-1,1]^2
  std::vector<double> weights;
};

/// n-by-n tensor-product Gauss rule on the reference square.
Quadrature tensor_gauss(int n);

/// Shared 3x3 rule used by all assembly routines.
const Quadrature& assembly_rule();

}  // namespace mhdens
