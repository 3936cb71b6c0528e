#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>

#include "mhdens/fem.hpp"
#include "mhdens/linsolve.hpp"
#include "mhdens/mms.hpp"

using namespace mhdens;

namespace {

std::mt19937 rng(20240811);

double uniform(double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  return dist(rng);
}

Vec random_vector(int n) {
  Vec x(n);
  for (int i = 0; i < n; ++i) x[i] = uniform(-1.0, 1.0);
  return x;
}

}  // namespace

TEST_CASE("gauss rules integrate polynomials of their degree exactly") {
  const Quadrature q = tensor_gauss(3);
  for (int i = 0; i <= 5; ++i) {
    for (int j = 0; j <= 5; ++j) {
      double sum = 0.0;
      for (std::size_t k = 0; k < q.points.size(); ++k)
        sum += q.weights[k] * std::pow(q.points[k][0], i) * std::pow(q.points[k][1], j);
      const double exact_x = i % 2 == 1 ? 0.0 : 2.0 / (i + 1);
      const double exact_y = j % 2 == 1 ? 0.0 : 2.0 / (j + 1);
      CHECK(sum == doctest::Approx(exact_x * exact_y).epsilon(1e-14));
    }
  }
}

TEST_CASE("q2 basis is nodal and a partition of unity") {
  const std::array<std::array<double, 2>, 9> nodes = {
      {{-1, -1}, {1, -1}, {1, 1}, {-1, 1}, {0, -1}, {1, 0}, {0, 1}, {-1, 0}, {0, 0}}};
  for (int k = 0; k < 9; ++k) {
    const BasisValues b = basis_eval(ElementKind::q2_scalar, nodes[k]);
    for (int i = 0; i < 9; ++i) CHECK(b.values[i] == doctest::Approx(i == k ? 1.0 : 0.0).epsilon(1e-14));
  }
  for (int trial = 0; trial < 20; ++trial) {
    const std::array<double, 2> p{uniform(-1, 1), uniform(-1, 1)};
    const BasisValues b = basis_eval(ElementKind::q2_scalar, p);
    double sum = 0.0;
    for (int i = 0; i < 9; ++i) sum += b.values[i];
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("q1 basis at the center is 1/4 everywhere") {
  const BasisValues b = basis_eval(ElementKind::q1_scalar, {0.0, 0.0});
  for (int i = 0; i < 4; ++i) CHECK(b.values[i] == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("space dimensions follow the Taylor-Hood counts") {
  const Mesh mesh = unit_square(4);
  const MixedSpace space = make_mixed_space(mesh);
  CHECK(space.n_scalar == 81);  // (2n+1)^2
  CHECK(space.n_u == 162);
  CHECK(space.n_p == 25);
}

TEST_CASE("mass matrix: entry sum, SPD, constant-field energy") {
  const MixedSpace space = make_mixed_space(unit_square(3));
  const SparseMatrix m = assemble_mass(space);

  double sum = 0.0;
  for (int r = 0; r < m.rows(); ++r)
    for (SparseMatrix::InnerIterator it(m, r); it; ++it) sum += it.value();
  CHECK(sum == doctest::Approx(2.0).epsilon(1e-12));

  for (int trial = 0; trial < 5; ++trial) {
    const Vec x = random_vector(space.n_u);
    CHECK(x.dot(m * x) > 0.0);
  }

  Vec ones_x = Vec::Zero(space.n_u);
  for (int i = 0; i < space.n_scalar; ++i) ones_x[2 * i] = 1.0;
  CHECK(ones_x.dot(m * ones_x) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("stiffness matrix: nullspace, linear-field energy, symmetry") {
  const MixedSpace space = make_mixed_space(unit_square(3));
  const SparseMatrix k = assemble_stiffness(space);

  Vec constant = Vec::Zero(space.n_u);
  for (int i = 0; i < space.n_scalar; ++i) {
    constant[2 * i] = 2.5;
    constant[2 * i + 1] = -1.0;
  }
  CHECK((k * constant).lpNorm<Eigen::Infinity>() < 1e-12);

  const Vec linear = interpolate_velocity(space, [](double x, double, double) { return Vec2(x, 0.0); }, 0.0);
  CHECK(linear.dot(k * linear) == doctest::Approx(1.0).epsilon(1e-12));

  const SparseMatrix kt = SparseMatrix(k.transpose());
  double max_asym = 0.0;
  for (int r = 0; r < k.rows(); ++r) {
    SparseMatrix::InnerIterator a(k, r), b(kt, r);
    for (; a && b; ++a, ++b) max_asym = std::max(max_asym, std::abs(a.value() - b.value()));
  }
  CHECK(max_asym < 1e-12);
}

TEST_CASE("convection: zero coefficient, constant transported field, skew antisymmetry") {
  const MixedSpace space = make_mixed_space(unit_square(3));

  const Vec zero = Vec::Zero(space.n_u);
  const SparseMatrix n0 = assemble_convection(space, zero, ConvectionForm::standard);
  double max_abs = 0.0;
  for (int r = 0; r < n0.rows(); ++r)
    for (SparseMatrix::InnerIterator it(n0, r); it; ++it) max_abs = std::max(max_abs, std::abs(it.value()));
  CHECK(max_abs == 0.0);

  // Constant transported field: (a . grad v) = 0 for every row.
  const Vec a = interpolate_velocity(space, [](double, double, double) { return Vec2(1.0, 1.0); }, 0.0);
  const SparseMatrix n = assemble_convection(space, a, ConvectionForm::standard);
  Vec constant = Vec::Zero(space.n_u);
  for (int i = 0; i < space.n_scalar; ++i) {
    constant[2 * i] = 1.0;
    constant[2 * i + 1] = -0.5;
  }
  CHECK((n * constant).lpNorm<Eigen::Infinity>() < 1e-13);

  // Skew mode: x^T N x vanishes for fields with zero boundary trace.
  const Vec wind = random_vector(space.n_u);
  const SparseMatrix ns = assemble_convection(space, wind, ConvectionForm::skew);
  Vec x = random_vector(space.n_u);
  for (const int dof : boundary_velocity_dofs(space)) x[dof] = 0.0;
  CHECK(std::abs(x.dot(ns * x)) <= 1e-12 * x.squaredNorm());
}

TEST_CASE("matrix-free convection product matches the assembled operator") {
  const MixedSpace space = make_mixed_space(unit_square(3));
  const Vec a = random_vector(space.n_u);
  const Vec x = random_vector(space.n_u);
  for (const ConvectionForm form : {ConvectionForm::standard, ConvectionForm::skew}) {
    const SparseMatrix n = assemble_convection(space, a, form);
    Vec y = Vec::Zero(space.n_u);
    add_convection_product(space, a, x, form, -1.0, y);
    CHECK((y + n * x).lpNorm<Eigen::Infinity>() < 1e-12);
  }
}

TEST_CASE("divergence block annihilates rigid and linear solenoidal fields") {
  const MixedSpace space = make_mixed_space(unit_square(4));
  const SparseMatrix b = assemble_div(space);

  Vec rigid = Vec::Zero(space.n_u);
  for (int i = 0; i < space.n_scalar; ++i) {
    rigid[2 * i] = 0.7;
    rigid[2 * i + 1] = 0.3;
  }
  CHECK((b * rigid).lpNorm<Eigen::Infinity>() < 1e-13);

  const Vec solenoidal =
      interpolate_velocity(space, [](double x, double y, double) { return Vec2(x, -y); }, 0.0);
  CHECK((b * solenoidal).lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("load vector: zero forcing, partition of unity, oracle spot check") {
  const MixedSpace space = make_mixed_space(unit_square(8));

  const Vec zero = assemble_rhs(space, [](double, double, double) { return Vec2(0, 0); }, 0.0);
  CHECK(zero.lpNorm<Eigen::Infinity>() == 0.0);

  const Vec unit_x = assemble_rhs(space, [](double, double, double) { return Vec2(1, 0); }, 0.0);
  double sum_x = 0.0, sum_y = 0.0;
  for (int i = 0; i < space.n_scalar; ++i) {
    sum_x += unit_x[2 * i];
    sum_y += unit_x[2 * i + 1];
  }
  CHECK(sum_x == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(sum_y) < 1e-15);

  // Spot value of the manufactured forcing against a high-order quadrature of
  // g . phi over the node's support, refined until stationary.
  const ManufacturedSolution sol;
  const PhysParams phys(0.01, 0.001);
  const VectorField f1 = [&](double x, double y, double t) { return mms_forcing_f1(sol, phys, 1.0, x, y, t); };
  const Vec rhs = assemble_rhs(space, f1, 0.0);

  const int node = space.cell_q2[27][8];  // a cell-center node: support is one cell
  auto oracle_with = [&](int points) {
    const Quadrature rule = tensor_gauss(points);
    double total = 0.0;
    for (std::size_t c = 0; c < space.cell_q2.size(); ++c) {
      int local = -1;
      for (int i = 0; i < 9; ++i)
        if (space.cell_q2[c][i] == node) local = i;
      if (local < 0) continue;
      for (std::size_t qp = 0; qp < rule.points.size(); ++qp) {
        const BasisValues q1 = basis_eval(ElementKind::q1_scalar, rule.points[qp]);
        const BasisValues q2 = basis_eval(ElementKind::q2_scalar, rule.points[qp]);
        double x = 0, y = 0, xxi = 0, xeta = 0, yxi = 0, yeta = 0;
        for (int v = 0; v < 4; ++v) {
          const auto& p = space.mesh.vertices[space.mesh.cells[c][v]];
          x += q1.values[v] * p[0];
          y += q1.values[v] * p[1];
          xxi += q1.gradients[v][0] * p[0];
          xeta += q1.gradients[v][1] * p[0];
          yxi += q1.gradients[v][0] * p[1];
          yeta += q1.gradients[v][1] * p[1];
        }
        const double det = xxi * yeta - xeta * yxi;
        total += rule.weights[qp] * det * f1(x, y, 0.0)[0] * q2.values[local];
      }
    }
    return total;
  };
  const double coarse = oracle_with(16);
  const double fine = oracle_with(24);
  REQUIRE(std::abs(fine - coarse) < 1e-13);  // oracle converged
  CHECK(rhs[2 * node] == doctest::Approx(fine).epsilon(1e-10));
}

TEST_CASE("q2 interpolation reproduces biquadratic polynomials") {
  const MixedSpace space = make_mixed_space(unit_square(3));
  double coef[3][3];
  for (auto& row : coef)
    for (double& c : row) c = uniform(-2.0, 2.0);
  auto poly = [&](double x, double y) {
    double value = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) value += coef[i][j] * std::pow(x, i) * std::pow(y, j);
    return value;
  };
  const Vec u = interpolate_velocity(space, [&](double x, double y, double) { return Vec2(poly(x, y), 0.0); }, 0.0);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t cell = static_cast<std::size_t>(uniform(0, 1) * 8.999);
    const std::array<double, 2> ref{uniform(-1, 1), uniform(-1, 1)};
    const Vec2 value = eval_velocity(space, u, cell, ref);
    const BasisValues q1 = basis_eval(ElementKind::q1_scalar, ref);
    double x = 0, y = 0;
    for (int v = 0; v < 4; ++v) {
      const auto& p = space.mesh.vertices[space.mesh.cells[cell][v]];
      x += q1.values[v] * p[0];
      y += q1.values[v] * p[1];
    }
    CHECK(value[0] == doctest::Approx(poly(x, y)).epsilon(1e-12));
    CHECK(std::abs(value[1]) < 1e-12);
  }
}

TEST_CASE("dirichlet elimination: exact imposition and value-independent matrix") {
  const MixedSpace space = make_mixed_space(unit_square(4));
  const SparseMatrix system = SparseMatrix(assemble_mass(space) + assemble_stiffness(space));
  std::vector<char> constrained(space.n_u, 0);
  for (const int dof : boundary_velocity_dofs(space)) constrained[dof] = 1;

  const ConstrainedSystem cs1 = apply_dirichlet(system, constrained);
  const ConstrainedSystem cs2 = apply_dirichlet(system, constrained);
  REQUIRE(cs1.matrix.nonZeros() == cs2.matrix.nonZeros());
  CHECK(std::memcmp(cs1.matrix.valuePtr(), cs2.matrix.valuePtr(), sizeof(double) * cs1.matrix.nonZeros()) == 0);

  Factorization lu;
  lu.factor(cs1.matrix);

  // Homogeneous data: boundary DOFs vanish exactly.
  {
    Vec rhs = random_vector(space.n_u);
    const Vec values = Vec::Zero(space.n_u);
    apply_constraint_values(cs1, values, rhs);
    const Vec x = lu.solve(rhs);
    for (const int dof : boundary_velocity_dofs(space)) CHECK(x[dof] == 0.0);
  }

  // Inhomogeneous data from the manufactured trace: boundary DOFs match the
  // prescribed nodal values exactly; the matrix is shared bit for bit.
  {
    const ManufacturedSolution sol;
    for (const double factor : {1.001, 0.999}) {
      Vec rhs = random_vector(space.n_u);
      Vec values = Vec::Zero(space.n_u);
      fill_boundary_velocity(
          space, [&](BoundaryTag, double x, double y, double t) { return Vec2(factor * sol.v(x, y, t)); },
          0.25, values);
      apply_constraint_values(cs1, values, rhs);
      const Vec x = lu.solve(rhs);
      for (const auto& bn : space.boundary_nodes) {
        const auto& xy = space.q2_node_xy[bn.node];
        const Vec2 expected = factor * sol.v(xy[0], xy[1], 0.25);
        CHECK(x[2 * bn.node] == doctest::Approx(expected[0]).epsilon(1e-14));
        CHECK(x[2 * bn.node + 1] == doctest::Approx(expected[1]).epsilon(1e-14));
      }
    }
  }
}

TEST_CASE("inf-sup proxy is bounded away from zero and stable under refinement") {
  const MixedSpace coarse = make_mixed_space(unit_square(4));
  const MixedSpace fine = make_mixed_space(unit_square(8));
  const double beta_coarse = inf_sup_constant(coarse);
  const double beta_fine = inf_sup_constant(fine);
  CHECK(beta_coarse > 0.05);
  CHECK(beta_fine > 0.05);
  CHECK(beta_fine >= 0.8 * beta_coarse);
}
