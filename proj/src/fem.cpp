#include "mhdens/fem.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace mhdens {

namespace {

// 1D quadratic shape functions over nodes {-1, 0, +1}.
inline double lag2(int m, double t) {
  switch (m) {
    case 0: return 0.5 * t * (t - 1.0);
    case 1: return 1.0 - t * t;
    default: return 0.5 * t * (t + 1.0);
  }
}
inline double lag2_d(int m, double t) {
  switch (m) {
    case 0: return t - 0.5;
    case 1: return -2.0 * t;
    default: return t + 0.5;
  }
}

// Local Q2 node order: corners, edge midpoints, center. (mx,my) index the 1D
// node positions {-1,0,+1} per direction.
constexpr std::array<std::array<int, 2>, 9> kQ2NodeIdx = {
    {{0, 0}, {2, 0}, {2, 2}, {0, 2}, {1, 0}, {2, 1}, {1, 2}, {0, 1}, {1, 1}}};

constexpr std::array<std::array<double, 2>, 4> kQ1Corners = {{{-1, -1}, {1, -1}, {1, 1}, {-1, 1}}};

struct ReferenceData {
  // Values and reference gradients of both elements at the assembly rule.
  std::vector<BasisValues> q2;
  std::vector<BasisValues> q1;
};

const ReferenceData& reference_data() {
  static const ReferenceData data = [] {
    ReferenceData d;
    const auto& rule = assembly_rule();
    for (const auto& p : rule.points) {
      d.q2.push_back(basis_eval(ElementKind::q2_scalar, p));
      d.q1.push_back(basis_eval(ElementKind::q1_scalar, p));
    }
    return d;
  }();
  return data;
}

int boundary_rank(BoundaryTag t) {
  switch (t) {
    case BoundaryTag::wall: return 0;
    case BoundaryTag::step: return 1;
    case BoundaryTag::inlet: return 2;
    case BoundaryTag::outlet: return 3;
    default: return -1;
  }
}

MixedSpace::CellGeometry cell_geometry(const Mesh& mesh, const std::array<std::int32_t, 4>& cell,
                                       const Quadrature& rule, const std::vector<BasisValues>& q1_ref) {
  MixedSpace::CellGeometry geo;
  geo.dxw.resize(rule.points.size());
  geo.jinv_t.resize(rule.points.size());
  geo.xy.resize(rule.points.size());
  for (std::size_t q = 0; q < rule.points.size(); ++q) {
    const auto& ref = q1_ref[q];
    double xq = 0, yq = 0, xxi = 0, xeta = 0, yxi = 0, yeta = 0;
    for (int c = 0; c < 4; ++c) {
      const auto& p = mesh.vertices[cell[c]];
      xq += ref.values[c] * p[0];
      yq += ref.values[c] * p[1];
      xxi += ref.gradients[c][0] * p[0];
      xeta += ref.gradients[c][1] * p[0];
      yxi += ref.gradients[c][0] * p[1];
      yeta += ref.gradients[c][1] * p[1];
    }
    const double det = xxi * yeta - xeta * yxi;
    if (det <= 0.0) throw std::runtime_error("cell_geometry: non-positive Jacobian");
    Eigen::Matrix2d jinv_t;
    jinv_t << yeta / det, -yxi / det, -xeta / det, xxi / det;
    geo.dxw[q] = det * rule.weights[q];
    geo.jinv_t[q] = jinv_t;
    geo.xy[q] = {xq, yq};
  }
  return geo;
}

// Physical gradients of the Q2 basis at one cached quadrature point.
inline void physical_gradients(const MixedSpace& space, std::size_t cell, std::size_t q,
                               std::array<Vec2, 9>& grad) {
  const auto& ref = reference_data().q2[q];
  const auto& jt = space.geometry[cell].jinv_t[q];
  for (int i = 0; i < 9; ++i)
    grad[i] = jt * Eigen::Vector2d(ref.gradients[i][0], ref.gradients[i][1]);
}

}  // namespace

BasisValues basis_eval(ElementKind kind, std::array<double, 2> ref_point) {
  const double xi = ref_point[0], eta = ref_point[1];
  BasisValues out;
  if (kind == ElementKind::q2_scalar) {
    out.count = 9;
    for (int i = 0; i < 9; ++i) {
      const auto [mx, my] = kQ2NodeIdx[i];
      out.values[i] = lag2(mx, xi) * lag2(my, eta);
      out.gradients[i] = {lag2_d(mx, xi) * lag2(my, eta), lag2(mx, xi) * lag2_d(my, eta)};
    }
  } else {
    out.count = 4;
    for (int i = 0; i < 4; ++i) {
      const double sx = kQ1Corners[i][0], sy = kQ1Corners[i][1];
      out.values[i] = 0.25 * (1.0 + sx * xi) * (1.0 + sy * eta);
      out.gradients[i] = {0.25 * sx * (1.0 + sy * eta), 0.25 * sy * (1.0 + sx * xi)};
    }
  }
  return out;
}

MixedSpace make_mixed_space(Mesh input) {
  MixedSpace space;
  space.mesh = std::move(input);
  const Mesh& mesh = space.mesh;

  const int nv = static_cast<int>(mesh.n_vertices());
  const int nf = static_cast<int>(mesh.facets.size());
  const int nc = static_cast<int>(mesh.n_cells());
  space.n_scalar = nv + nf + nc;
  space.n_u = 2 * space.n_scalar;
  space.n_p = nv;

  space.q2_node_xy.resize(space.n_scalar);
  for (int v = 0; v < nv; ++v) space.q2_node_xy[v] = mesh.vertices[v];

  std::map<std::pair<std::int32_t, std::int32_t>, std::int32_t> edge_node;
  for (int f = 0; f < nf; ++f) {
    const auto& fct = mesh.facets[f];
    const auto a = std::min(fct.vertices[0], fct.vertices[1]);
    const auto b = std::max(fct.vertices[0], fct.vertices[1]);
    edge_node[{a, b}] = nv + f;
    const auto& pa = mesh.vertices[a];
    const auto& pb = mesh.vertices[b];
    space.q2_node_xy[nv + f] = {0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])};
  }

  space.cell_q2.resize(nc);
  for (int c = 0; c < nc; ++c) {
    const auto& cell = mesh.cells[c];
    auto& nodes = space.cell_q2[c];
    for (int i = 0; i < 4; ++i) nodes[i] = cell[i];
    for (int e = 0; e < 4; ++e) {
      const auto a = cell[e];
      const auto b = cell[(e + 1) % 4];
      nodes[4 + e] = edge_node.at({std::min(a, b), std::max(a, b)});
    }
    nodes[8] = static_cast<std::int32_t>(nv + nf + c);
    double cx = 0, cy = 0;
    for (int i = 0; i < 4; ++i) {
      cx += 0.25 * mesh.vertices[cell[i]][0];
      cy += 0.25 * mesh.vertices[cell[i]][1];
    }
    space.q2_node_xy[nodes[8]] = {cx, cy};
  }

  // Boundary nodes with tags; at corners shared by two tags the higher
  // precedence one wins (wall < step < inlet < outlet).
  std::map<std::int32_t, BoundaryTag> tagged;
  for (int f = 0; f < nf; ++f) {
    const auto& fct = mesh.facets[f];
    if (fct.tag == BoundaryTag::interior) continue;
    for (const std::int32_t node : {fct.vertices[0], fct.vertices[1], static_cast<std::int32_t>(nv + f)}) {
      auto it = tagged.find(node);
      if (it == tagged.end() || boundary_rank(fct.tag) > boundary_rank(it->second))
        tagged[node] = fct.tag;
    }
  }
  space.boundary_nodes.reserve(tagged.size());
  for (const auto& [node, tag] : tagged) space.boundary_nodes.push_back({node, tag});

  space.geometry.resize(nc);
  const auto& rule = assembly_rule();
  const auto& ref = reference_data();
  for (int c = 0; c < nc; ++c)
    space.geometry[c] = cell_geometry(mesh, mesh.cells[c], rule, ref.q1);
  return space;
}

namespace {

using Triplet = Eigen::Triplet<double>;

SparseMatrix from_triplets(int rows, int cols, std::vector<Triplet>& trips) {
  SparseMatrix m(rows, cols);
  m.setFromTriplets(trips.begin(), trips.end());
  return m;
}

}  // namespace

SparseMatrix assemble_mass(const MixedSpace& space) {
  std::vector<Triplet> trips;
  const auto& ref = reference_data();
  for (std::size_t c = 0; c < space.cell_q2.size(); ++c) {
    const auto& nodes = space.cell_q2[c];
    const auto& geo = space.geometry[c];
    double local[9][9] = {};
    for (std::size_t q = 0; q < 9; ++q) {
      const auto& vals = ref.q2[q].values;
      for (int i = 0; i < 9; ++i)
        for (int j = 0; j < 9; ++j) local[i][j] += geo.dxw[q] * vals[i] * vals[j];
    }
    for (int i = 0; i < 9; ++i)
      for (int j = 0; j < 9; ++j) {
        trips.emplace_back(2 * nodes[i], 2 * nodes[j], local[i][j]);
        trips.emplace_back(2 * nodes[i] + 1, 2 * nodes[j] + 1, local[i][j]);
      }
  }
  return from_triplets(space.n_u, space.n_u, trips);
}

SparseMatrix assemble_stiffness(const MixedSpace& space) {
  std::vector<Triplet> trips;
  for (std::size_t c = 0; c < space.cell_q2.size(); ++c) {
    const auto& nodes = space.cell_q2[c];
    const auto& geo = space.geometry[c];
    double local[9][9] = {};
    std::array<Vec2, 9> grad;
    for (std::size_t q = 0; q < 9; ++q) {
      physical_gradients(space, c, q, grad);
      for (int i = 0; i < 9; ++i)
        for (int j = 0; j < 9; ++j) local[i][j] += geo.dxw[q] * grad[i].dot(grad[j]);
    }
    for (int i = 0; i < 9; ++i)
      for (int j = 0; j < 9; ++j) {
        trips.emplace_back(2 * nodes[i], 2 * nodes[j], local[i][j]);
        trips.emplace_back(2 * nodes[i] + 1, 2 * nodes[j] + 1, local[i][j]);
      }
  }
  return from_triplets(space.n_u, space.n_u, trips);
}

void cell_convection_block(const MixedSpace& space, std::size_t cell, const Vec& a, ConvectionForm form,
                           double (&block)[9][9]) {
  const auto& ref = reference_data();
  const auto& nodes = space.cell_q2[cell];
  const auto& geo = space.geometry[cell];
  for (auto& row : block)
    for (double& v : row) v = 0.0;
  std::array<Vec2, 9> grad;
  for (std::size_t q = 0; q < 9; ++q) {
    physical_gradients(space, cell, q, grad);
    const auto& vals = ref.q2[q].values;
    Vec2 aq(0.0, 0.0);
    for (int k = 0; k < 9; ++k) {
      aq[0] += a[2 * nodes[k]] * vals[k];
      aq[1] += a[2 * nodes[k] + 1] * vals[k];
    }
    for (int i = 0; i < 9; ++i)
      for (int j = 0; j < 9; ++j) {
        const double adv = aq.dot(grad[j]) * vals[i];
        if (form == ConvectionForm::standard) {
          block[i][j] += geo.dxw[q] * adv;
        } else {
          const double adv_t = aq.dot(grad[i]) * vals[j];
          block[i][j] += 0.5 * geo.dxw[q] * (adv - adv_t);
        }
      }
  }
}

SparseMatrix assemble_convection(const MixedSpace& space, const Vec& a, ConvectionForm form) {
  if (a.size() != space.n_u) throw std::invalid_argument("assemble_convection: coefficient size mismatch");
  std::vector<Triplet> trips;
  double block[9][9];
  for (std::size_t c = 0; c < space.cell_q2.size(); ++c) {
    cell_convection_block(space, c, a, form, block);
    const auto& nodes = space.cell_q2[c];
    for (int i = 0; i < 9; ++i)
      for (int j = 0; j < 9; ++j) {
        trips.emplace_back(2 * nodes[i], 2 * nodes[j], block[i][j]);
        trips.emplace_back(2 * nodes[i] + 1, 2 * nodes[j] + 1, block[i][j]);
      }
  }
  return from_triplets(space.n_u, space.n_u, trips);
}

void add_convection_product(const MixedSpace& space, const Vec& a, const Vec& x, ConvectionForm form,
                            double scale, Vec& y) {
  if (a.size() != space.n_u || x.size() != space.n_u || y.size() != space.n_u)
    throw std::invalid_argument("add_convection_product: size mismatch");
  const auto& ref = reference_data();
  std::array<Vec2, 9> grad;
  for (std::size_t c = 0; c < space.cell_q2.size(); ++c) {
    const auto& nodes = space.cell_q2[c];
    const auto& geo = space.geometry[c];
    for (std::size_t q = 0; q < 9; ++q) {
      physical_gradients(space, c, q, grad);
      const auto& vals = ref.q2[q].values;
      Vec2 aq(0, 0), xq(0, 0), dx_dx(0, 0), dy_dx(0, 0);
      for (int k = 0; k < 9; ++k) {
        const double ax = a[2 * nodes[k]], ay = a[2 * nodes[k] + 1];
        const double xx = x[2 * nodes[k]], xy = x[2 * nodes[k] + 1];
        aq[0] += ax * vals[k];
        aq[1] += ay * vals[k];
        xq[0] += xx * vals[k];
        xq[1] += xy * vals[k];
        dx_dx += xx * grad[k];  // gradient of the x-component
        dy_dx += xy * grad[k];  // gradient of the y-component
      }
      const double conv_x = aq.dot(dx_dx);
      const double conv_y = aq.dot(dy_dx);
      for (int i = 0; i < 9; ++i) {
        if (form == ConvectionForm::standard) {
          y[2 * nodes[i]] += scale * geo.dxw[q] * conv_x * vals[i];
          y[2 * nodes[i] + 1] += scale * geo.dxw[q] * conv_y * vals[i];
        } else {
          const double agi = aq.dot(grad[i]);
          y[2 * nodes[i]] += 0.5 * scale * geo.dxw[q] * (conv_x * vals[i] - agi * xq[0]);
          y[2 * nodes[i] + 1] += 0.5 * scale * geo.dxw[q] * (conv_y * vals[i] - agi * xq[1]);
        }
      }
    }
  }
}

SparseMatrix assemble_div(const MixedSpace& space) {
  std::vector<Triplet> trips;
  const auto& ref = reference_data();
  std::array<Vec2, 9> grad;
  for (std::size_t c = 0; c < space.cell_q2.size(); ++c) {
    const auto& nodes = space.cell_q2[c];
    const auto& cell = space.mesh.cells[c];
    const auto& geo = space.geometry[c];
    double local_x[4][9] = {};
    double local_y[4][9] = {};
    for (std::size_t q = 0; q < 9; ++q) {
      physical_gradients(space, c, q, grad);
      const auto& pvals = ref.q1[q].values;
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 9; ++j) {
          local_x[i][j] -= geo.dxw[q] * pvals[i] * grad[j][0];
          local_y[i][j] -= geo.dxw[q] * pvals[i] * grad[j][1];
        }
    }
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 9; ++j) {
        trips.emplace_back(cell[i], 2 * nodes[j], local_x[i][j]);
        trips.emplace_back(cell[i], 2 * nodes[j] + 1, local_y[i][j]);
      }
  }
  return from_triplets(space.n_p, space.n_u, trips);
}

Vec assemble_rhs(const MixedSpace& space, const VectorField& g, double t) {
  Vec rhs = Vec::Zero(space.n_u);
  const auto& ref = reference_data();
  for (std::size_t c = 0; c < space.cell_q2.size(); ++c) {
    const auto& nodes = space.cell_q2[c];
    const auto& geo = space.geometry[c];
    for (std::size_t q = 0; q < 9; ++q) {
      const Vec2 gq = g(geo.xy[q][0], geo.xy[q][1], t);
      const auto& vals = ref.q2[q].values;
      for (int i = 0; i < 9; ++i) {
        rhs[2 * nodes[i]] += geo.dxw[q] * gq[0] * vals[i];
        rhs[2 * nodes[i] + 1] += geo.dxw[q] * gq[1] * vals[i];
      }
    }
  }
  return rhs;
}

Vec assemble_pressure_load(const MixedSpace& space) {
  Vec load = Vec::Zero(space.n_p);
  const auto& ref = reference_data();
  for (std::size_t c = 0; c < space.cell_q2.size(); ++c) {
    const auto& cell = space.mesh.cells[c];
    const auto& geo = space.geometry[c];
    for (std::size_t q = 0; q < 9; ++q)
      for (int i = 0; i < 4; ++i) load[cell[i]] += geo.dxw[q] * ref.q1[q].values[i];
  }
  return load;
}

Vec interpolate_velocity(const MixedSpace& space, const VectorField& f, double t) {
  Vec u(space.n_u);
  for (int n = 0; n < space.n_scalar; ++n) {
    const Vec2 v = f(space.q2_node_xy[n][0], space.q2_node_xy[n][1], t);
    u[2 * n] = v[0];
    u[2 * n + 1] = v[1];
  }
  return u;
}

Vec2 eval_velocity(const MixedSpace& space, const Vec& u, std::size_t cell, std::array<double, 2> ref_point) {
  const BasisValues b = basis_eval(ElementKind::q2_scalar, ref_point);
  const auto& nodes = space.cell_q2[cell];
  Vec2 out(0, 0);
  for (int i = 0; i < 9; ++i) {
    out[0] += u[2 * nodes[i]] * b.values[i];
    out[1] += u[2 * nodes[i] + 1] * b.values[i];
  }
  return out;
}

namespace {

// Worker shared by the high-order error/norm integrals.
double integrate_squared(const MixedSpace& space, const Vec* u, const VectorField* f, double t) {
  const Quadrature rule = tensor_gauss(5);
  std::vector<BasisValues> q1_ref, q2_ref;
  for (const auto& p : rule.points) {
    q1_ref.push_back(basis_eval(ElementKind::q1_scalar, p));
    q2_ref.push_back(basis_eval(ElementKind::q2_scalar, p));
  }
  double total = 0.0;
  for (std::size_t c = 0; c < space.cell_q2.size(); ++c) {
    const auto geo = cell_geometry(space.mesh, space.mesh.cells[c], rule, q1_ref);
    const auto& nodes = space.cell_q2[c];
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      Vec2 val(0, 0);
      if (u) {
        for (int i = 0; i < 9; ++i) {
          val[0] += (*u)[2 * nodes[i]] * q2_ref[q].values[i];
          val[1] += (*u)[2 * nodes[i] + 1] * q2_ref[q].values[i];
        }
      }
      if (f) val -= (*f)(geo.xy[q][0], geo.xy[q][1], t);
      total += geo.dxw[q] * val.squaredNorm();
    }
  }
  return std::sqrt(total);
}

}  // namespace

double l2_error_velocity(const MixedSpace& space, const Vec& u, const VectorField& exact, double t) {
  return integrate_squared(space, &u, &exact, t);
}

double h1_error_velocity(const MixedSpace& space, const Vec& u, const MatrixField& exact_grad, double t) {
  const Quadrature rule = tensor_gauss(5);
  std::vector<BasisValues> q1_ref, q2_ref;
  for (const auto& p : rule.points) {
    q1_ref.push_back(basis_eval(ElementKind::q1_scalar, p));
    q2_ref.push_back(basis_eval(ElementKind::q2_scalar, p));
  }
  double total = 0.0;
  for (std::size_t c = 0; c < space.cell_q2.size(); ++c) {
    const auto geo = cell_geometry(space.mesh, space.mesh.cells[c], rule, q1_ref);
    const auto& nodes = space.cell_q2[c];
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      Eigen::Matrix2d grad = Eigen::Matrix2d::Zero();
      for (int i = 0; i < 9; ++i) {
        const Vec2 g = geo.jinv_t[q] * Eigen::Vector2d(q2_ref[q].gradients[i][0], q2_ref[q].gradients[i][1]);
        grad.row(0) += u[2 * nodes[i]] * g.transpose();
        grad.row(1) += u[2 * nodes[i] + 1] * g.transpose();
      }
      grad -= exact_grad(geo.xy[q][0], geo.xy[q][1], t);
      total += geo.dxw[q] * grad.squaredNorm();
    }
  }
  return std::sqrt(total);
}

double l2_norm_field(const MixedSpace& space, const VectorField& f, double t) {
  return integrate_squared(space, nullptr, &f, t);
}

ConstrainedSystem apply_dirichlet(SparseMatrix matrix, const std::vector<char>& is_constrained) {
  if (static_cast<int>(is_constrained.size()) != matrix.rows() || matrix.rows() != matrix.cols())
    throw std::invalid_argument("apply_dirichlet: flag size mismatch");
  ConstrainedSystem out;
  out.matrix = std::move(matrix);
  out.matrix.makeCompressed();
  for (int r = 0; r < out.matrix.rows(); ++r) {
    bool has_diagonal = false;
    for (SparseMatrix::InnerIterator it(out.matrix, r); it; ++it) {
      if (is_constrained[r]) {
        if (it.col() == r) {
          it.valueRef() = 1.0;
          has_diagonal = true;
        } else {
          it.valueRef() = 0.0;
        }
      } else if (is_constrained[it.col()]) {
        if (it.value() != 0.0) out.eliminations.push_back({r, static_cast<int>(it.col()), it.value()});
        it.valueRef() = 0.0;
      }
    }
    if (is_constrained[r]) {
      if (!has_diagonal) throw std::runtime_error("apply_dirichlet: constrained row lacks structural diagonal");
      out.constrained.push_back(r);
    }
  }
  return out;
}

void apply_constraint_values(const ConstrainedSystem& system, const Vec& values, Vec& rhs) {
  for (const auto& e : system.eliminations) rhs[e.row] -= e.value * values[e.col];
  for (const int i : system.constrained) rhs[i] = values[i];
}

void fill_boundary_velocity(const MixedSpace& space, const BoundaryField& bc, double t, Vec& values) {
  for (const auto& bn : space.boundary_nodes) {
    const auto& xy = space.q2_node_xy[bn.node];
    const Vec2 v = bc(bn.tag, xy[0], xy[1], t);
    values[2 * bn.node] = v[0];
    values[2 * bn.node + 1] = v[1];
  }
}

std::vector<int> boundary_velocity_dofs(const MixedSpace& space) {
  std::vector<int> dofs;
  dofs.reserve(2 * space.boundary_nodes.size());
  for (const auto& bn : space.boundary_nodes) {
    dofs.push_back(2 * bn.node);
    dofs.push_back(2 * bn.node + 1);
  }
  std::sort(dofs.begin(), dofs.end());
  return dofs;
}

double inf_sup_constant(const MixedSpace& space) {
  // Interior (zero-trace) scalar nodes.
  std::vector<char> on_boundary(space.n_scalar, 0);
  for (const auto& bn : space.boundary_nodes) on_boundary[bn.node] = 1;
  std::vector<int> interior;
  for (int n = 0; n < space.n_scalar; ++n)
    if (!on_boundary[n]) {
      interior.push_back(2 * n);
      interior.push_back(2 * n + 1);
    }
  const int ni = static_cast<int>(interior.size());
  if (ni == 0) throw std::runtime_error("inf_sup_constant: no interior velocity DOFs");

  const SparseMatrix k_full = assemble_stiffness(space);
  const SparseMatrix b_full = assemble_div(space);

  Eigen::MatrixXd k_int(ni, ni);
  for (int i = 0; i < ni; ++i)
    for (int j = 0; j < ni; ++j) k_int(i, j) = k_full.coeff(interior[i], interior[j]);
  Eigen::MatrixXd b_int(space.n_p, ni);
  for (int p = 0; p < space.n_p; ++p)
    for (int j = 0; j < ni; ++j) b_int(p, j) = b_full.coeff(p, interior[j]);

  // Pressure mass matrix (dense; small meshes only).
  Eigen::MatrixXd mp = Eigen::MatrixXd::Zero(space.n_p, space.n_p);
  const auto& ref = reference_data();
  for (std::size_t c = 0; c < space.cell_q2.size(); ++c) {
    const auto& cell = space.mesh.cells[c];
    const auto& geo = space.geometry[c];
    for (std::size_t q = 0; q < 9; ++q)
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
          mp(cell[i], cell[j]) += geo.dxw[q] * ref.q1[q].values[i] * ref.q1[q].values[j];
  }

  const Eigen::MatrixXd schur = b_int * k_int.llt().solve(b_int.transpose());
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> eig(schur, mp);
  if (eig.info() != Eigen::Success) throw std::runtime_error("inf_sup_constant: eigensolver failed");
  // The constant pressure mode sits at zero; the inf-sup proxy is the next one.
  return std::sqrt(std::max(0.0, eig.eigenvalues()[1]));
}

}  // namespace mhdens
