// Q2/Q1 Taylor-Hood spaces on quadrilateral meshes: reference elements,
// DOF numbering, Dirichlet bookkeeping, and assembly of the mass, stiffness,
// convection, divergence and load forms used by the time stepper.
//
// Velocity DOFs interleave components: scalar node i owns DOFs 2i (x) and
// 2i+1 (y). Pressure DOFs coincide with mesh vertices.
#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "mhdens/mesh.hpp"
#include "mhdens/quadrature.hpp"

namespace mhdens {

using Vec = Eigen::VectorXd;
using Vec2 = Eigen::Vector2d;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;

using VectorField = std::function<Vec2(double x, double y, double t)>;
using BoundaryField = std::function<Vec2(BoundaryTag tag, double x, double y, double t)>;

enum class ElementKind { q2_scalar, q1_scalar };

struct BasisValues {
  int count = 0;
  std::array<double, 9> values{};
  std::array<std::array<double, 2>, 9> gradients{};  // w.r.t. reference coords
};

/// Nodal basis values and reference gradients at a point of [-1,1]^2.
BasisValues basis_eval(ElementKind kind, std::array<double, 2> ref_point);

struct MixedSpace {
  Mesh mesh;  // owned copy; a space outlives any mesh temporary it was built from

  // Scalar Q2 nodes: mesh vertices, then one node per facet (edge midpoints),
  // then one per cell (centroids).
  std::vector<std::array<double, 2>> q2_node_xy;
  std::vector<std::array<std::int32_t, 9>> cell_q2;  // local order: 4 corners, 4 edge nodes, center
  int n_scalar = 0;
  int n_u = 0;
  int n_p = 0;

  struct BoundaryNode {
    std::int32_t node;
    BoundaryTag tag;
  };
  std::vector<BoundaryNode> boundary_nodes;  // sorted by node id, one entry per node

  // Per-cell, per-quadrature-point geometry (sized by the rule in use; the
  // cached instances use the shared 3x3 assembly rule).
  struct CellGeometry {
    std::vector<double> dxw;                // detJ * weight
    std::vector<Eigen::Matrix2d> jinv_t;    // inverse-transpose Jacobian
    std::vector<std::array<double, 2>> xy;  // physical coordinates
  };
  std::vector<CellGeometry> geometry;
};

MixedSpace make_mixed_space(Mesh mesh);

enum class ConvectionForm { standard, skew };

/// Velocity mass matrix (n_u x n_u), component-diagonal.
SparseMatrix assemble_mass(const MixedSpace& space);

/// Velocity gradient-gradient matrix without any viscosity factor.
SparseMatrix assemble_stiffness(const MixedSpace& space);

/// N(a) for the form (a . grad v, chi); the skew variant antisymmetrizes the
/// trilinear form cell-wise so x^T N x vanishes identically.
SparseMatrix assemble_convection(const MixedSpace& space, const Vec& a, ConvectionForm form);

/// Scalar 9x9 convection block of one cell (identical for both components).
void cell_convection_block(const MixedSpace& space, std::size_t cell, const Vec& a, ConvectionForm form,
                           double (&block)[9][9]);

/// y += scale * N(a) x without forming the matrix.
void add_convection_product(const MixedSpace& space, const Vec& a, const Vec& x, ConvectionForm form,
                            double scale, Vec& y);

/// Pressure-velocity coupling B (n_p x n_u) with entries -(q, div v).
SparseMatrix assemble_div(const MixedSpace& space);

/// Load vector of (g(t), chi) over the velocity space.
Vec assemble_rhs(const MixedSpace& space, const VectorField& g, double t);

/// Integrals of the Q1 basis functions (sums to the domain area).
Vec assemble_pressure_load(const MixedSpace& space);

// --- fields ---

Vec interpolate_velocity(const MixedSpace& space, const VectorField& f, double t);
Vec2 eval_velocity(const MixedSpace& space, const Vec& u, std::size_t cell, std::array<double, 2> ref_point);

/// L2 error against an analytic field, integrated with a 5x5 Gauss rule.
double l2_error_velocity(const MixedSpace& space, const Vec& u, const VectorField& exact, double t);

using MatrixField = std::function<Eigen::Matrix2d(double x, double y, double t)>;  // (i,j) = d f_i / d x_j

/// H1-seminorm error |grad(u_h - exact)| with the exact gradient evaluated at
/// the quadrature points of a 5x5 Gauss rule.
double h1_error_velocity(const MixedSpace& space, const Vec& u, const MatrixField& exact_grad, double t);

/// L2 norm of an analytic field over the mesh (5x5 Gauss rule).
double l2_norm_field(const MixedSpace& space, const VectorField& f, double t);

// --- Dirichlet constraints ---

struct ConstrainedSystem {
  SparseMatrix matrix;           // rows/columns eliminated in place; sparsity kept
  std::vector<int> constrained;  // sorted constrained indices
  struct Elim {
    int row;
    int col;
    double value;
  };
  std::vector<Elim> eliminations;  // former couplings of free rows to constrained columns
};

/// Symmetric elimination of the flagged indices: constrained rows become
/// identity rows, couplings are zeroed and recorded for the RHS correction.
/// The resulting matrix depends only on the constrained index set, never on
/// boundary values, which is what lets all ensemble members share it.
ConstrainedSystem apply_dirichlet(SparseMatrix matrix, const std::vector<char>& is_constrained);

/// rhs[row] -= elim.value * values[col] for couplings, rhs[i] = values[i] on
/// constrained rows. `values` is a full-length vector read only at constrained
/// indices.
void apply_constraint_values(const ConstrainedSystem& system, const Vec& values, Vec& rhs);

/// Writes prescribed velocity values at boundary nodes into `values`
/// (full-length over some system whose leading n_u entries are velocity DOFs).
void fill_boundary_velocity(const MixedSpace& space, const BoundaryField& bc, double t, Vec& values);

/// Sorted velocity-DOF indices of all boundary nodes.
std::vector<int> boundary_velocity_dofs(const MixedSpace& space);

/// Numerical inf-sup proxy: smallest nonzero generalized singular value of the
/// divergence coupling restricted to zero-trace velocities (gradient norm on
/// velocities, L2 norm on pressures). Dense solve; intended for small meshes.
double inf_sup_constant(const MixedSpace& space);

}  // namespace mhdens
