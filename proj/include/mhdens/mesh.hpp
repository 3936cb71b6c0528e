// Structured quadrilateral meshes: unit square and channel-with-step, plus
// uniform refinement. Cells are axis-aligned rectangles stored counterclockwise;
// facets carry boundary tags used downstream for Dirichlet data.
#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace mhdens {

enum class BoundaryTag : std::uint8_t { interior = 0, wall, inlet, outlet, step };

const char* to_string(BoundaryTag tag);

struct Facet {
  std::array<std::int32_t, 2> vertices{};
  BoundaryTag tag = BoundaryTag::interior;
};

struct Mesh {
  std::vector<std::array<double, 2>> vertices;
  std::vector<std::array<std::int32_t, 4>> cells;  // counterclockwise vertex ids
  std::vector<Facet> facets;                       // all edges, interior ones tagged interior
  double h_max = 0.0;                              // max cell diameter

  std::size_t n_vertices() const { return vertices.size(); }
  std::size_t n_cells() const { return cells.size(); }
  std::size_t n_boundary_facets() const;
};

/// n-by-n grid on (0,1)^2; every boundary facet tagged wall.
Mesh unit_square(int n);

/// [0,40]x[0,10] channel minus the unit step [5,6]x[0,1] sitting on the bottom
/// wall. Facets on x=0 are inlet, x=40 outlet, the three exposed step faces
/// step, everything else wall.
Mesh step_channel(int cells_per_unit);

/// Split every cell into 4 congruent children; boundary tags are inherited.
Mesh refine(const Mesh& m);

double cell_area(const Mesh& m, std::size_t cell);
double total_area(const Mesh& m);

/// Throws std::runtime_error on a violated mesh invariant (degenerate cell,
/// bad facet incidence, boundary facet with an off-boundary vertex).
void validate_mesh(const Mesh& m);

}  // namespace mhdens
