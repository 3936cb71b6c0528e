#include "mhdens/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>

namespace mhdens {

namespace {

using Edge = std::pair<std::int32_t, std::int32_t>;

Edge sorted_edge(std::int32_t a, std::int32_t b) {
  return a < b ? Edge{a, b} : Edge{b, a};
}

constexpr std::array<std::array<int, 2>, 4> kCellEdges = {{{0, 1}, {1, 2}, {2, 3}, {3, 0}}};

double cross(const std::array<double, 2>& a, const std::array<double, 2>& b) {
  return a[0] * b[1] - a[1] * b[0];
}

double dist(const std::array<double, 2>& a, const std::array<double, 2>& b) {
  return std::hypot(a[0] - b[0], a[1] - b[1]);
}

double max_diameter(const Mesh& m) {
  double h = 0.0;
  for (const auto& c : m.cells) {
    h = std::max(h, dist(m.vertices[c[0]], m.vertices[c[2]]));
    h = std::max(h, dist(m.vertices[c[1]], m.vertices[c[3]]));
  }
  return h;
}

// Enumerates all edges in first-encounter order and returns per-edge cell
// incidence counts alongside the facet list (tags default to interior).
std::map<Edge, std::size_t> build_facets(Mesh& m) {
  std::map<Edge, std::size_t> index;
  m.facets.clear();
  std::vector<int> incidence;
  for (const auto& cell : m.cells) {
    for (const auto& e : kCellEdges) {
      const Edge key = sorted_edge(cell[e[0]], cell[e[1]]);
      auto it = index.find(key);
      if (it == index.end()) {
        index.emplace(key, m.facets.size());
        m.facets.push_back({{key.first, key.second}, BoundaryTag::interior});
        incidence.push_back(1);
      } else {
        ++incidence[it->second];
      }
    }
  }
  // Incidence 1 marks a boundary facet; callers overwrite the tag afterwards.
  for (std::size_t f = 0; f < m.facets.size(); ++f) {
    if (incidence[f] == 1) m.facets[f].tag = BoundaryTag::wall;
  }
  return index;
}

}  // namespace

const char* to_string(BoundaryTag tag) {
  switch (tag) {
    case BoundaryTag::interior: return "interior";
    case BoundaryTag::wall: return "wall";
    case BoundaryTag::inlet: return "inlet";
    case BoundaryTag::outlet: return "outlet";
    case BoundaryTag::step: return "step";
  }
  return "?";
}

std::size_t Mesh::n_boundary_facets() const {
  std::size_t n = 0;
  for (const auto& f : facets)
    if (f.tag != BoundaryTag::interior) ++n;
  return n;
}

Mesh unit_square(int n) {
  if (n < 1) throw std::invalid_argument("unit_square: n must be >= 1");
  Mesh m;
  const int nv = n + 1;
  m.vertices.reserve(static_cast<std::size_t>(nv) * nv);
  for (int j = 0; j < nv; ++j)
    for (int i = 0; i < nv; ++i)
      m.vertices.push_back({static_cast<double>(i) / n, static_cast<double>(j) / n});
  auto vid = [nv](int i, int j) { return static_cast<std::int32_t>(i + j * nv); };
  m.cells.reserve(static_cast<std::size_t>(n) * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      m.cells.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)});
  build_facets(m);
  m.h_max = std::sqrt(2.0) / n;
  return m;
}

Mesh step_channel(int cells_per_unit) {
  if (cells_per_unit < 1) throw std::invalid_argument("step_channel: cells_per_unit must be >= 1");
  const int k = cells_per_unit;
  const int nx = 40 * k, ny = 10 * k;

  // Integer lattice coordinates drive all geometric predicates; a grid vertex
  // (gi, gj) sits at physical (gi/k, gj/k).
  auto removed = [k](int ci, int cj) { return ci >= 5 * k && ci < 6 * k && cj < k; };

  std::vector<std::int32_t> vertex_id(static_cast<std::size_t>(nx + 1) * (ny + 1), -1);
  auto lat = [nx](int gi, int gj) { return static_cast<std::size_t>(gi) + static_cast<std::size_t>(gj) * (nx + 1); };

  Mesh m;
  auto use_vertex = [&](int gi, int gj) {
    std::int32_t& id = vertex_id[lat(gi, gj)];
    if (id < 0) {
      id = static_cast<std::int32_t>(m.vertices.size());
      m.vertices.push_back({static_cast<double>(gi) / k, static_cast<double>(gj) / k});
    }
    return id;
  };

  for (int cj = 0; cj < ny; ++cj) {
    for (int ci = 0; ci < nx; ++ci) {
      if (removed(ci, cj)) continue;
      const auto v0 = use_vertex(ci, cj);
      const auto v1 = use_vertex(ci + 1, cj);
      const auto v2 = use_vertex(ci + 1, cj + 1);
      const auto v3 = use_vertex(ci, cj + 1);
      m.cells.push_back({v0, v1, v2, v3});
    }
  }

  build_facets(m);

  // Lattice coordinates per vertex id, for exact tag predicates.
  std::vector<std::array<int, 2>> lattice_of(m.vertices.size());
  for (int gj = 0; gj <= ny; ++gj)
    for (int gi = 0; gi <= nx; ++gi) {
      const auto id = vertex_id[lat(gi, gj)];
      if (id >= 0) lattice_of[id] = {gi, gj};
    }

  for (auto& f : m.facets) {
    if (f.tag == BoundaryTag::interior) continue;
    const auto [ai, aj] = lattice_of[f.vertices[0]];
    const auto [bi, bj] = lattice_of[f.vertices[1]];
    if (ai == 0 && bi == 0)
      f.tag = BoundaryTag::inlet;
    else if (ai == nx && bi == nx)
      f.tag = BoundaryTag::outlet;
    else if ((aj == 0 && bj == 0) || (aj == ny && bj == ny))
      f.tag = BoundaryTag::wall;
    else
      f.tag = BoundaryTag::step;  // the only remaining boundary: the cut-out faces
  }

  m.h_max = max_diameter(m);
  return m;
}

Mesh refine(const Mesh& m) {
  Mesh out;
  out.vertices = m.vertices;

  std::map<Edge, std::int32_t> midpoint;
  auto mid_vertex = [&](std::int32_t a, std::int32_t b) {
    const Edge key = sorted_edge(a, b);
    auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    const auto& pa = m.vertices[a];
    const auto& pb = m.vertices[b];
    const auto id = static_cast<std::int32_t>(out.vertices.size());
    out.vertices.push_back({0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])});
    midpoint.emplace(key, id);
    return id;
  };

  out.cells.reserve(4 * m.cells.size());
  for (const auto& c : m.cells) {
    const std::int32_t m01 = mid_vertex(c[0], c[1]);
    const std::int32_t m12 = mid_vertex(c[1], c[2]);
    const std::int32_t m23 = mid_vertex(c[2], c[3]);
    const std::int32_t m30 = mid_vertex(c[3], c[0]);
    const auto& p0 = m.vertices[c[0]];
    const auto& p2 = m.vertices[c[2]];
    const auto ctr = static_cast<std::int32_t>(out.vertices.size());
    out.vertices.push_back({0.5 * (p0[0] + p2[0]), 0.5 * (p0[1] + p2[1])});
    out.cells.push_back({c[0], m01, ctr, m30});
    out.cells.push_back({m01, c[1], m12, ctr});
    out.cells.push_back({ctr, m12, c[2], m23});
    out.cells.push_back({m30, ctr, m23, c[3]});
  }

  build_facets(out);

  // Children of a tagged parent facet inherit its tag.
  std::map<Edge, BoundaryTag> child_tag;
  for (const auto& f : m.facets) {
    if (f.tag == BoundaryTag::interior) continue;
    const auto mid = midpoint.at(sorted_edge(f.vertices[0], f.vertices[1]));
    child_tag[sorted_edge(f.vertices[0], mid)] = f.tag;
    child_tag[sorted_edge(mid, f.vertices[1])] = f.tag;
  }
  for (auto& f : out.facets) {
    if (f.tag == BoundaryTag::interior) continue;
    auto it = child_tag.find(sorted_edge(f.vertices[0], f.vertices[1]));
    if (it == child_tag.end()) throw std::runtime_error("refine: untagged child boundary facet");
    f.tag = it->second;
  }

  out.h_max = max_diameter(out);
  return out;
}

double cell_area(const Mesh& m, std::size_t cell) {
  const auto& c = m.cells[cell];
  double area = 0.0;
  for (int e = 0; e < 4; ++e) {
    const auto& a = m.vertices[c[e]];
    const auto& b = m.vertices[c[(e + 1) % 4]];
    area += a[0] * b[1] - b[0] * a[1];
  }
  return 0.5 * area;
}

double total_area(const Mesh& m) {
  double area = 0.0;
  for (std::size_t c = 0; c < m.n_cells(); ++c) area += cell_area(m, c);
  return area;
}

void validate_mesh(const Mesh& m) {
  for (std::size_t ci = 0; ci < m.n_cells(); ++ci) {
    const auto& c = m.cells[ci];
    for (int i = 0; i < 4; ++i) {
      const auto& p = m.vertices[c[i]];
      const auto& nxt = m.vertices[c[(i + 1) % 4]];
      const auto& prv = m.vertices[c[(i + 3) % 4]];
      const std::array<double, 2> e1{nxt[0] - p[0], nxt[1] - p[1]};
      const std::array<double, 2> e2{prv[0] - p[0], prv[1] - p[1]};
      if (cross(e1, e2) <= 0.0)
        throw std::runtime_error("validate_mesh: non-positive corner Jacobian in cell " + std::to_string(ci));
    }
  }

  std::map<Edge, int> incidence;
  for (const auto& c : m.cells)
    for (const auto& e : kCellEdges) ++incidence[sorted_edge(c[e[0]], c[e[1]])];

  if (incidence.size() != m.facets.size()) throw std::runtime_error("validate_mesh: facet list incomplete");
  for (const auto& f : m.facets) {
    const int count = incidence.at(sorted_edge(f.vertices[0], f.vertices[1]));
    const bool boundary = f.tag != BoundaryTag::interior;
    if (boundary && count != 1) throw std::runtime_error("validate_mesh: boundary facet shared by two cells");
    if (!boundary && count != 2) throw std::runtime_error("validate_mesh: interior facet not shared by two cells");
  }
}

}  // namespace mhdens
