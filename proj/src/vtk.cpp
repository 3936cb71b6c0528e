#include "mhdens/vtk.hpp"

#include <fstream>
#include <stdexcept>

namespace mhdens {

void write_vtk(const std::string& path, const Mesh& mesh, const std::string& title,
               const VtkPointData& data) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_vtk: cannot open " + path);
  out.precision(12);

  const std::size_t nv = mesh.n_vertices();
  out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << nv << " double\n";
  for (const auto& p : mesh.vertices) out << p[0] << " " << p[1] << " 0\n";

  out << "CELLS " << mesh.n_cells() << " " << 5 * mesh.n_cells() << "\n";
  for (const auto& c : mesh.cells) out << "4 " << c[0] << " " << c[1] << " " << c[2] << " " << c[3] << "\n";
  out << "CELL_TYPES " << mesh.n_cells() << "\n";
  for (std::size_t c = 0; c < mesh.n_cells(); ++c) out << "9\n";

  out << "POINT_DATA " << nv << "\n";
  for (const auto& [name, values] : data.vectors) {
    if (values.size() != nv) throw std::runtime_error("write_vtk: vector field size mismatch: " + name);
    out << "VECTORS " << name << " double\n";
    for (const auto& v : values) out << v[0] << " " << v[1] << " 0\n";
  }
  for (const auto& [name, values] : data.scalars) {
    if (values.size() != nv) throw std::runtime_error("write_vtk: scalar field size mismatch: " + name);
    out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (const double s : values) out << s << "\n";
  }
  if (!out) throw std::runtime_error("write_vtk: write failed for " + path);
}

}  // namespace mhdens
