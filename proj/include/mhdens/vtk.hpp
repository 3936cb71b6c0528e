// Legacy ASCII VTK writer for vertex data on quadrilateral meshes.
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mhdens/fem.hpp"
#include "mhdens/mesh.hpp"

namespace mhdens {

struct VtkPointData {
  std::vector<std::pair<std::string, std::vector<Vec2>>> vectors;
  std::vector<std::pair<std::string, std::vector<double>>> scalars;
};

/// Writes an unstructured-grid file with one value per mesh vertex.
/// Throws std::runtime_error when the path is not writable.
void write_vtk(const std::string& path, const Mesh& mesh, const std::string& title,
               const VtkPointData& data);

}  // namespace mhdens
