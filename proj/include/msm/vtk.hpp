#pragma once

#include "msm/space.hpp"

#include <iosfwd>
#include <string>

namespace msm {

/// Legacy ASCII VTK unstructured grid with one quadratic triangle (cell type
/// 22) per element. Point data: the velocity vector at every P2 node and the
/// P1 pressure interpolated to the same nodes. An empty pressure field is
/// written as zeros.
void write_vtk(std::ostream& out, const TaylorHoodSpace& space, const Field& velocity, const Field& pressure,
               const std::string& title = "msm solution");
void write_vtk(const std::string& path, const TaylorHoodSpace& space, const Field& velocity, const Field& pressure,
               const std::string& title = "msm solution");

} // namespace msm
