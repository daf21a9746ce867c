#pragma once

#include "msm/mesh.hpp"

#include <array>
#include <vector>

namespace msm {

/// Delaunay triangulation of a point set (Bowyer-Watson with neighbour
/// walking). Returns counterclockwise vertex triples covering the convex
/// hull. Throws MeshError on geometric failure.
std::vector<std::array<int, 3>> delaunay_triangulate(const std::vector<Point>& points);

} // namespace msm
