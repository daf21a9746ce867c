#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace msm {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

enum class BoundaryTag : int { none = 0, outer = 1, inner = 2 };

struct BoundaryEdge {
    std::array<int, 2> v{};
    BoundaryTag tag = BoundaryTag::none;
};

/// Raised when a triangulation cannot be produced or fails validation.
class MeshError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Conforming triangulation of a 2D domain.
///
/// Construction validates the mesh: every triangle must be counterclockwise
/// with positive area, every edge must be shared by one or two triangles, and
/// the boundary edge list must coincide with the set of edges that belong to
/// exactly one triangle. The mesh is immutable afterwards.
class Mesh {
public:
    Mesh(std::vector<Point> vertices, std::vector<std::array<int, 3>> triangles,
         std::vector<BoundaryEdge> boundary_edges);

    const std::vector<Point>& vertices() const { return vertices_; }
    const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }
    const std::vector<BoundaryEdge>& boundary_edges() const { return boundary_edges_; }

    std::size_t num_vertices() const { return vertices_.size(); }
    std::size_t num_triangles() const { return triangles_.size(); }

    /// Shortest edge over all triangles (the filter width used by the model).
    double h_min() const { return h_min_; }

    double signed_area(std::size_t triangle) const;
    double total_area() const;

private:
    std::vector<Point> vertices_;
    std::vector<std::array<int, 3>> triangles_;
    std::vector<BoundaryEdge> boundary_edges_;
    double h_min_ = 0.0;
};

double signed_area(const Point& a, const Point& b, const Point& c);

/// Uniform triangulation of (-1,1)^2 with `n_per_side` nodes per side.
/// Every grid cell is split into two triangles along its (i,j)-(i+1,j+1)
/// diagonal; all boundary edges are tagged outer.
Mesh build_square_mesh(int n_per_side);

/// Geometry of the offset-cylinder domain: unit disk minus a small disk.
struct AnnulusGeometry {
    double outer_radius = 1.0;
    Point inner_center{0.5, 0.0};
    double inner_radius = 0.1;
};

/// Graded Delaunay triangulation of the offset-cylinder domain with
/// `n_outer` nodes on the outer circle (tag outer) and `n_inner` nodes on the
/// obstacle (tag inner). Interior spacing grows geometrically away from the
/// obstacle until it matches the outer boundary spacing.
Mesh build_annulus_mesh(int n_outer, int n_inner, const AnnulusGeometry& geometry = {});

double shortest_edge(const Mesh& mesh);

// Text I/O. Three sections in Triangle's .node / .ele / .poly-segment layout:
//
//   <nv> 2 0 0            followed by nv lines "id x y"
//   <nt> 3 0              followed by nt lines "id a b c"
//   <nb> 1                followed by nb lines "id a b marker"
//
// Indices are zero-based. Markers: 0 none, 1 outer, 2 inner. Lines starting
// with '#' are comments.
void write_mesh(std::ostream& out, const Mesh& mesh);
Mesh read_mesh(std::istream& in);
void save_mesh(const std::string& path, const Mesh& mesh);
Mesh load_mesh(const std::string& path);

} // namespace msm
