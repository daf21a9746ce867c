#include "msm/mesh.hpp"

#include "delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <unordered_map>

namespace msm {

namespace {

std::uint64_t edge_key(int a, int b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

double distance(const Point& a, const Point& b) { return std::hypot(a.x - b.x, a.y - b.y); }

} // namespace

double signed_area(const Point& a, const Point& b, const Point& c) {
    return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

Mesh::Mesh(std::vector<Point> vertices, std::vector<std::array<int, 3>> triangles,
           std::vector<BoundaryEdge> boundary_edges)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles)),
      boundary_edges_(std::move(boundary_edges)) {
    if (triangles_.empty()) throw MeshError("mesh has no triangles");
    const int nv = static_cast<int>(vertices_.size());

    std::unordered_map<std::uint64_t, int> edge_count;
    edge_count.reserve(triangles_.size() * 3);
    h_min_ = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < triangles_.size(); ++t) {
        const auto& tri = triangles_[t];
        for (int v : tri)
            if (v < 0 || v >= nv) throw MeshError("triangle references a missing vertex");
        if (!(signed_area(t) > 0.0))
            throw MeshError("triangle " + std::to_string(t) + " is inverted or degenerate");
        for (int k = 0; k < 3; ++k) {
            const int a = tri[k];
            const int b = tri[(k + 1) % 3];
            ++edge_count[edge_key(a, b)];
            h_min_ = std::min(h_min_, distance(vertices_[a], vertices_[b]));
        }
    }

    std::size_t n_boundary = 0;
    for (const auto& [key, count] : edge_count) {
        if (count > 2) throw MeshError("edge shared by more than two triangles");
        if (count == 1) ++n_boundary;
    }
    if (n_boundary != boundary_edges_.size())
        throw MeshError("boundary edge list does not match the triangulation boundary");
    for (const auto& be : boundary_edges_) {
        auto it = edge_count.find(edge_key(be.v[0], be.v[1]));
        if (it == edge_count.end() || it->second != 1)
            throw MeshError("listed boundary edge is not a boundary edge of the triangulation");
    }
}

double Mesh::signed_area(std::size_t triangle) const {
    const auto& t = triangles_.at(triangle);
    return msm::signed_area(vertices_[t[0]], vertices_[t[1]], vertices_[t[2]]);
}

double Mesh::total_area() const {
    double area = 0.0;
    for (std::size_t t = 0; t < triangles_.size(); ++t) area += signed_area(t);
    return area;
}

double shortest_edge(const Mesh& mesh) { return mesh.h_min(); }

Mesh build_square_mesh(int n_per_side) {
    if (n_per_side < 2) throw std::invalid_argument("build_square_mesh: n_per_side must be >= 2");
    const int n = n_per_side;
    const double h = 2.0 / (n - 1);
    std::vector<Point> vertices;
    vertices.reserve(static_cast<std::size_t>(n) * n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            // Pin the last node exactly to +1.
            const double x = (i == n - 1) ? 1.0 : -1.0 + i * h;
            const double y = (j == n - 1) ? 1.0 : -1.0 + j * h;
            vertices.push_back({x, y});
        }
    auto id = [n](int i, int j) { return j * n + i; };

    std::vector<std::array<int, 3>> triangles;
    triangles.reserve(2 * static_cast<std::size_t>(n - 1) * (n - 1));
    for (int j = 0; j + 1 < n; ++j)
        for (int i = 0; i + 1 < n; ++i) {
            triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }

    std::vector<BoundaryEdge> boundary;
    for (int i = 0; i + 1 < n; ++i) {
        boundary.push_back({{id(i, 0), id(i + 1, 0)}, BoundaryTag::outer});
        boundary.push_back({{id(n - 1, i), id(n - 1, i + 1)}, BoundaryTag::outer});
        boundary.push_back({{id(i + 1, n - 1), id(i, n - 1)}, BoundaryTag::outer});
        boundary.push_back({{id(0, i + 1), id(0, i)}, BoundaryTag::outer});
    }
    return Mesh(std::move(vertices), std::move(triangles), std::move(boundary));
}

namespace {

/// Uniform bucket grid for nearest-neighbour rejection while seeding points.
class PointGrid {
public:
    PointGrid(double xmin, double ymin, double xmax, double ymax, double cell)
        : x0_(xmin), y0_(ymin), cell_(cell),
          nx_(static_cast<int>(std::ceil((xmax - xmin) / cell)) + 1),
          ny_(static_cast<int>(std::ceil((ymax - ymin) / cell)) + 1),
          buckets_(static_cast<std::size_t>(nx_) * ny_) {}

    void insert(const Point& p, int id) { buckets_[bucket(p)].push_back(id); }

    /// True if any stored point lies closer than `radius` to `p`.
    bool any_within(const Point& p, double radius, const std::vector<Point>& pts) const {
        const int reach = static_cast<int>(std::ceil(radius / cell_));
        const int ci = cx(p.x);
        const int cj = cy(p.y);
        for (int j = std::max(0, cj - reach); j <= std::min(ny_ - 1, cj + reach); ++j)
            for (int i = std::max(0, ci - reach); i <= std::min(nx_ - 1, ci + reach); ++i)
                for (int id : buckets_[static_cast<std::size_t>(j) * nx_ + i])
                    if (distance(pts[id], p) < radius) return true;
        return false;
    }

private:
    int cx(double x) const { return std::clamp(static_cast<int>((x - x0_) / cell_), 0, nx_ - 1); }
    int cy(double y) const { return std::clamp(static_cast<int>((y - y0_) / cell_), 0, ny_ - 1); }
    std::size_t bucket(const Point& p) const {
        return static_cast<std::size_t>(cy(p.y)) * nx_ + cx(p.x);
    }

    double x0_, y0_, cell_;
    int nx_, ny_;
    std::vector<std::vector<int>> buckets_;
};

} // namespace

Mesh build_annulus_mesh(int n_outer, int n_inner, const AnnulusGeometry& geo) {
    if (n_outer < 8 || n_inner < 8)
        throw std::invalid_argument("build_annulus_mesh: need at least 8 nodes per circle");
    const double two_pi = 2.0 * std::numbers::pi;
    const double R = geo.outer_radius;
    const double r = geo.inner_radius;
    const Point c = geo.inner_center;
    if (std::hypot(c.x, c.y) + r >= R) throw std::invalid_argument("obstacle must lie inside the disk");

    const double h_out = two_pi * R / n_outer;
    const double h_in = two_pi * r / n_inner;
    constexpr double growth = 0.25;
    const double row = std::sqrt(3.0) / 2.0;
    auto sizing = [&](const Point& p) {
        const double d = std::max(0.0, distance(p, c) - r);
        return std::min(h_out, h_in + growth * d);
    };

    std::vector<Point> pts;
    PointGrid grid(-R, -R, R, R, h_out);
    auto add = [&](const Point& p) {
        grid.insert(p, static_cast<int>(pts.size()));
        pts.push_back(p);
    };

    const int n_outer_nodes = n_outer;
    for (int i = 0; i < n_outer; ++i) {
        const double a = two_pi * i / n_outer;
        add({R * std::cos(a), R * std::sin(a)});
    }
    const int n_inner_begin = static_cast<int>(pts.size());
    for (int i = 0; i < n_inner; ++i) {
        const double a = two_pi * i / n_inner;
        add({c.x + r * std::cos(a), c.y + r * std::sin(a)});
    }

    std::mt19937 rng(20240611u);
    std::uniform_real_distribution<double> jitter(-0.02, 0.02);
    // Keeps seeded points off the diametral circles of the outer boundary
    // chords so every boundary segment survives as a Delaunay edge.
    const double outer_guard = R * (std::cos(std::numbers::pi / n_outer) - std::sin(std::numbers::pi / n_outer));
    auto try_add = [&](Point p, double h) {
        p.x += jitter(rng) * h;
        p.y += jitter(rng) * h;
        const double rho = std::hypot(p.x, p.y);
        if (rho > outer_guard - 0.45 * h) return;
        if (distance(p, c) < r + 0.6 * h_in) return;
        if (grid.any_within(p, 0.7 * std::min(h, sizing(p)), pts)) return;
        add(p);
    };

    // Graded rings around the obstacle.
    double radius = r;
    double spacing = h_in;
    int ring = 0;
    while (spacing < h_out) {
        radius += row * spacing;
        ++ring;
        spacing = std::min(h_out, h_in + growth * (radius - r));
        const int count = std::max(n_inner, static_cast<int>(std::lround(two_pi * radius / spacing)));
        const double offset = (ring % 2) ? 0.5 : 0.0;
        for (int i = 0; i < count; ++i) {
            const double a = two_pi * (i + offset) / count;
            try_add({c.x + radius * std::cos(a), c.y + radius * std::sin(a)}, spacing);
        }
    }

    // Background rings about the origin at the outer spacing.
    ring = 0;
    for (double rho = R - row * h_out; rho > 0.5 * h_out; rho -= row * h_out) {
        ++ring;
        const int count = std::max(3, static_cast<int>(std::lround(two_pi * rho / h_out)));
        const double offset = (ring % 2) ? 0.5 : 0.0;
        for (int i = 0; i < count; ++i) {
            const double a = two_pi * (i + offset) / count;
            try_add({rho * std::cos(a), rho * std::sin(a)}, h_out);
        }
    }
    try_add({0.0, 0.0}, h_out);

    auto triangles = delaunay_triangulate(pts);

    // Drop the triangles filling the obstacle: those made only of obstacle nodes.
    auto on_inner = [&](int v) { return v >= n_inner_begin && v < n_inner_begin + n_inner; };
    auto on_outer = [&](int v) { return v < n_outer_nodes; };
    std::erase_if(triangles, [&](const std::array<int, 3>& t) {
        return on_inner(t[0]) && on_inner(t[1]) && on_inner(t[2]);
    });

    std::map<std::uint64_t, std::pair<std::array<int, 2>, int>> edges;
    for (const auto& t : triangles)
        for (int k = 0; k < 3; ++k) {
            const int a = t[k];
            const int b = t[(k + 1) % 3];
            auto [it, inserted] = edges.try_emplace(edge_key(a, b), std::array<int, 2>{a, b}, 0);
            ++it->second.second;
        }
    std::vector<BoundaryEdge> boundary;
    for (const auto& [key, entry] : edges) {
        if (entry.second != 1) continue;
        const auto [a, b] = entry.first;
        if (on_outer(a) && on_outer(b))
            boundary.push_back({{a, b}, BoundaryTag::outer});
        else if (on_inner(a) && on_inner(b))
            boundary.push_back({{a, b}, BoundaryTag::inner});
        else
            throw MeshError("annulus mesh: boundary segment was not recovered");
    }
    if (boundary.size() != static_cast<std::size_t>(n_outer + n_inner))
        throw MeshError("annulus mesh: wrong number of boundary segments");

    return Mesh(std::move(pts), std::move(triangles), std::move(boundary));
}

} // namespace msm
