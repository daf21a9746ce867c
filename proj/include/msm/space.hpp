#pragma once

#include "msm/mesh.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <functional>
#include <memory>
#include <vector>

namespace msm {

/// Barycentric coordinates on a triangle. Reference coordinates are
/// (xi, eta) = (l1, l2), so l0 = 1 - xi - eta.
struct Barycentric {
    double l0 = 1.0 / 3.0;
    double l1 = 1.0 / 3.0;
    double l2 = 1.0 / 3.0;
};

/// Quadratic Lagrange basis on the reference triangle. Ordering: the three
/// vertex functions, then the midpoints of edges (0,1), (1,2), (2,0).
/// Gradients are with respect to the reference coordinates (xi, eta).
struct P2BasisValues {
    std::array<double, 6> value{};
    std::array<std::array<double, 2>, 6> grad{};
};

P2BasisValues eval_p2_basis(const Barycentric& point);

struct QuadratureRule {
    int degree = 0;
    std::vector<Barycentric> points;
    std::vector<double> weights; // sum to the reference area 1/2
};

/// Symmetric triangle rules exact to `degree`; supported degrees 4, 5, 6.
QuadratureRule make_quadrature(int degree);

inline constexpr int default_quadrature_degree = 5;

using Vec2 = std::array<double, 2>;
using Mat2 = std::array<std::array<double, 2>, 2>; // Mat2[i][j] = d u_i / d x_j
using VectorFunction = std::function<Vec2(double x, double y, double t)>;
using ScalarFunction = std::function<double(double x, double y, double t)>;

enum class FieldKind { velocity, pressure };

/// Coefficients of a discrete function in a TaylorHoodSpace. Velocity
/// layout: all x-components over the P2 nodes, then all y-components.
/// Pressure layout: one value per mesh vertex.
struct Field {
    FieldKind kind = FieldKind::velocity;
    Eigen::VectorXd coeffs;
    double time = 0.0;
};

/// P2 velocity / P1 pressure degrees of freedom over a mesh, together with
/// per-element quadrature tables (physical weights, basis values and
/// physical gradients) shared by every assembler and functional.
class TaylorHoodSpace {
public:
    explicit TaylorHoodSpace(std::shared_ptr<const Mesh> mesh, int quadrature_degree = default_quadrature_degree);

    const Mesh& mesh() const { return *mesh_; }
    std::shared_ptr<const Mesh> mesh_ptr() const { return mesh_; }

    int num_vertices() const { return num_vertices_; }
    int num_edges() const { return static_cast<int>(edges_.size()); }
    /// Scalar P2 nodes: vertices followed by edge midpoints.
    int num_nodes() const { return num_vertices_ + num_edges(); }
    int n_vel() const { return 2 * num_nodes(); }
    int n_pre() const { return num_vertices_; }
    int num_elements() const { return static_cast<int>(element_nodes_.size()); }

    const std::vector<std::array<int, 2>>& edges() const { return edges_; }
    const std::array<int, 6>& element_nodes(int e) const { return element_nodes_[e]; }
    const std::array<int, 3>& element_vertices(int e) const { return mesh_->triangles()[e]; }
    const Point& node(int i) const { return nodes_[i]; }
    const std::vector<Point>& nodes() const { return nodes_; }

    /// Per scalar P2 node: true when the node lies on a tagged boundary edge.
    const std::vector<bool>& node_mask() const { return node_mask_; }
    /// Per velocity dof (length n_vel).
    const std::vector<bool>& dirichlet_mask() const { return dirichlet_mask_; }

    const QuadratureRule& quadrature() const { return rule_; }
    int num_qp() const { return static_cast<int>(rule_.weights.size()); }

    // Element tables, indexed by (element, quadrature point).
    double jxw(int e, int q) const { return jxw_[e * nq_ + q]; }
    Point qp_coord(int e, int q) const { return qp_xy_[e * nq_ + q]; }
    const std::array<double, 6>& phi(int q) const { return phi_[q]; }
    const std::array<double, 3>& psi(int q) const { return psi_[q]; }
    /// Physical gradients of the six P2 basis functions.
    const std::array<std::array<double, 2>, 6>& dphi(int e, int q) const { return dphi_[e * nq_ + q]; }
    /// Physical gradients of the three P1 basis functions (constant per element).
    const std::array<std::array<double, 2>, 3>& dpsi(int e) const { return dpsi_[e]; }

    Field zero_velocity(double t = 0.0) const;
    Field zero_pressure(double t = 0.0) const;

private:
    std::shared_ptr<const Mesh> mesh_;
    int num_vertices_ = 0;
    std::vector<std::array<int, 2>> edges_;
    std::vector<std::array<int, 6>> element_nodes_;
    std::vector<Point> nodes_;
    std::vector<bool> node_mask_;
    std::vector<bool> dirichlet_mask_;

    QuadratureRule rule_;
    int nq_ = 0;
    std::vector<double> jxw_;
    std::vector<Point> qp_xy_;
    std::vector<std::array<double, 6>> phi_;
    std::vector<std::array<double, 3>> psi_;
    std::vector<std::array<std::array<double, 2>, 6>> dphi_;
    std::vector<std::array<std::array<double, 2>, 3>> dpsi_;
};

/// Nodal interpolant of a velocity function at time t.
Field interpolate(const TaylorHoodSpace& space, const VectorFunction& f, double t = 0.0);
/// Nodal interpolant of a pressure function at time t.
Field interpolate(const TaylorHoodSpace& space, const ScalarFunction& f, double t = 0.0);

/// Throws std::invalid_argument when the coefficient length does not match the space.
void require_conforming(const TaylorHoodSpace& space, const Field& field, FieldKind kind);

// Pointwise evaluation of velocity fields at element quadrature points.
Vec2 velocity_at(const TaylorHoodSpace& space, const Eigen::VectorXd& w, int e, int q);
Mat2 gradient_at(const TaylorHoodSpace& space, const Eigen::VectorXd& w, int e, int q);
double pressure_at(const TaylorHoodSpace& space, const Eigen::VectorXd& p, int e, int q);

inline double frobenius(const Mat2& g) {
    return std::sqrt(g[0][0] * g[0][0] + g[0][1] * g[0][1] + g[1][0] * g[1][0] + g[1][1] * g[1][1]);
}
inline double contract(const Mat2& a, const Mat2& b) {
    return a[0][0] * b[0][0] + a[0][1] * b[0][1] + a[1][0] * b[1][0] + a[1][1] * b[1][1];
}

} // namespace msm
