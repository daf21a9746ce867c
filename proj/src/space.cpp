#include "msm/space.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace msm {

P2BasisValues eval_p2_basis(const Barycentric& b) {
    const double l[3] = {b.l0, b.l1, b.l2};
    // d(lambda_i)/d(xi, eta)
    constexpr double dl[3][2] = {{-1.0, -1.0}, {1.0, 0.0}, {0.0, 1.0}};
    P2BasisValues out;
    for (int i = 0; i < 3; ++i) {
        out.value[i] = l[i] * (2.0 * l[i] - 1.0);
        for (int d = 0; d < 2; ++d) out.grad[i][d] = (4.0 * l[i] - 1.0) * dl[i][d];
    }
    constexpr int pair[3][2] = {{0, 1}, {1, 2}, {2, 0}};
    for (int k = 0; k < 3; ++k) {
        const int i = pair[k][0];
        const int j = pair[k][1];
        out.value[3 + k] = 4.0 * l[i] * l[j];
        for (int d = 0; d < 2; ++d) out.grad[3 + k][d] = 4.0 * (l[j] * dl[i][d] + l[i] * dl[j][d]);
    }
    return out;
}

namespace {

void add_centroid(QuadratureRule& rule, double w) {
    rule.points.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
    rule.weights.push_back(0.5 * w);
}

// Orbit (1-2a, a, a) and its rotations.
void add_orbit3(QuadratureRule& rule, double a, double w) {
    const double b = 1.0 - 2.0 * a;
    for (const Barycentric& p : {Barycentric{b, a, a}, Barycentric{a, b, a}, Barycentric{a, a, b}}) {
        rule.points.push_back(p);
        rule.weights.push_back(0.5 * w);
    }
}

// Orbit of (a, b, 1-a-b) under all six permutations.
void add_orbit6(QuadratureRule& rule, double a, double b, double w) {
    const double c = 1.0 - a - b;
    for (const Barycentric& p : {Barycentric{a, b, c}, Barycentric{a, c, b}, Barycentric{b, a, c},
                                 Barycentric{b, c, a}, Barycentric{c, a, b}, Barycentric{c, b, a}}) {
        rule.points.push_back(p);
        rule.weights.push_back(0.5 * w);
    }
}

} // namespace

QuadratureRule make_quadrature(int degree) {
    QuadratureRule rule;
    rule.degree = degree;
    switch (degree) {
    case 4:
        add_orbit3(rule, 0.44594849091596488632, 0.22338158967801146570);
        add_orbit3(rule, 0.09157621350977074346, 0.10995174365532186764);
        break;
    case 5: {
        const double s = std::sqrt(15.0);
        add_centroid(rule, 9.0 / 40.0);
        add_orbit3(rule, (6.0 - s) / 21.0, (155.0 - s) / 1200.0);
        add_orbit3(rule, (6.0 + s) / 21.0, (155.0 + s) / 1200.0);
        break;
    }
    case 6:
        add_orbit3(rule, 0.24928674517091042129, 0.11678627572637936603);
        add_orbit3(rule, 0.06308901449150222834, 0.050844906370206816921);
        add_orbit6(rule, 0.053145049844816947353, 0.31035245103378440542, 0.082851075618373575194);
        break;
    default:
        throw std::invalid_argument("make_quadrature: unsupported degree " + std::to_string(degree));
    }
    return rule;
}

TaylorHoodSpace::TaylorHoodSpace(std::shared_ptr<const Mesh> mesh, int quadrature_degree)
    : mesh_(std::move(mesh)), rule_(make_quadrature(quadrature_degree)) {
    if (!mesh_) throw std::invalid_argument("TaylorHoodSpace: null mesh");
    const auto& verts = mesh_->vertices();
    const auto& tris = mesh_->triangles();
    num_vertices_ = static_cast<int>(verts.size());

    std::unordered_map<std::uint64_t, int> edge_id;
    edge_id.reserve(tris.size() * 2);
    auto key = [](int a, int b) {
        if (a > b) std::swap(a, b);
        return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
    };
    element_nodes_.resize(tris.size());
    for (std::size_t t = 0; t < tris.size(); ++t) {
        const auto& tri = tris[t];
        auto& nodes = element_nodes_[t];
        for (int k = 0; k < 3; ++k) {
            nodes[k] = tri[k];
            const int a = tri[k];
            const int b = tri[(k + 1) % 3];
            auto [it, inserted] = edge_id.try_emplace(key(a, b), static_cast<int>(edges_.size()));
            if (inserted) edges_.push_back({a, b});
            nodes[3 + k] = num_vertices_ + it->second;
        }
    }

    nodes_.reserve(num_nodes());
    nodes_.insert(nodes_.end(), verts.begin(), verts.end());
    for (const auto& [a, b] : edges_)
        nodes_.push_back({0.5 * (verts[a].x + verts[b].x), 0.5 * (verts[a].y + verts[b].y)});

    node_mask_.assign(num_nodes(), false);
    for (const auto& be : mesh_->boundary_edges()) {
        if (be.tag == BoundaryTag::none) continue;
        node_mask_[be.v[0]] = true;
        node_mask_[be.v[1]] = true;
        node_mask_[num_vertices_ + edge_id.at(key(be.v[0], be.v[1]))] = true;
    }
    dirichlet_mask_.assign(n_vel(), false);
    for (int i = 0; i < num_nodes(); ++i) {
        dirichlet_mask_[i] = node_mask_[i];
        dirichlet_mask_[num_nodes() + i] = node_mask_[i];
    }

    // Quadrature tables.
    nq_ = static_cast<int>(rule_.weights.size());
    phi_.resize(nq_);
    psi_.resize(nq_);
    std::vector<P2BasisValues> ref(nq_);
    for (int q = 0; q < nq_; ++q) {
        ref[q] = eval_p2_basis(rule_.points[q]);
        phi_[q] = ref[q].value;
        psi_[q] = {rule_.points[q].l0, rule_.points[q].l1, rule_.points[q].l2};
    }
    const std::size_t ne = tris.size();
    jxw_.resize(ne * nq_);
    qp_xy_.resize(ne * nq_);
    dphi_.resize(ne * nq_);
    dpsi_.resize(ne);
    constexpr double dl[3][2] = {{-1.0, -1.0}, {1.0, 0.0}, {0.0, 1.0}};
    for (std::size_t e = 0; e < ne; ++e) {
        const Point& p0 = verts[tris[e][0]];
        const Point& p1 = verts[tris[e][1]];
        const Point& p2 = verts[tris[e][2]];
        const double j00 = p1.x - p0.x, j01 = p2.x - p0.x;
        const double j10 = p1.y - p0.y, j11 = p2.y - p0.y;
        const double det = j00 * j11 - j01 * j10;
        auto to_physical = [&](double gxi, double geta) {
            return std::array<double, 2>{(j11 * gxi - j10 * geta) / det, (-j01 * gxi + j00 * geta) / det};
        };
        for (int i = 0; i < 3; ++i) dpsi_[e][i] = to_physical(dl[i][0], dl[i][1]);
        for (int q = 0; q < nq_; ++q) {
            const std::size_t idx = e * nq_ + q;
            jxw_[idx] = rule_.weights[q] * det;
            const auto& b = rule_.points[q];
            qp_xy_[idx] = {b.l0 * p0.x + b.l1 * p1.x + b.l2 * p2.x, b.l0 * p0.y + b.l1 * p1.y + b.l2 * p2.y};
            for (int i = 0; i < 6; ++i) dphi_[idx][i] = to_physical(ref[q].grad[i][0], ref[q].grad[i][1]);
        }
    }
}

Field TaylorHoodSpace::zero_velocity(double t) const {
    return Field{FieldKind::velocity, Eigen::VectorXd::Zero(n_vel()), t};
}

Field TaylorHoodSpace::zero_pressure(double t) const {
    return Field{FieldKind::pressure, Eigen::VectorXd::Zero(n_pre()), t};
}

Field interpolate(const TaylorHoodSpace& space, const VectorFunction& f, double t) {
    Field out = space.zero_velocity(t);
    const int nn = space.num_nodes();
    for (int i = 0; i < nn; ++i) {
        const Point& p = space.node(i);
        const Vec2 v = f(p.x, p.y, t);
        out.coeffs[i] = v[0];
        out.coeffs[nn + i] = v[1];
    }
    return out;
}

Field interpolate(const TaylorHoodSpace& space, const ScalarFunction& f, double t) {
    Field out = space.zero_pressure(t);
    for (int i = 0; i < space.n_pre(); ++i) {
        const Point& p = space.node(i);
        out.coeffs[i] = f(p.x, p.y, t);
    }
    return out;
}

void require_conforming(const TaylorHoodSpace& space, const Field& field, FieldKind kind) {
    const Eigen::Index expected = kind == FieldKind::velocity ? space.n_vel() : space.n_pre();
    if (field.kind != kind || field.coeffs.size() != expected)
        throw std::invalid_argument("field does not conform to the space (expected length " +
                                    std::to_string(expected) + ", got " + std::to_string(field.coeffs.size()) + ")");
}

Vec2 velocity_at(const TaylorHoodSpace& space, const Eigen::VectorXd& w, int e, int q) {
    const auto& nodes = space.element_nodes(e);
    const auto& phi = space.phi(q);
    const int nn = space.num_nodes();
    Vec2 v{0.0, 0.0};
    for (int i = 0; i < 6; ++i) {
        v[0] += w[nodes[i]] * phi[i];
        v[1] += w[nn + nodes[i]] * phi[i];
    }
    return v;
}

Mat2 gradient_at(const TaylorHoodSpace& space, const Eigen::VectorXd& w, int e, int q) {
    const auto& nodes = space.element_nodes(e);
    const auto& dphi = space.dphi(e, q);
    const int nn = space.num_nodes();
    Mat2 g{};
    for (int i = 0; i < 6; ++i) {
        const double wx = w[nodes[i]];
        const double wy = w[nn + nodes[i]];
        g[0][0] += wx * dphi[i][0];
        g[0][1] += wx * dphi[i][1];
        g[1][0] += wy * dphi[i][0];
        g[1][1] += wy * dphi[i][1];
    }
    return g;
}

double pressure_at(const TaylorHoodSpace& space, const Eigen::VectorXd& p, int e, int q) {
    const auto& verts = space.element_vertices(e);
    const auto& psi = space.psi(q);
    return p[verts[0]] * psi[0] + p[verts[1]] * psi[1] + p[verts[2]] * psi[2];
}

} // namespace msm
