#include "msm/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace msm {

void ModelParams::validate() const {
    if (!(nu > 0) || !(c_s > 0) || !(mu > 0) || !(delta > 0) || !(dt > 0))
        throw std::invalid_argument("ModelParams: nu, c_s, mu, delta and dt must all be positive");
}

namespace {

using Triplet = Eigen::Triplet<double, int>;

// Element loop over the scalar P2 pattern. `local(e, K)` fills the 6x6
// element matrix K.
template <typename Local>
SparseMatrix assemble_p2(const TaylorHoodSpace& space, Local&& local) {
    const int ne = space.num_elements();
    std::vector<Triplet> trips;
    trips.reserve(static_cast<std::size_t>(ne) * 36);
    double K[6][6];
    for (int e = 0; e < ne; ++e) {
        std::fill(&K[0][0], &K[0][0] + 36, 0.0);
        local(e, K);
        const auto& nodes = space.element_nodes(e);
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j) trips.emplace_back(nodes[i], nodes[j], K[i][j]);
    }
    SparseMatrix m(space.num_nodes(), space.num_nodes());
    m.setFromTriplets(trips.begin(), trips.end());
    return m;
}

template <typename Local>
SparseMatrix assemble_p1(const TaylorHoodSpace& space, Local&& local) {
    const int ne = space.num_elements();
    std::vector<Triplet> trips;
    trips.reserve(static_cast<std::size_t>(ne) * 9);
    double K[3][3];
    for (int e = 0; e < ne; ++e) {
        std::fill(&K[0][0], &K[0][0] + 9, 0.0);
        local(e, K);
        const auto& verts = space.element_vertices(e);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) trips.emplace_back(verts[i], verts[j], K[i][j]);
    }
    SparseMatrix m(space.n_pre(), space.n_pre());
    m.setFromTriplets(trips.begin(), trips.end());
    return m;
}

double dot2(const std::array<double, 2>& a, const std::array<double, 2>& b) { return a[0] * b[0] + a[1] * b[1]; }

int find_entry(const SparseMatrix& m, int row, int col) {
    const int* begin = m.innerIndexPtr() + m.outerIndexPtr()[row];
    const int* end = m.innerIndexPtr() + m.outerIndexPtr()[row + 1];
    const int* it = std::lower_bound(begin, end, col);
    if (it == end || *it != col) throw std::logic_error("SaddleAssembler: entry missing from pattern");
    return static_cast<int>(it - m.innerIndexPtr());
}

} // namespace

SparseMatrix assemble_scalar_mass(const TaylorHoodSpace& space, ScalarOrder order) {
    const int nq = space.num_qp();
    if (order == ScalarOrder::p1) {
        return assemble_p1(space, [&](int e, double K[3][3]) {
            for (int q = 0; q < nq; ++q) {
                const double w = space.jxw(e, q);
                const auto& psi = space.psi(q);
                for (int i = 0; i < 3; ++i)
                    for (int j = 0; j < 3; ++j) K[i][j] += w * psi[i] * psi[j];
            }
        });
    }
    return assemble_p2(space, [&](int e, double K[6][6]) {
        for (int q = 0; q < nq; ++q) {
            const double w = space.jxw(e, q);
            const auto& phi = space.phi(q);
            for (int i = 0; i < 6; ++i)
                for (int j = 0; j < 6; ++j) K[i][j] += w * phi[i] * phi[j];
        }
    });
}

SparseMatrix assemble_scalar_stiffness(const TaylorHoodSpace& space, ScalarOrder order) {
    const int nq = space.num_qp();
    if (order == ScalarOrder::p1) {
        return assemble_p1(space, [&](int e, double K[3][3]) {
            const auto& dpsi = space.dpsi(e);
            double area = 0.0;
            for (int q = 0; q < nq; ++q) area += space.jxw(e, q);
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) K[i][j] = area * dot2(dpsi[i], dpsi[j]);
        });
    }
    return assemble_p2(space, [&](int e, double K[6][6]) {
        for (int q = 0; q < nq; ++q) {
            const double w = space.jxw(e, q);
            const auto& dphi = space.dphi(e, q);
            for (int i = 0; i < 6; ++i)
                for (int j = 0; j < 6; ++j) K[i][j] += w * dot2(dphi[i], dphi[j]);
        }
    });
}

SparseMatrix assemble_scalar_convection(const TaylorHoodSpace& space, const Field& a) {
    require_conforming(space, a, FieldKind::velocity);
    const int nq = space.num_qp();
    return assemble_p2(space, [&](int e, double K[6][6]) {
        double C[6][6] = {};
        for (int q = 0; q < nq; ++q) {
            const double w = space.jxw(e, q);
            const Vec2 av = velocity_at(space, a.coeffs, e, q);
            const auto& phi = space.phi(q);
            const auto& dphi = space.dphi(e, q);
            double adv[6];
            for (int j = 0; j < 6; ++j) adv[j] = av[0] * dphi[j][0] + av[1] * dphi[j][1];
            for (int i = 0; i < 6; ++i)
                for (int j = 0; j < 6; ++j) C[i][j] += w * adv[j] * phi[i];
        }
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j) K[i][j] = 0.5 * (C[i][j] - C[j][i]);
    });
}

SparseMatrix assemble_scalar_eddy(const TaylorHoodSpace& space, const Field& w_lag, double coefficient) {
    require_conforming(space, w_lag, FieldKind::velocity);
    const int nq = space.num_qp();
    return assemble_p2(space, [&](int e, double K[6][6]) {
        for (int q = 0; q < nq; ++q) {
            const double nu_t = coefficient * frobenius(gradient_at(space, w_lag.coeffs, e, q));
            const double w = space.jxw(e, q) * nu_t;
            const auto& dphi = space.dphi(e, q);
            for (int i = 0; i < 6; ++i)
                for (int j = 0; j < 6; ++j) K[i][j] += w * dot2(dphi[i], dphi[j]);
        }
    });
}

SparseMatrix vector_block(const SparseMatrix& scalar) {
    const int n = static_cast<int>(scalar.rows());
    std::vector<Triplet> trips;
    trips.reserve(2 * static_cast<std::size_t>(scalar.nonZeros()));
    for (int r = 0; r < n; ++r)
        for (SparseMatrix::InnerIterator it(scalar, r); it; ++it) {
            trips.emplace_back(r, static_cast<int>(it.col()), it.value());
            trips.emplace_back(n + r, n + static_cast<int>(it.col()), it.value());
        }
    SparseMatrix m(2 * n, 2 * n);
    m.setFromTriplets(trips.begin(), trips.end());
    return m;
}

SparseMatrix assemble_mass(const TaylorHoodSpace& space) { return vector_block(assemble_scalar_mass(space)); }

SparseMatrix assemble_stiffness(const TaylorHoodSpace& space) {
    return vector_block(assemble_scalar_stiffness(space));
}

SparseMatrix assemble_eddy_viscosity(const TaylorHoodSpace& space, const Field& w_lag, const ModelParams& params) {
    return vector_block(assemble_scalar_eddy(space, w_lag, params.eddy()));
}

SparseMatrix assemble_trilinear(const TaylorHoodSpace& space, const Field& a) {
    return vector_block(assemble_scalar_convection(space, a));
}

SparseMatrix assemble_divergence(const TaylorHoodSpace& space) {
    const int nq = space.num_qp();
    const int nn = space.num_nodes();
    std::vector<Triplet> trips;
    trips.reserve(static_cast<std::size_t>(space.num_elements()) * 36);
    for (int e = 0; e < space.num_elements(); ++e) {
        double Bx[3][6] = {};
        double By[3][6] = {};
        for (int q = 0; q < nq; ++q) {
            const double w = space.jxw(e, q);
            const auto& psi = space.psi(q);
            const auto& dphi = space.dphi(e, q);
            for (int a = 0; a < 3; ++a)
                for (int i = 0; i < 6; ++i) {
                    Bx[a][i] += w * psi[a] * dphi[i][0];
                    By[a][i] += w * psi[a] * dphi[i][1];
                }
        }
        const auto& verts = space.element_vertices(e);
        const auto& nodes = space.element_nodes(e);
        for (int a = 0; a < 3; ++a)
            for (int i = 0; i < 6; ++i) {
                trips.emplace_back(verts[a], nodes[i], Bx[a][i]);
                trips.emplace_back(verts[a], nn + nodes[i], By[a][i]);
            }
    }
    SparseMatrix m(space.n_pre(), space.n_vel());
    m.setFromTriplets(trips.begin(), trips.end());
    return m;
}

Eigen::VectorXd assemble_body_force(const TaylorHoodSpace& space, const VectorFunction& f, double t) {
    const int nq = space.num_qp();
    const int nn = space.num_nodes();
    Eigen::VectorXd F = Eigen::VectorXd::Zero(space.n_vel());
    for (int e = 0; e < space.num_elements(); ++e) {
        const auto& nodes = space.element_nodes(e);
        for (int q = 0; q < nq; ++q) {
            const Point xq = space.qp_coord(e, q);
            const Vec2 fv = f(xq.x, xq.y, t);
            const double w = space.jxw(e, q);
            const auto& phi = space.phi(q);
            for (int i = 0; i < 6; ++i) {
                F[nodes[i]] += w * fv[0] * phi[i];
                F[nn + nodes[i]] += w * fv[1] * phi[i];
            }
        }
    }
    return F;
}

Eigen::VectorXd pressure_mean_weights(const TaylorHoodSpace& space) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(space.n_pre());
    for (int e = 0; e < space.num_elements(); ++e) {
        const auto& verts = space.element_vertices(e);
        for (int q = 0; q < space.num_qp(); ++q)
            for (int a = 0; a < 3; ++a) c[verts[a]] += space.jxw(e, q) * space.psi(q)[a];
    }
    return c;
}

namespace {

struct P1Geometry {
    double det;
    std::array<std::array<double, 2>, 3> grad;
};

P1Geometry p1_geometry(const std::array<Point, 3>& tri) {
    const double j00 = tri[1].x - tri[0].x, j01 = tri[2].x - tri[0].x;
    const double j10 = tri[1].y - tri[0].y, j11 = tri[2].y - tri[0].y;
    const double det = j00 * j11 - j01 * j10;
    constexpr double dl[3][2] = {{-1.0, -1.0}, {1.0, 0.0}, {0.0, 1.0}};
    P1Geometry g{det, {}};
    for (int i = 0; i < 3; ++i)
        g.grad[i] = {(j11 * dl[i][0] - j10 * dl[i][1]) / det, (-j01 * dl[i][0] + j00 * dl[i][1]) / det};
    return g;
}

} // namespace

Eigen::Matrix3d p1_element_mass(const std::array<Point, 3>& tri) {
    const auto g = p1_geometry(tri);
    const auto rule = make_quadrature(default_quadrature_degree);
    Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
    for (std::size_t q = 0; q < rule.weights.size(); ++q) {
        const auto& b = rule.points[q];
        const double l[3] = {b.l0, b.l1, b.l2};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) m(i, j) += rule.weights[q] * std::abs(g.det) * l[i] * l[j];
    }
    return m;
}

Eigen::Matrix3d p1_element_stiffness(const std::array<Point, 3>& tri) {
    const auto g = p1_geometry(tri);
    const double area = 0.5 * std::abs(g.det);
    Eigen::Matrix3d k;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) k(i, j) = area * dot2(g.grad[i], g.grad[j]);
    return k;
}

SaddleAssembler::SaddleAssembler(const TaylorHoodSpace& space)
    : space_(&space), divergence_(assemble_divergence(space)), mean_weights_(pressure_mean_weights(space)) {
    const int nn = space.num_nodes();
    const int nv = space.n_vel();
    const int np = space.n_pre();
    const int lambda = nv + np;
    const SparseMatrix scalar = assemble_scalar_mass(space);

    std::vector<Triplet> trips;
    trips.reserve(2 * scalar.nonZeros() + 2 * divergence_.nonZeros() + 2 * np);
    for (int r = 0; r < nn; ++r)
        for (SparseMatrix::InnerIterator it(scalar, r); it; ++it) {
            trips.emplace_back(r, static_cast<int>(it.col()), 0.0);
            trips.emplace_back(nn + r, nn + static_cast<int>(it.col()), 0.0);
        }
    for (int r = 0; r < np; ++r)
        for (SparseMatrix::InnerIterator it(divergence_, r); it; ++it) {
            trips.emplace_back(nv + r, static_cast<int>(it.col()), 0.0);
            trips.emplace_back(static_cast<int>(it.col()), nv + r, 0.0);
        }
    for (int r = 0; r < np; ++r) {
        trips.emplace_back(nv + r, lambda, 0.0);
        trips.emplace_back(lambda, nv + r, 0.0);
    }
    pattern_.resize(lambda + 1, lambda + 1);
    pattern_.setFromTriplets(trips.begin(), trips.end());
    pattern_.makeCompressed();

    for (int r = 0; r < nn; ++r)
        for (SparseMatrix::InnerIterator it(scalar, r); it; ++it) {
            pos_x_.push_back(find_entry(pattern_, r, static_cast<int>(it.col())));
            pos_y_.push_back(find_entry(pattern_, nn + r, nn + static_cast<int>(it.col())));
        }
    for (int r = 0; r < np; ++r)
        for (SparseMatrix::InnerIterator it(divergence_, r); it; ++it) {
            pos_b_.push_back(find_entry(pattern_, nv + r, static_cast<int>(it.col())));
            pos_bt_.push_back(find_entry(pattern_, static_cast<int>(it.col()), nv + r));
        }
    for (int r = 0; r < np; ++r) {
        pos_c_.push_back(find_entry(pattern_, nv + r, lambda));
        pos_ct_.push_back(find_entry(pattern_, lambda, nv + r));
    }
}

SaddleSystem SaddleAssembler::build(const SparseMatrix& scalar_block, const Eigen::VectorXd& velocity_rhs) const {
    const TaylorHoodSpace& space = *space_;
    if (static_cast<std::size_t>(scalar_block.nonZeros()) != pos_x_.size() || !scalar_block.isCompressed())
        throw std::invalid_argument("SaddleAssembler::build: velocity block does not match the P2 pattern");
    if (velocity_rhs.size() != space.n_vel()) throw std::invalid_argument("SaddleAssembler::build: bad rhs length");

    SaddleSystem sys;
    sys.n_vel = space.n_vel();
    sys.n_pre = space.n_pre();
    sys.matrix = pattern_;
    double* val = sys.matrix.valuePtr();
    const double* s = scalar_block.valuePtr();
    for (std::size_t k = 0; k < pos_x_.size(); ++k) {
        val[pos_x_[k]] = s[k];
        val[pos_y_[k]] = s[k];
    }
    const double* b = divergence_.valuePtr();
    for (std::size_t k = 0; k < pos_b_.size(); ++k) {
        val[pos_b_[k]] = -b[k];
        val[pos_bt_[k]] = -b[k];
    }
    for (std::size_t k = 0; k < pos_c_.size(); ++k) {
        val[pos_c_[k]] = mean_weights_[static_cast<Eigen::Index>(k)];
        val[pos_ct_[k]] = mean_weights_[static_cast<Eigen::Index>(k)];
    }
    sys.rhs = Eigen::VectorXd::Zero(sys.size());
    sys.rhs.head(sys.n_vel) = velocity_rhs;
    apply_dirichlet(sys, space);
    return sys;
}

void apply_dirichlet(SaddleSystem& system, const TaylorHoodSpace& space) {
    const auto& mask = space.dirichlet_mask();
    const int nv = system.n_vel;
    if (nv != space.n_vel()) throw std::invalid_argument("apply_dirichlet: system does not match the space");
    auto masked = [&](int i) { return i < nv && mask[i]; };
    SparseMatrix& m = system.matrix;
    for (int r = 0; r < m.outerSize(); ++r) {
        const bool row_masked = masked(r);
        for (SparseMatrix::InnerIterator it(m, r); it; ++it) {
            const int c = static_cast<int>(it.col());
            if (row_masked)
                it.valueRef() = (c == r) ? 1.0 : 0.0;
            else if (masked(c))
                it.valueRef() = 0.0;
        }
        if (row_masked) system.rhs[r] = 0.0;
    }
}

double symmetry_defect(const SparseMatrix& a) {
    const SparseMatrix at = a.transpose();
    const SparseMatrix diff = a - at;
    double dmax = 0.0, amax = 0.0;
    for (int k = 0; k < diff.nonZeros(); ++k) dmax = std::max(dmax, std::abs(diff.valuePtr()[k]));
    for (int k = 0; k < a.nonZeros(); ++k) amax = std::max(amax, std::abs(a.valuePtr()[k]));
    return amax > 0 ? dmax / amax : 0.0;
}

} // namespace msm
