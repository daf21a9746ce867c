#include "msm/verification.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>
#include <stdexcept>

namespace msm {

double check_polarization(const Eigen::VectorXd& u, const Eigen::VectorXd& v, const SparseMatrix& m) {
    if (u.size() != m.cols() || v.size() != m.cols() || m.rows() != m.cols())
        throw std::invalid_argument("check_polarization: size mismatch");
    const Eigen::VectorXd d = u - v;
    const double uv = u.dot(m * v);
    const double uu = u.dot(m * u);
    const double vv = v.dot(m * v);
    const double dd = d.dot(m * d);
    const double defect = std::abs(uv - 0.5 * (uu + vv - dd));
    const double scale = std::abs(uu) + std::abs(vv) + std::abs(dd);
    return scale > 0.0 ? defect / scale : defect;
}

Eigen::VectorXd random_masked_velocity(const TaylorHoodSpace& space, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Eigen::VectorXd w(space.n_vel());
    const auto& mask = space.dirichlet_mask();
    for (int i = 0; i < space.n_vel(); ++i) {
        const double r = dist(rng);
        w[i] = mask[i] ? 0.0 : r;
    }
    return w;
}

namespace {

// Restriction of a scalar P2 matrix to the interior nodes.
Eigen::SparseMatrix<double> restrict_interior(const SparseMatrix& a, const std::vector<int>& index, int n) {
    std::vector<Eigen::Triplet<double>> trips;
    for (int r = 0; r < a.outerSize(); ++r) {
        if (index[r] < 0) continue;
        for (SparseMatrix::InnerIterator it(a, r); it; ++it)
            if (index[it.col()] >= 0) trips.emplace_back(index[r], index[it.col()], it.value());
    }
    Eigen::SparseMatrix<double> out(n, n);
    out.setFromTriplets(trips.begin(), trips.end());
    out.makeCompressed();
    return out;
}

double bbox_extent(const Mesh& mesh, bool diagonal) {
    double xmin = std::numeric_limits<double>::max(), xmax = -xmin, ymin = xmin, ymax = -xmin;
    for (const auto& p : mesh.vertices()) {
        xmin = std::min(xmin, p.x);
        xmax = std::max(xmax, p.x);
        ymin = std::min(ymin, p.y);
        ymax = std::max(ymax, p.y);
    }
    return diagonal ? std::hypot(xmax - xmin, ymax - ymin) : std::min(xmax - xmin, ymax - ymin);
}

} // namespace

PoincareReport check_poincare(const TaylorHoodSpace& space, std::uint64_t seed, int samples) {
    PoincareReport rep;
    rep.seed = seed;
    rep.samples = samples;
    const SparseMatrix mass = assemble_mass(space);
    const SparseMatrix stiff = assemble_stiffness(space);
    for (int s = 0; s < samples; ++s) {
        const Eigen::VectorXd u = random_masked_velocity(space, seed + static_cast<std::uint64_t>(s));
        const double g = u.dot(stiff * u);
        if (g <= 0.0) continue;
        rep.empirical = std::max(rep.empirical, std::sqrt(u.dot(mass * u) / g));
    }

    std::vector<int> index(space.num_nodes(), -1);
    int n = 0;
    for (int i = 0; i < space.num_nodes(); ++i)
        if (!space.node_mask()[i]) index[i] = n++;
    if (n == 0) throw std::invalid_argument("check_poincare: no interior nodes");
    const auto m = restrict_interior(assemble_scalar_mass(space), index, n);
    const auto k = restrict_interior(assemble_scalar_stiffness(space), index, n);
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(k);
    if (lu.info() != Eigen::Success) throw std::runtime_error("check_poincare: stiffness factorization failed");
    Eigen::VectorXd x = Eigen::VectorXd::Ones(n);
    double lambda = 0.0;
    for (int it = 0; it < 500; ++it) {
        Eigen::VectorXd y = lu.solve(m * x);
        y /= std::sqrt(y.dot(m * y));
        const double next = y.dot(k * y);
        x = y;
        if (it > 0 && std::abs(next - lambda) <= 1e-14 * next) {
            lambda = next;
            break;
        }
        lambda = next;
    }
    rep.eigen_ratio = 1.0 / std::sqrt(lambda);
    rep.bound = bbox_extent(space.mesh(), false) / std::acos(-1.0);
    rep.diameter = bbox_extent(space.mesh(), true);
    return rep;
}

double infsup_constant(const Eigen::MatrixXd& b, const Eigen::MatrixXd& k, const Eigen::MatrixXd& mp) {
    if (k.rows() != k.cols() || b.cols() != k.rows() || mp.rows() != b.rows() || mp.cols() != b.rows())
        throw std::invalid_argument("infsup_constant: size mismatch");
    if (b.rows() < 2) throw std::invalid_argument("infsup_constant: need at least two pressure dofs");
    const Eigen::LDLT<Eigen::MatrixXd> kf(k);
    Eigen::MatrixXd s = b * kf.solve(b.transpose());
    s = 0.5 * (s + s.transpose()).eval();
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(s, mp, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw std::runtime_error("infsup_constant: eigen-solve failed");
    return std::sqrt(std::max(0.0, es.eigenvalues()[1]));
}

double check_infsup(const TaylorHoodSpace& space) {
    const auto& mask = space.dirichlet_mask();
    std::vector<int> free;
    for (int i = 0; i < space.n_vel(); ++i)
        if (!mask[i]) free.push_back(i);
    const Eigen::MatrixXd kfull = Eigen::MatrixXd(assemble_stiffness(space));
    const Eigen::MatrixXd bfull = Eigen::MatrixXd(assemble_divergence(space));
    const int nf = static_cast<int>(free.size());
    Eigen::MatrixXd k(nf, nf), b(space.n_pre(), nf);
    for (int j = 0; j < nf; ++j) {
        for (int i = 0; i < nf; ++i) k(i, j) = kfull(free[i], free[j]);
        b.col(j) = bfull.col(free[j]);
    }
    const Eigen::MatrixXd mp = Eigen::MatrixXd(assemble_scalar_mass(space, ScalarOrder::p1));
    return infsup_constant(b, k, mp);
}

Mat2 smagorinsky_flux(const Mat2& a) {
    const double n = frobenius(a);
    return {{{n * a[0][0], n * a[0][1]}, {n * a[1][0], n * a[1][1]}}};
}

namespace {

Mat2 minus(const Mat2& a, const Mat2& b) {
    return {{{a[0][0] - b[0][0], a[0][1] - b[0][1]}, {a[1][0] - b[1][0], a[1][1] - b[1][1]}}};
}

} // namespace

double sm_pointwise_ratio(const Mat2& a, const Mat2& b) {
    const Mat2 d = minus(a, b);
    const double nd = frobenius(d);
    if (nd == 0.0) throw std::invalid_argument("sm_pointwise_ratio: A == B");
    return contract(minus(smagorinsky_flux(a), smagorinsky_flux(b)), d) / (nd * nd * nd);
}

double llc_pointwise_ratio(const Mat2& a, const Mat2& b) {
    const double nd = frobenius(minus(a, b));
    if (nd == 0.0) throw std::invalid_argument("llc_pointwise_ratio: A == B");
    const double r = std::max(frobenius(a), frobenius(b));
    return frobenius(minus(smagorinsky_flux(a), smagorinsky_flux(b))) / (r * nd);
}

double sm_form(const TaylorHoodSpace& space, const Eigen::VectorXd& u, const Eigen::VectorXd& w) {
    double s = 0.0;
    for (int e = 0; e < space.num_elements(); ++e)
        for (int q = 0; q < space.num_qp(); ++q) {
            const Mat2 gu = gradient_at(space, u, e, q);
            const Mat2 gw = gradient_at(space, w, e, q);
            s += space.jxw(e, q) * contract(minus(smagorinsky_flux(gu), smagorinsky_flux(gw)), minus(gu, gw));
        }
    return s;
}

double grad_l3_norm(const TaylorHoodSpace& space, const Eigen::VectorXd& u) {
    double s = 0.0;
    for (int e = 0; e < space.num_elements(); ++e)
        for (int q = 0; q < space.num_qp(); ++q) {
            const double n = frobenius(gradient_at(space, u, e, q));
            s += space.jxw(e, q) * n * n * n;
        }
    return std::cbrt(s);
}

MonotonicityReport check_monotonicity_suite(const TaylorHoodSpace& space, int n_random, std::uint64_t seed) {
    if (n_random < 1) throw std::invalid_argument("check_monotonicity_suite: n_random must be positive");
    MonotonicityReport rep;
    rep.seed = seed;
    rep.samples = n_random;
    rep.sm_min_ratio = std::numeric_limits<double>::infinity();
    rep.sm_pointwise_min_ratio = std::numeric_limits<double>::infinity();
    std::mt19937_64 scale_rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::uniform_real_distribution<double> scale_dist(0.1, 10.0);
    for (int s = 0; s < n_random; ++s) {
        const Eigen::VectorXd u = random_masked_velocity(space, seed + 2 * static_cast<std::uint64_t>(s));
        const Eigen::VectorXd w = random_masked_velocity(space, seed + 2 * static_cast<std::uint64_t>(s) + 1);
        const double lhs = sm_form(space, u, w);
        const double l3 = grad_l3_norm(space, u - w);
        rep.sm_min_ratio = std::min(rep.sm_min_ratio, lhs / (l3 * l3 * l3));
        for (int e = 0; e < space.num_elements(); ++e)
            for (int q = 0; q < space.num_qp(); ++q) {
                const Mat2 gu = gradient_at(space, u, e, q);
                const Mat2 gw = gradient_at(space, w, e, q);
                if (frobenius(minus(gu, gw)) == 0.0) continue;
                rep.sm_pointwise_min_ratio = std::min(rep.sm_pointwise_min_ratio, sm_pointwise_ratio(gu, gw));
                rep.llc_max_ratio = std::max(rep.llc_max_ratio, llc_pointwise_ratio(gu, gw));
            }
        const double t = scale_dist(scale_rng);
        const double scaled_lhs = sm_form(space, t * u, t * w);
        rep.homogeneity_defect = std::max(rep.homogeneity_defect, std::abs(scaled_lhs - t * t * t * lhs) / std::abs(t * t * t * lhs));
        rep.self_defect = std::max(rep.self_defect, std::abs(sm_form(space, u, u)));
    }
    return rep;
}

void print_report(std::ostream& out, const PoincareReport& r) {
    out << "poincare: seed=" << r.seed << " samples=" << r.samples << " empirical=" << r.empirical
        << " eigen_ratio=" << r.eigen_ratio << " bound=" << r.bound << " diameter=" << r.diameter << '\n';
}

void print_report(std::ostream& out, const MonotonicityReport& r) {
    out << "monotonicity: seed=" << r.seed << " samples=" << r.samples << " sm_min_ratio=" << r.sm_min_ratio
        << " sm_pointwise_min_ratio=" << r.sm_pointwise_min_ratio << " llc_max_ratio=" << r.llc_max_ratio
        << " homogeneity_defect=" << r.homogeneity_defect << " self_defect=" << r.self_defect << '\n';
}

} // namespace msm
