#include "msm/linsolve.hpp"

#include <Eigen/SparseLU>
#include <unsupported/Eigen/IterativeSolvers>

#include <chrono>
#include <cmath>
#include <optional>

namespace msm {

SolverType parse_solver_type(const std::string& name) {
    if (name == "block") return SolverType::block;
    if (name == "direct") return SolverType::direct;
    if (name == "iterative") return SolverType::iterative;
    throw std::invalid_argument("unknown solver type '" + name + "' (expected block, direct or iterative)");
}

std::string to_string(SolverType type) {
    switch (type) {
    case SolverType::block: return "block";
    case SolverType::direct: return "direct";
    case SolverType::iterative: return "iterative";
    }
    return "?";
}

namespace {

using ColMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
using DirectLU = Eigen::SparseLU<ColMatrix, Eigen::COLAMDOrdering<int>>;
using Clock = std::chrono::steady_clock;

void check_options(const SolverOptions& o) {
    if (!(o.tol > 0)) throw std::invalid_argument("solver: tol must be positive");
    if (o.max_iter < 1) throw std::invalid_argument("solver: max_iter must be positive");
}

// LU with the symbolic analysis kept while the sparsity pattern is unchanged.
class CachedLU {
public:
    void factorize(const ColMatrix& a, const char* what) {
        if (!lu_ || !same_pattern(a)) {
            lu_.emplace();
            lu_->analyzePattern(a);
            outer_.assign(a.outerIndexPtr(), a.outerIndexPtr() + a.outerSize() + 1);
            inner_.assign(a.innerIndexPtr(), a.innerIndexPtr() + a.nonZeros());
        }
        lu_->factorize(a);
        if (lu_->info() != Eigen::Success) {
            lu_.reset();
            throw SolverFailure(std::string(what) + ": LU factorization failed (singular matrix?)", 0.0);
        }
    }
    Eigen::VectorXd solve(const Eigen::VectorXd& b) const { return lu_->solve(b); }

private:
    bool same_pattern(const ColMatrix& a) const {
        if (static_cast<std::size_t>(a.outerSize() + 1) != outer_.size()) return false;
        if (static_cast<std::size_t>(a.nonZeros()) != inner_.size()) return false;
        return std::equal(outer_.begin(), outer_.end(), a.outerIndexPtr()) &&
               std::equal(inner_.begin(), inner_.end(), a.innerIndexPtr());
    }

    std::optional<DirectLU> lu_;
    std::vector<int> outer_;
    std::vector<int> inner_;
};

void finish_report(LinearSolveReport& report, const SparseMatrix& a, const Eigen::VectorXd& b,
                   const Eigen::VectorXd& x, Clock::time_point start, double target) {
    if (!x.allFinite()) {
        report.residual_norm = std::numeric_limits<double>::infinity();
        throw SolverFailure("linear solve produced non-finite values", report.residual_norm);
    }
    report.residual_norm = (b - a * x).norm();
    report.wall_time = std::chrono::duration<double>(Clock::now() - start).count();
    if (!(report.residual_norm <= target))
        throw SolverFailure("linear solve missed tolerance: residual " + std::to_string(report.residual_norm) +
                                " > " + std::to_string(target),
                            report.residual_norm);
}

} // namespace

struct LinearSolver::Impl {
    CachedLU lu;
};

LinearSolver::LinearSolver(SolverOptions options) : options_(options), impl_(std::make_unique<Impl>()) {
    check_options(options_);
}

LinearSolver::~LinearSolver() = default;
LinearSolver::LinearSolver(LinearSolver&&) noexcept = default;
LinearSolver& LinearSolver::operator=(LinearSolver&&) noexcept = default;

Eigen::VectorXd LinearSolver::solve(const SparseMatrix& a_rows, const Eigen::VectorXd& b) {
    const auto start = Clock::now();
    if (a_rows.rows() != a_rows.cols()) throw std::invalid_argument("solve: matrix is not square");
    if (a_rows.rows() != b.size()) throw std::invalid_argument("solve: right-hand side does not conform");

    report_ = {};
    report_.rhs_norm = b.norm();
    const double target = options_.tol * report_.rhs_norm;
    if (report_.rhs_norm == 0.0) {
        Eigen::VectorXd x = Eigen::VectorXd::Zero(b.size());
        finish_report(report_, a_rows, b, x, start, 0.0);
        return x;
    }

    ColMatrix a = a_rows;
    a.makeCompressed();
    Eigen::VectorXd x;

    if (options_.type != SolverType::iterative) {
        impl_->lu.factorize(a, "direct solver");
        x = impl_->lu.solve(b);
        Eigen::VectorXd r = b - a_rows * x;
        for (int k = 0; k < 3 && r.norm() > target && x.allFinite(); ++k) {
            x += impl_->lu.solve(r);
            r = b - a_rows * x;
            report_.iterations = k + 1;
        }
    } else {
        Eigen::GMRES<ColMatrix, Eigen::IncompleteLUT<double, int>> gmres;
        gmres.preconditioner().setDroptol(1e-6);
        gmres.preconditioner().setFillfactor(20);
        gmres.set_restart(200);
        gmres.setMaxIterations(options_.max_iter);
        gmres.setTolerance(options_.tol);
        gmres.compute(a);
        if (gmres.info() != Eigen::Success)
            throw SolverFailure("iterative solver: preconditioner setup failed", report_.rhs_norm);
        x = gmres.solve(b);
        report_.iterations = static_cast<int>(gmres.iterations());
    }
    finish_report(report_, a_rows, b, x, start, target);
    return x;
}

std::pair<Eigen::VectorXd, LinearSolveReport> solve(const SparseMatrix& a, const Eigen::VectorXd& b,
                                                     const SolverOptions& options) {
    LinearSolver solver(options);
    Eigen::VectorXd x = solver.solve(a, b);
    return {std::move(x), solver.last_report()};
}

namespace {

// Upper block-triangular preconditioner for the bordered saddle system
// [[A, G, 0], [D, 0, c], [0, c', 0]] with G = -B^T and D = -B. The pressure
// part applies -(diffusion Mp^{-1} + reaction Lp^{-1}) to the mean-free part
// of the residual; the multiplier and the pressure constant follow exactly
// from 1'D = 0. The velocity part solves A exactly, one component at a time.
class SchurPreconditioner {
public:
    struct Parts {
        const CachedLU* velocity = nullptr; // scalar block
        const CachedLU* mass = nullptr;     // P1 mass
        const CachedLU* laplace = nullptr;  // P1 Laplacian with the first row pinned
        const SparseMatrix* gradient = nullptr; // G, n_vel x n_pre
        const Eigen::VectorXd* mean = nullptr;  // c
        SchurModel model;
    };

    void setup(const Parts& parts) { parts_ = parts; }

    template <typename M> SchurPreconditioner& analyzePattern(const M&) { return *this; }
    template <typename M> SchurPreconditioner& factorize(const M&) { return *this; }
    template <typename M> SchurPreconditioner& compute(const M&) { return *this; }
    Eigen::ComputationInfo info() const { return Eigen::Success; }

    Eigen::VectorXd solve(const Eigen::VectorXd& r) const {
        const Eigen::VectorXd& c = *parts_.mean;
        const Eigen::Index np = c.size();
        const Eigen::Index nv = r.size() - np - 1;
        const Eigen::Index nn = nv / 2;
        const double c_sum = c.sum();

        Eigen::VectorXd z(r.size());
        const double lambda = r.segment(nv, np).sum() / c_sum;
        Eigen::VectorXd rp = r.segment(nv, np) - lambda * c;
        Eigen::VectorXd rl = rp;
        rl[0] = 0.0;
        Eigen::VectorXd zp = Eigen::VectorXd::Zero(np);
        if (parts_.model.diffusion != 0.0) zp -= parts_.model.diffusion * parts_.mass->solve(rp);
        if (parts_.model.reaction != 0.0) zp -= parts_.model.reaction * parts_.laplace->solve(rl);
        zp.array() += (r[nv + np] - c.dot(zp)) / c_sum;

        const Eigen::VectorXd ru = r.head(nv) - *parts_.gradient * zp;
        z.head(nn) = parts_.velocity->solve(ru.head(nn));
        z.segment(nn, nn) = parts_.velocity->solve(ru.segment(nn, nn));
        z.segment(nv, np) = zp;
        z[nv + np] = lambda;
        return z;
    }

private:
    Parts parts_;
};

} // namespace

struct SaddleSolver::Impl {
    const TaylorHoodSpace* space = nullptr;
    LinearSolver fallback;
    CachedLU velocity;
    CachedLU mass;
    CachedLU laplace;
    Eigen::VectorXd mean;
};

SaddleSolver::SaddleSolver(const TaylorHoodSpace& space, SolverOptions options)
    : options_(options), impl_(std::make_unique<Impl>()) {
    check_options(options_);
    impl_->space = &space;
    impl_->fallback = LinearSolver(options_);
    if (options_.type != SolverType::block) return;

    ColMatrix mp = assemble_scalar_mass(space, ScalarOrder::p1);
    mp.makeCompressed();
    impl_->mass.factorize(mp, "pressure mass");
    SparseMatrix lp_rows = assemble_scalar_stiffness(space, ScalarOrder::p1);
    for (SparseMatrix::InnerIterator it(lp_rows, 0); it; ++it) it.valueRef() = it.col() == 0 ? 1.0 : 0.0;
    ColMatrix lp = lp_rows;
    lp.makeCompressed();
    impl_->laplace.factorize(lp, "pressure Laplacian");
    impl_->mean = pressure_mean_weights(space);
}

SaddleSolver::~SaddleSolver() = default;
SaddleSolver::SaddleSolver(SaddleSolver&&) noexcept = default;
SaddleSolver& SaddleSolver::operator=(SaddleSolver&&) noexcept = default;

Eigen::VectorXd SaddleSolver::solve(const SaddleSystem& system, const SchurModel& model) {
    if (system.n_vel != impl_->space->n_vel() || system.n_pre != impl_->space->n_pre())
        throw std::invalid_argument("SaddleSolver: system does not belong to this space");
    if (options_.type != SolverType::block) {
        Eigen::VectorXd x = impl_->fallback.solve(system.matrix, system.rhs);
        report_ = impl_->fallback.last_report();
        return x;
    }

    const auto start = Clock::now();
    report_ = {};
    const Eigen::VectorXd& b = system.rhs;
    report_.rhs_norm = b.norm();
    const double target = options_.tol * report_.rhs_norm;
    if (report_.rhs_norm == 0.0) {
        Eigen::VectorXd x = Eigen::VectorXd::Zero(b.size());
        finish_report(report_, system.matrix, b, x, start, 0.0);
        return x;
    }

    const int nn = system.n_vel / 2;
    ColMatrix scalar = system.matrix.topLeftCorner(nn, nn);
    scalar.makeCompressed();
    impl_->velocity.factorize(scalar, "velocity block");
    const SparseMatrix gradient = system.matrix.block(0, system.n_vel, system.n_vel, system.n_pre);

    Eigen::GMRES<SparseMatrix, SchurPreconditioner> gmres;
    gmres.preconditioner().setup({&impl_->velocity, &impl_->mass, &impl_->laplace, &gradient, &impl_->mean, model});
    gmres.set_restart(std::min(options_.max_iter, 150));
    gmres.setMaxIterations(options_.max_iter);
    gmres.compute(system.matrix);

    // GMRES monitors the preconditioned residual; tighten and restart from
    // the current iterate until the true residual meets the target.
    Eigen::VectorXd x = Eigen::VectorXd::Zero(b.size());
    double tol = options_.tol;
    for (int pass = 0; pass < 4; ++pass) {
        gmres.setTolerance(tol);
        x = gmres.solveWithGuess(b, x);
        report_.iterations += static_cast<int>(gmres.iterations());
        if (!x.allFinite()) break;
        const double res = (b - system.matrix * x).norm();
        if (res <= target) break;
        tol = std::max(tol * 0.5 * target / res, 1e-15);
    }
    finish_report(report_, system.matrix, b, x, start, target);
    return x;
}

} // namespace msm
