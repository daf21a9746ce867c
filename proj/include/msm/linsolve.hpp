#pragma once

#include "msm/assembly.hpp"

#include <memory>
#include <stdexcept>
#include <string>

namespace msm {

/// block: exact LU of the scalar velocity block inside GMRES on the coupled
/// system, preconditioned with a block-triangular Schur-complement model.
/// direct: sparse LU of the whole system (small problems only).
/// iterative: GMRES with an incomplete LU preconditioner.
enum class SolverType { block, direct, iterative };

SolverType parse_solver_type(const std::string& name);
std::string to_string(SolverType type);

struct SolverOptions {
    SolverType type = SolverType::block;
    double tol = 1e-10; ///< relative residual target
    int max_iter = 2000;
};

struct LinearSolveReport {
    int iterations = 0;         ///< Krylov iterations; 0 for a direct solve without refinement
    double residual_norm = 0.0; ///< ||b - A x||_2, recomputed after the solve
    double rhs_norm = 0.0;
    double wall_time = 0.0; ///< seconds
};

/// Raised when a solve breaks down or cannot reach the requested tolerance.
class SolverFailure : public std::runtime_error {
public:
    SolverFailure(const std::string& what, double best_residual)
        : std::runtime_error(what), best_residual_(best_residual) {}
    double best_residual() const { return best_residual_; }

private:
    double best_residual_;
};

/// General sparse solver with a cached symbolic analysis: successive direct
/// solves with matrices of identical sparsity reuse the fill-reducing
/// ordering. The block type has no meaning for a general matrix and is
/// treated as direct. The residual is always recomputed with an independent
/// multiply and the call throws SolverFailure if it exceeds tol * ||b||.
class LinearSolver {
public:
    explicit LinearSolver(SolverOptions options = {});
    ~LinearSolver();
    LinearSolver(LinearSolver&&) noexcept;
    LinearSolver& operator=(LinearSolver&&) noexcept;

    Eigen::VectorXd solve(const SparseMatrix& a, const Eigen::VectorXd& b);

    const LinearSolveReport& last_report() const { return report_; }
    const SolverOptions& options() const { return options_; }

private:
    struct Impl;
    SolverOptions options_;
    std::unique_ptr<Impl> impl_;
    LinearSolveReport report_;
};

/// One-shot solve.
std::pair<Eigen::VectorXd, LinearSolveReport> solve(const SparseMatrix& a, const Eigen::VectorXd& b,
                                                     const SolverOptions& options = {});

/// Spectral model of the velocity block, A ~ reaction * M + diffusion * K,
/// used to approximate the inverse pressure Schur complement by
/// diffusion * Mp^{-1} + reaction * Lp^{-1} (pressure mass and Laplacian).
struct SchurModel {
    double reaction = 0.0;
    double diffusion = 1.0;
};

/// Solver for systems produced by SaddleAssembler on one space. Dispatches
/// on SolverOptions::type; the direct and iterative types defer to
/// LinearSolver.
class SaddleSolver {
public:
    explicit SaddleSolver(const TaylorHoodSpace& space, SolverOptions options = {});
    ~SaddleSolver();
    SaddleSolver(SaddleSolver&&) noexcept;
    SaddleSolver& operator=(SaddleSolver&&) noexcept;

    Eigen::VectorXd solve(const SaddleSystem& system, const SchurModel& model);

    const LinearSolveReport& last_report() const { return report_; }
    const SolverOptions& options() const { return options_; }

private:
    struct Impl;
    SolverOptions options_;
    std::unique_ptr<Impl> impl_;
    LinearSolveReport report_;
};

} // namespace msm
