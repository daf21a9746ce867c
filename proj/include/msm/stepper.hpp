#pragma once

#include "msm/assembly.hpp"
#include "msm/linsolve.hpp"

#include <string>

namespace msm {

enum class Scheme { backward_euler, cnle };

/// Accepts "be" / "backward_euler" and "cnle".
Scheme parse_scheme(const std::string& name);
std::string to_string(Scheme scheme);

/// State of a run after `step_index` steps. `w_prev` is only read by CNLE.
/// The pressure belongs to t for Backward Euler and to t - dt/2 for CNLE.
struct SimState {
    Field w_prev;
    Field w_curr;
    Field p_curr;
    double t0 = 0.0;
    double t = 0.0;
    int step_index = 0;
};

/// Initial state from w0. CNLE starts with w_prev = w0, so the first
/// extrapolant equals w0.
SimState bootstrap(const Field& w0, Scheme scheme, double t0 = 0.0);

/// Advances the fully discrete model. Both schemes are linearly implicit:
/// the convecting velocity and the eddy-viscosity coefficient are lagged, so
/// every step is one sparse saddle-point solve.
///
/// Backward Euler:
///   (M + aK)(w1 - w0)/k + N(w0) w1 + nu K w1 + E(w0) w1 - B^T p1 = F(t1),  B w1 = 0
/// CNLE, with wh = (w0 + w1)/2 and we = (3 w0 - w_prev)/2:
///   (M + aK)(w1 - w0)/k + N(we) wh + nu K wh + E(we) wh - B^T ph = F(t0 + k/2),  B wh = 0
/// where a = C_s^4 delta^2 / mu^2 and E is the Smagorinsky operator.
class Stepper {
public:
    Stepper(const TaylorHoodSpace& space, ModelParams params, VectorFunction force, SolverOptions solver = {});

    SimState step_backward_euler(const SimState& state);
    SimState step_cnle(const SimState& state);
    SimState advance(const SimState& state, Scheme scheme);

    /// Steady Stokes problem nu K w - B^T p = F(t), B w = 0.
    std::pair<Field, Field> solve_stokes(double t);

    const TaylorHoodSpace& space() const { return *space_; }
    const ModelParams& params() const { return params_; }
    const VectorFunction& force() const { return force_; }
    const SaddleAssembler& saddle() const { return saddle_; }
    const LinearSolveReport& last_report() const { return solver_.last_report(); }

private:
    std::pair<Field, Field> solve_system(const SparseMatrix& scalar_block, const Eigen::VectorXd& rhs, double t,
                                         const SchurModel& model);

    const TaylorHoodSpace* space_;
    ModelParams params_;
    VectorFunction force_;
    SaddleAssembler saddle_;
    SaddleSolver solver_;
    SparseMatrix mass_;      // scalar P2
    SparseMatrix stiffness_; // scalar P2
    SparseMatrix inertia_;   // mass_ + a * stiffness_
};

SimState step_backward_euler(const SimState& state, const ModelParams& params, const VectorFunction& f,
                             const TaylorHoodSpace& space);
SimState step_cnle(const SimState& state, const ModelParams& params, const VectorFunction& f,
                   const TaylorHoodSpace& space);

/// Applies a scalar P2 operator to both components of a velocity vector.
Eigen::VectorXd apply_vector(const SparseMatrix& scalar, const Eigen::VectorXd& w);

} // namespace msm
