#include "msm/stepper.hpp"

namespace msm {

Scheme parse_scheme(const std::string& name) {
    if (name == "be" || name == "backward_euler") return Scheme::backward_euler;
    if (name == "cnle") return Scheme::cnle;
    throw std::invalid_argument("unknown scheme '" + name + "' (expected be or cnle)");
}

std::string to_string(Scheme scheme) { return scheme == Scheme::backward_euler ? "be" : "cnle"; }

SimState bootstrap(const Field& w0, Scheme /*scheme*/, double t0) {
    if (w0.kind != FieldKind::velocity) throw std::invalid_argument("bootstrap: w0 must be a velocity field");
    SimState s;
    s.w_curr = w0;
    s.w_curr.time = t0;
    s.w_prev = s.w_curr;
    s.p_curr = Field{FieldKind::pressure, Eigen::VectorXd(), t0};
    s.t0 = t0;
    s.t = t0;
    s.step_index = 0;
    return s;
}

Eigen::VectorXd apply_vector(const SparseMatrix& scalar, const Eigen::VectorXd& w) {
    const Eigen::Index n = scalar.rows();
    Eigen::VectorXd out(2 * n);
    out.head(n) = scalar * w.head(n);
    out.tail(n) = scalar * w.tail(n);
    return out;
}

Stepper::Stepper(const TaylorHoodSpace& space, ModelParams params, VectorFunction force, SolverOptions solver)
    : space_(&space), params_(params), force_(std::move(force)), saddle_(space), solver_(space, solver),
      mass_(assemble_scalar_mass(space)), stiffness_(assemble_scalar_stiffness(space)) {
    params_.validate();
    if (!force_) throw std::invalid_argument("Stepper: body force must be set");
    inertia_ = mass_ + params_.dispersion() * stiffness_;
}

std::pair<Field, Field> Stepper::solve_system(const SparseMatrix& scalar_block, const Eigen::VectorXd& rhs,
                                              double t, const SchurModel& model) {
    const SaddleSystem sys = saddle_.build(scalar_block, rhs);
    const Eigen::VectorXd x = solver_.solve(sys, model);
    Field w{FieldKind::velocity, x.head(sys.n_vel), t};
    const auto& mask = space_->dirichlet_mask();
    for (int i = 0; i < sys.n_vel; ++i)
        if (mask[i]) w.coeffs[i] = 0.0;
    Field p{FieldKind::pressure, x.segment(sys.n_vel, sys.n_pre), t};
    return {std::move(w), std::move(p)};
}

SimState Stepper::step_backward_euler(const SimState& state) {
    require_conforming(*space_, state.w_curr, FieldKind::velocity);
    const double k = params_.dt;
    const double t_next = state.t0 + (state.step_index + 1) * k;
    const Field& w0 = state.w_curr;

    const SparseMatrix block = (1.0 / k) * inertia_ + params_.nu * stiffness_ +
                               assemble_scalar_convection(*space_, w0) +
                               assemble_scalar_eddy(*space_, w0, params_.eddy());
    const Eigen::VectorXd rhs = assemble_body_force(*space_, force_, t_next) + (1.0 / k) * apply_vector(inertia_, w0.coeffs);

    auto [w1, p1] = solve_system(block, rhs, t_next, {1.0 / k, params_.nu + params_.dispersion() / k});
    SimState next;
    next.w_prev = w0;
    next.w_curr = std::move(w1);
    next.p_curr = std::move(p1);
    next.t0 = state.t0;
    next.t = t_next;
    next.step_index = state.step_index + 1;
    return next;
}

SimState Stepper::step_cnle(const SimState& state) {
    require_conforming(*space_, state.w_curr, FieldKind::velocity);
    require_conforming(*space_, state.w_prev, FieldKind::velocity);
    const double k = params_.dt;
    const double t_next = state.t0 + (state.step_index + 1) * k;
    const double t_half = state.t0 + (state.step_index + 0.5) * k;
    const Field& w0 = state.w_curr;
    const Field extrap{FieldKind::velocity, 1.5 * w0.coeffs - 0.5 * state.w_prev.coeffs, t_half};

    // Solve for the midpoint value wh; then w1 = 2 wh - w0.
    const SparseMatrix block = (2.0 / k) * inertia_ + params_.nu * stiffness_ +
                               assemble_scalar_convection(*space_, extrap) +
                               assemble_scalar_eddy(*space_, extrap, params_.eddy());
    const Eigen::VectorXd rhs = assemble_body_force(*space_, force_, t_half) + (2.0 / k) * apply_vector(inertia_, w0.coeffs);

    auto [wh, ph] = solve_system(block, rhs, t_half, {2.0 / k, params_.nu + 2.0 * params_.dispersion() / k});
    SimState next;
    next.w_prev = w0;
    next.w_curr = Field{FieldKind::velocity, 2.0 * wh.coeffs - w0.coeffs, t_next};
    next.p_curr = std::move(ph);
    next.t0 = state.t0;
    next.t = t_next;
    next.step_index = state.step_index + 1;
    return next;
}

SimState Stepper::advance(const SimState& state, Scheme scheme) {
    return scheme == Scheme::backward_euler ? step_backward_euler(state) : step_cnle(state);
}

std::pair<Field, Field> Stepper::solve_stokes(double t) {
    // nu * K has the P2 pattern already; the mass term keeps the pattern explicit.
    const SparseMatrix block = 0.0 * mass_ + params_.nu * stiffness_;
    return solve_system(block, assemble_body_force(*space_, force_, t), t, {0.0, params_.nu});
}

SimState step_backward_euler(const SimState& state, const ModelParams& params, const VectorFunction& f,
                             const TaylorHoodSpace& space) {
    Stepper stepper(space, params, f);
    return stepper.step_backward_euler(state);
}

SimState step_cnle(const SimState& state, const ModelParams& params, const VectorFunction& f,
                   const TaylorHoodSpace& space) {
    Stepper stepper(space, params, f);
    return stepper.step_cnle(state);
}

} // namespace msm
