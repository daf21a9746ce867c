#include "msm/experiments.hpp"

#include "msm/vtk.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <memory>
#include <stdexcept>

namespace msm {

SpatialErrors spatial_errors(const TaylorHoodSpace& space, const Snapshot& snap, const ExactSolution& exact) {
    require_conforming(space, snap.w, FieldKind::velocity);
    const bool has_p = snap.p.coeffs.size() > 0;
    if (has_p) require_conforming(space, snap.p, FieldKind::pressure);
    const double tw = snap.w.time;
    const double tp = has_p ? snap.p.time : snap.t;
    double ev = 0.0, eg = 0.0, ep = 0.0;
    for (int e = 0; e < space.num_elements(); ++e)
        for (int q = 0; q < space.num_qp(); ++q) {
            const double w = space.jxw(e, q);
            const Point x = space.qp_coord(e, q);
            const Vec2 u = exact.u(x.x, x.y, tw);
            const Vec2 uh = velocity_at(space, snap.w.coeffs, e, q);
            ev += w * ((u[0] - uh[0]) * (u[0] - uh[0]) + (u[1] - uh[1]) * (u[1] - uh[1]));
            const Mat2 g = exact.grad_u(x.x, x.y, tw);
            const Mat2 gh = gradient_at(space, snap.w.coeffs, e, q);
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) eg += w * (g[i][j] - gh[i][j]) * (g[i][j] - gh[i][j]);
            const double ph = has_p ? pressure_at(space, snap.p.coeffs, e, q) : 0.0;
            const double dp = exact.p(x.x, x.y, tp) - ph;
            ep += w * dp * dp;
        }
    return {std::sqrt(ev), std::sqrt(eg), std::sqrt(ep)};
}

void ErrorAccumulator::add(double t, const SpatialErrors& e) {
    max_l2_ = std::max(max_l2_, e.velocity_l2);
    if (started_) {
        if (t <= t_last_) throw std::invalid_argument("ErrorAccumulator: snapshots must be in increasing time");
        const double h = t - t_last_;
        grad_sq_ += 0.5 * h * (last_.gradient_l2 * last_.gradient_l2 + e.gradient_l2 * e.gradient_l2);
        p_sq_ += 0.5 * h * (last_.pressure_l2 * last_.pressure_l2 + e.pressure_l2 * e.pressure_l2);
    }
    started_ = true;
    t_last_ = t;
    last_ = e;
}

ErrorNorms ErrorAccumulator::result() const { return {max_l2_, std::sqrt(grad_sq_), std::sqrt(p_sq_)}; }

ErrorNorms compute_error_norms(const TaylorHoodSpace& space, const std::vector<Snapshot>& trajectory,
                               const ExactSolution& exact) {
    ErrorAccumulator acc;
    for (const auto& s : trajectory) acc.add(s.t, spatial_errors(space, s, exact));
    return acc.result();
}

double convergence_rate(double err_prev, double err, double dt_prev, double dt) {
    if (!(err_prev > 0.0 && err > 0.0 && dt_prev > 0.0 && dt > 0.0) || dt_prev == dt)
        throw std::invalid_argument("convergence_rate: errors and steps must be positive and distinct");
    return std::log(err_prev / err) / std::log(dt_prev / dt);
}

namespace {

int step_count(double t_final, double dt) {
    const double n = t_final / dt;
    const long r = std::lround(n);
    if (r < 1 || std::abs(n - static_cast<double>(r)) > 1e-9 * std::max(1.0, n))
        throw std::invalid_argument("t_final must be a positive integer multiple of dt");
    return static_cast<int>(r);
}

double divergence_ratio(const SparseMatrix& b, const Field& w) {
    const double n = w.coeffs.norm();
    return n > 0.0 ? (b * w.coeffs).norm() / n : 0.0;
}

} // namespace

std::vector<ConvergenceRow> run_manufactured(const ManufacturedConfig& config) {
    if (config.dt_list.empty()) throw std::invalid_argument("run_manufactured: dt_list is empty");
    for (std::size_t i = 1; i < config.dt_list.size(); ++i)
        if (!(config.dt_list[i] < config.dt_list[i - 1]))
            throw std::invalid_argument("run_manufactured: dt_list must be strictly decreasing");

    auto mesh = std::make_shared<const Mesh>(build_square_mesh(config.n_per_side));
    const TaylorHoodSpace space(mesh);
    const SparseMatrix div = assemble_divergence(space);
    const ExactSolution exact = manufactured_solution();
    const VectorFunction f = manufactured::force_function(config.nu);

    std::vector<ConvergenceRow> rows;
    for (const double dt : config.dt_list) {
        ModelParams params;
        params.nu = config.nu;
        params.c_s = config.c_s;
        params.mu = config.mu;
        params.delta = config.delta.value_or(mesh->h_min());
        params.dt = dt;
        Stepper stepper(space, params, f, config.solver);

        const int n = step_count(config.t_final, dt);
        SimState state = bootstrap(interpolate(space, exact.u, 0.0), config.scheme, 0.0);
        ErrorAccumulator acc;
        acc.add(0.0, spatial_errors(space, {0.0, state.w_curr, interpolate(space, exact.p, 0.0)}, exact));
        ConvergenceRow row;
        row.dt = dt;
        row.steps = n;
        for (int s = 0; s < n; ++s) {
            state = stepper.advance(state, config.scheme);
            acc.add(state.t, spatial_errors(space, {state.t, state.w_curr, state.p_curr}, exact));
            row.max_divergence_ratio = std::max(row.max_divergence_ratio, divergence_ratio(div, state.w_curr));
        }
        const ErrorNorms e = acc.result();
        row.err_inf0 = e.err_inf0;
        row.err_grad00 = e.err_grad00;
        row.err_p00 = e.err_p00;
        if (!rows.empty()) {
            const auto& prev = rows.back();
            row.rate_inf0 = convergence_rate(prev.err_inf0, row.err_inf0, prev.dt, dt);
            row.rate_grad00 = convergence_rate(prev.err_grad00, row.err_grad00, prev.dt, dt);
            row.rate_p00 = convergence_rate(prev.err_p00, row.err_p00, prev.dt, dt);
        }
        rows.push_back(row);
    }
    return rows;
}

void write_convergence_csv(const std::string& path, const std::vector<ConvergenceRow>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << "dt,err_inf0,rate_inf0,err_grad00,rate_grad00,err_p00,rate_p00\n" << std::setprecision(17);
    auto opt = [&](const std::optional<double>& v) {
        if (v) out << *v;
    };
    for (const auto& r : rows) {
        out << r.dt << ',' << r.err_inf0 << ',';
        opt(r.rate_inf0);
        out << ',' << r.err_grad00 << ',';
        opt(r.rate_grad00);
        out << ',' << r.err_p00 << ',';
        opt(r.rate_p00);
        out << '\n';
    }
}

OffsetCylinderResult run_offset_cylinder(const OffsetCylinderConfig& config) {
    auto mesh = std::make_shared<const Mesh>(config.mesh_file.empty()
                                                 ? build_annulus_mesh(config.n_outer, config.n_inner)
                                                 : load_mesh(config.mesh_file));
    const TaylorHoodSpace space(mesh);
    const SparseMatrix div = assemble_divergence(space);

    ModelParams params;
    params.nu = config.nu;
    params.c_s = config.c_s;
    params.mu = config.mu;
    params.delta = config.delta.value_or(mesh->h_min());
    params.dt = config.dt;
    params.validate();
    const int n = step_count(config.t_final, config.dt);

    const VectorFunction rotating = offset_cylinder_force;
    const VectorFunction zero = [](double, double, double) { return Vec2{0.0, 0.0}; };
    const VectorFunction& f = config.force == ForceKind::rotating ? rotating : zero;

    OffsetCylinderResult result;
    result.delta = params.delta;
    result.num_vertices = mesh->num_vertices();
    result.num_triangles = mesh->num_triangles();

    auto [w0, p0] = Stepper(space, params, rotating, config.solver).solve_stokes(0.0);
    Stepper stepper(space, params, f, config.solver);
    SimState state = bootstrap(w0, config.scheme, 0.0);
    state.p_curr = p0;

    result.initial_velocity = state.w_curr;
    result.initial_mke = compute_mke(space, state.w_curr, params);
    const double c_pf = poincare_bound(*mesh);
    const double f_norm = force_l2_norm(space, f, 0.0);

    std::ofstream csv;
    if (!config.diagnostics_csv.empty()) {
        csv.open(config.diagnostics_csv);
        if (!csv) throw std::runtime_error("cannot open " + config.diagnostics_csv + " for writing");
        write_diagnostics_header(csv);
    }

    std::vector<bool> snapshot_done(config.snapshot_times.size(), false);
    auto maybe_write_vtk = [&](const SimState& s) {
        if (config.vtk_prefix.empty()) return;
        bool due = config.output_every_n_steps > 0 && s.step_index % config.output_every_n_steps == 0;
        for (std::size_t i = 0; i < config.snapshot_times.size(); ++i)
            if (!snapshot_done[i] && std::abs(s.t - config.snapshot_times[i]) <= 0.5 * config.dt) {
                snapshot_done[i] = true;
                due = true;
            }
        if (!due) return;
        char name[32];
        std::snprintf(name, sizeof name, "_%06d.vtk", s.step_index);
        const std::string path = config.vtk_prefix + name;
        write_vtk(path, space, s.w_curr, s.p_curr, "t = " + std::to_string(s.t));
        result.vtk_files.push_back(path);
    };
    maybe_write_vtk(state);

    for (int s = 0; s < n; ++s) {
        SimState next = stepper.advance(state, config.scheme);
        DiagnosticsRecord rec = config.scheme == Scheme::backward_euler
                                    ? diagnose_be_step(space, div, params, f, state, next)
                                    : diagnose_cnle_step(space, div, params, f, state, next);
        if (rec.backscatter) ++result.negative_md_steps;
        if (csv.is_open()) write_diagnostics_row(csv, rec);
        result.records.push_back(rec);
        result.mke_bound.push_back(energy_bound(result.initial_mke, next.t - state.t0, params.nu, c_pf, f_norm));
        state = std::move(next);
        maybe_write_vtk(state);
    }
    result.final_velocity = state.w_curr;
    result.final_pressure = state.p_curr;
    return result;
}

} // namespace msm
