#pragma once

#include "msm/diagnostics.hpp"
#include "msm/linsolve.hpp"
#include "msm/stepper.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace msm {

namespace manufactured {

// Exact Navier-Stokes solution on (-1,1)^2:
//   u = pi sin t (sin 2 pi y sin^2 pi x, -sin 2 pi x sin^2 pi y)
//   p = sin t cos pi x sin pi y
Vec2 velocity(double x, double y, double t);
Mat2 velocity_gradient(double x, double y, double t);
double pressure(double x, double y, double t);

/// f = u_t + u . grad u - nu lap u + grad p. No model terms are included,
/// so the model's consistency error shows up in the measured errors.
Vec2 force(double x, double y, double t, double nu);
VectorFunction force_function(double nu);

} // namespace manufactured

/// Counterclockwise rotational forcing of the offset-cylinder flow; vanishes
/// on the unit circle.
Vec2 offset_cylinder_force(double x, double y, double t);

struct Snapshot {
    double t = 0.0;
    Field w;
    Field p;
};

struct ExactSolution {
    VectorFunction u;
    std::function<Mat2(double, double, double)> grad_u;
    ScalarFunction p;
};

struct ErrorNorms {
    double err_inf0 = 0.0;   ///< max over snapshots of ||u - w||_{L2}
    double err_grad00 = 0.0; ///< (trapezoid in time of ||grad(u - w)||^2)^{1/2}
    double err_p00 = 0.0;    ///< (trapezoid in time of ||p - p_h||^2)^{1/2}
};

/// Spatial errors of one snapshot by quadrature against the exact solution.
struct SpatialErrors {
    double velocity_l2 = 0.0;
    double gradient_l2 = 0.0;
    double pressure_l2 = 0.0;
};
SpatialErrors spatial_errors(const TaylorHoodSpace& space, const Snapshot& snap, const ExactSolution& exact);

/// Streaming version of compute_error_norms; feed snapshots in time order.
class ErrorAccumulator {
public:
    void add(double t, const SpatialErrors& e);
    ErrorNorms result() const;

private:
    bool started_ = false;
    double t_last_ = 0.0;
    SpatialErrors last_;
    double max_l2_ = 0.0;
    double grad_sq_ = 0.0;
    double p_sq_ = 0.0;
};

ErrorNorms compute_error_norms(const TaylorHoodSpace& space, const std::vector<Snapshot>& trajectory,
                               const ExactSolution& exact);

ExactSolution manufactured_solution();

struct ConvergenceRow {
    double dt = 0.0;
    double err_inf0 = 0.0;
    double err_grad00 = 0.0;
    double err_p00 = 0.0;
    std::optional<double> rate_inf0;
    std::optional<double> rate_grad00;
    std::optional<double> rate_p00;
    int steps = 0;
    double max_divergence_ratio = 0.0; ///< max_n ||B w_n|| / ||w_n||
};

/// log(err_prev / err) / log(dt_prev / dt).
double convergence_rate(double err_prev, double err, double dt_prev, double dt);

struct ManufacturedConfig {
    int n_per_side = 64;
    std::vector<double> dt_list{0.04, 0.02, 0.01, 0.005};
    double t_final = 1.0;
    double nu = 1.0 / 5000.0;
    double c_s = 0.1;
    double mu = 0.4;
    std::optional<double> delta; ///< defaults to the shortest mesh edge
    Scheme scheme = Scheme::backward_euler;
    SolverOptions solver;
};

/// Runs the manufactured-solution problem once per time step in dt_list
/// (strictly decreasing) and tabulates errors and observed rates.
std::vector<ConvergenceRow> run_manufactured(const ManufacturedConfig& config);

void write_convergence_csv(const std::string& path, const std::vector<ConvergenceRow>& rows);

enum class ForceKind { rotating, zero };

struct OffsetCylinderConfig {
    Scheme scheme = Scheme::cnle;
    int n_outer = 80;
    int n_inner = 60;
    double dt = 0.01;
    double t_final = 3.0;
    double nu = 1.0e-4;
    double c_s = 0.1;
    double mu = 0.4;
    std::optional<double> delta; ///< defaults to the shortest mesh edge
    ForceKind force = ForceKind::rotating;
    /// The flow is strongly convection dominated, which defeats the block
    /// preconditioner; the coarse annulus is small enough for a full LU.
    SolverOptions solver{SolverType::direct};
    std::string mesh_file;          ///< optional imported mesh
    std::string diagnostics_csv;    ///< written when non-empty
    std::string vtk_prefix;         ///< snapshots written when non-empty
    std::vector<double> snapshot_times;
    int output_every_n_steps = 0;   ///< additional VTK cadence; 0 disables
};

struct OffsetCylinderResult {
    std::vector<DiagnosticsRecord> records;
    std::vector<double> mke_bound; ///< energy bound at each record's time
    double initial_mke = 0.0;
    double delta = 0.0;
    int num_vertices = 0;
    int num_triangles = 0;
    int negative_md_steps = 0;
    std::vector<std::string> vtk_files;
    Field initial_velocity;
    Field final_velocity;
    Field final_pressure;
};

/// Offset-cylinder flow: the initial velocity solves the steady Stokes
/// problem with the rotating force, then the chosen scheme advances to
/// t_final recording diagnostics at every step.
OffsetCylinderResult run_offset_cylinder(const OffsetCylinderConfig& config);

} // namespace msm
