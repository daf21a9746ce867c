#pragma once

#include "msm/assembly.hpp"
#include "msm/stepper.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace msm {

/// Per-step energy budget.
struct DiagnosticsRecord {
    int step = 0;
    double t = 0.0;
    double mke = 0.0;  ///< model kinetic energy at t
    double md = 0.0;   ///< model dissipation, msmd + evd
    double msmd = 0.0; ///< dissipation of the dispersive (new) term
    double evd = 0.0;  ///< eddy-viscosity dissipation
    double vd = 0.0;   ///< viscous dissipation
    double numerical_diffusion = 0.0; ///< Backward Euler only; zero for CNLE
    double forcing_work = 0.0;        ///< (f, w) at the scheme's stage
    double energy_residual = 0.0;     ///< normalized defect of the discrete energy equality
    double divergence = 0.0;          ///< ||B w||_2 of the new velocity
    double velocity_norm = 0.0;       ///< ||w||_2 of the new velocity coefficients
    bool backscatter = false;         ///< md < 0
};

struct Dissipation {
    double md = 0.0;
    double msmd = 0.0;
    double evd = 0.0;
};

/// Squared L2 norm of a velocity field by quadrature.
double l2_norm_squared(const TaylorHoodSpace& space, const Field& w);
/// Squared L2 norm of the full gradient by quadrature.
double grad_norm_squared(const TaylorHoodSpace& space, const Field& w);

/// 1/2 ||w||^2 + 1/2 (C_s^4 delta^2 / mu^2) ||grad w||^2.
double compute_mke(const TaylorHoodSpace& space, const Field& w, const ModelParams& params);

/// Backward Euler model dissipation between consecutive states.
Dissipation compute_md_be(const TaylorHoodSpace& space, const Field& w_next, const Field& w_curr,
                          const ModelParams& params);

/// CNLE model dissipation; uses the midpoint value and the extrapolant
/// (3 w_curr - w_prev)/2.
Dissipation compute_md_cnle(const TaylorHoodSpace& space, const Field& w_next, const Field& w_curr,
                            const Field& w_prev, const ModelParams& params);

/// nu ||grad w_stage||^2.
double compute_vd(const TaylorHoodSpace& space, const Field& w_stage, const ModelParams& params);

/// (f(., t), w) by quadrature.
double forcing_work(const TaylorHoodSpace& space, const VectorFunction& f, double t, const Field& w);

/// Terms of one step of the discrete energy equality.
struct EnergyStep {
    double mke_before = 0.0;
    double mke_after = 0.0;
    double numerical_diffusion = 0.0; ///< zero for CNLE
    double dissipation = 0.0;         ///< vd + evd at the step's stage
    double forcing_work = 0.0;
    double dt = 0.0;
};

/// Signed defect mke_after - mke_before + numerical_diffusion
/// + dt * (dissipation - forcing_work), divided by
/// max(mke_before, mke_after) + dt * |forcing_work|. Zero when both vanish.
double audit_energy(const EnergyStep& step);

/// Full record for a completed Backward Euler step.
DiagnosticsRecord diagnose_be_step(const TaylorHoodSpace& space, const SparseMatrix& divergence,
                                   const ModelParams& params, const VectorFunction& f, const SimState& before,
                                   const SimState& after);
/// Full record for a completed CNLE step.
DiagnosticsRecord diagnose_cnle_step(const TaylorHoodSpace& space, const SparseMatrix& divergence,
                                     const ModelParams& params, const VectorFunction& f, const SimState& before,
                                     const SimState& after);

/// Upper bound for the model kinetic energy after `elapsed` time units:
/// mke0 + elapsed * C_PF^2 * f_l2_max^2 / (2 nu). Holds for both schemes
/// because the forcing work is absorbed by half the viscous dissipation.
double energy_bound(double mke0, double elapsed, double nu, double c_pf, double f_l2_max);

/// Poincare-Friedrichs constant bound for the mesh domain: the narrower
/// bounding-box width divided by pi.
double poincare_bound(const Mesh& mesh);

/// ||f(., t)||_{L2} by quadrature.
double force_l2_norm(const TaylorHoodSpace& space, const VectorFunction& f, double t);

/// CSV: step,t,mke,md,msmd,evd,vd,energy_residual,backscatter_flag with 17
/// significant digits.
void write_diagnostics_header(std::ostream& out);
void write_diagnostics_row(std::ostream& out, const DiagnosticsRecord& rec);
void write_diagnostics_csv(const std::string& path, const std::vector<DiagnosticsRecord>& records);

} // namespace msm
