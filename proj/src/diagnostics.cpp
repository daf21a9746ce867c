#include "msm/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>

namespace msm {

double l2_norm_squared(const TaylorHoodSpace& space, const Field& w) {
    require_conforming(space, w, FieldKind::velocity);
    double s = 0.0;
    for (int e = 0; e < space.num_elements(); ++e)
        for (int q = 0; q < space.num_qp(); ++q) {
            const Vec2 v = velocity_at(space, w.coeffs, e, q);
            s += space.jxw(e, q) * (v[0] * v[0] + v[1] * v[1]);
        }
    return s;
}

double grad_norm_squared(const TaylorHoodSpace& space, const Field& w) {
    require_conforming(space, w, FieldKind::velocity);
    double s = 0.0;
    for (int e = 0; e < space.num_elements(); ++e)
        for (int q = 0; q < space.num_qp(); ++q) {
            const Mat2 g = gradient_at(space, w.coeffs, e, q);
            s += space.jxw(e, q) * contract(g, g);
        }
    return s;
}

double compute_mke(const TaylorHoodSpace& space, const Field& w, const ModelParams& params) {
    return 0.5 * l2_norm_squared(space, w) + 0.5 * params.dispersion() * grad_norm_squared(space, w);
}

namespace {

// msmd = (a/k) (grad(w_next - w_curr), grad stage); evd = eddy * int |grad lag| |grad stage|^2.
Dissipation model_dissipation(const TaylorHoodSpace& space, const Eigen::VectorXd& w_next,
                              const Eigen::VectorXd& w_curr, const Eigen::VectorXd& stage,
                              const Eigen::VectorXd& lag, const ModelParams& params) {
    double msmd = 0.0;
    double evd = 0.0;
    for (int e = 0; e < space.num_elements(); ++e)
        for (int q = 0; q < space.num_qp(); ++q) {
            const double w = space.jxw(e, q);
            const Mat2 g1 = gradient_at(space, w_next, e, q);
            const Mat2 g0 = gradient_at(space, w_curr, e, q);
            const Mat2 gs = gradient_at(space, stage, e, q);
            const Mat2 gl = gradient_at(space, lag, e, q);
            Mat2 diff;
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) diff[i][j] = g1[i][j] - g0[i][j];
            msmd += w * contract(diff, gs);
            evd += w * frobenius(gl) * contract(gs, gs);
        }
    Dissipation d;
    d.msmd = params.dispersion() / params.dt * msmd;
    d.evd = params.eddy() * evd;
    d.md = d.msmd + d.evd;
    return d;
}

} // namespace

Dissipation compute_md_be(const TaylorHoodSpace& space, const Field& w_next, const Field& w_curr,
                          const ModelParams& params) {
    require_conforming(space, w_next, FieldKind::velocity);
    require_conforming(space, w_curr, FieldKind::velocity);
    return model_dissipation(space, w_next.coeffs, w_curr.coeffs, w_next.coeffs, w_curr.coeffs, params);
}

Dissipation compute_md_cnle(const TaylorHoodSpace& space, const Field& w_next, const Field& w_curr,
                            const Field& w_prev, const ModelParams& params) {
    require_conforming(space, w_next, FieldKind::velocity);
    require_conforming(space, w_curr, FieldKind::velocity);
    require_conforming(space, w_prev, FieldKind::velocity);
    const Eigen::VectorXd mid = 0.5 * (w_next.coeffs + w_curr.coeffs);
    const Eigen::VectorXd extrap = 1.5 * w_curr.coeffs - 0.5 * w_prev.coeffs;
    return model_dissipation(space, w_next.coeffs, w_curr.coeffs, mid, extrap, params);
}

double compute_vd(const TaylorHoodSpace& space, const Field& w_stage, const ModelParams& params) {
    return params.nu * grad_norm_squared(space, w_stage);
}

double forcing_work(const TaylorHoodSpace& space, const VectorFunction& f, double t, const Field& w) {
    require_conforming(space, w, FieldKind::velocity);
    double s = 0.0;
    for (int e = 0; e < space.num_elements(); ++e)
        for (int q = 0; q < space.num_qp(); ++q) {
            const Point x = space.qp_coord(e, q);
            const Vec2 fv = f(x.x, x.y, t);
            const Vec2 v = velocity_at(space, w.coeffs, e, q);
            s += space.jxw(e, q) * (fv[0] * v[0] + fv[1] * v[1]);
        }
    return s;
}

double audit_energy(const EnergyStep& s) {
    const double defect =
        s.mke_after - s.mke_before + s.numerical_diffusion + s.dt * (s.dissipation - s.forcing_work);
    const double scale = std::max(s.mke_before, s.mke_after) + s.dt * std::abs(s.forcing_work);
    if (scale == 0.0) return defect == 0.0 ? 0.0 : defect;
    return defect / scale;
}

namespace {

void fill_common(DiagnosticsRecord& rec, const SparseMatrix& divergence, const SimState& after) {
    rec.step = after.step_index;
    rec.t = after.t;
    rec.divergence = (divergence * after.w_curr.coeffs).norm();
    rec.velocity_norm = after.w_curr.coeffs.norm();
    rec.backscatter = rec.md < 0.0;
}

} // namespace

DiagnosticsRecord diagnose_be_step(const TaylorHoodSpace& space, const SparseMatrix& divergence,
                                   const ModelParams& params, const VectorFunction& f, const SimState& before,
                                   const SimState& after) {
    const Field& w0 = before.w_curr;
    const Field& w1 = after.w_curr;
    DiagnosticsRecord rec;
    const Dissipation d = compute_md_be(space, w1, w0, params);
    rec.md = d.md;
    rec.msmd = d.msmd;
    rec.evd = d.evd;
    rec.vd = compute_vd(space, w1, params);
    const Field jump{FieldKind::velocity, w1.coeffs - w0.coeffs, after.t};
    rec.numerical_diffusion =
        0.5 * l2_norm_squared(space, jump) + 0.5 * params.dispersion() * grad_norm_squared(space, jump);
    rec.forcing_work = forcing_work(space, f, after.t, w1);
    const double mke0 = compute_mke(space, w0, params);
    rec.mke = compute_mke(space, w1, params);
    rec.energy_residual = audit_energy({mke0, rec.mke, rec.numerical_diffusion, rec.vd + rec.evd,
                                        rec.forcing_work, params.dt});
    fill_common(rec, divergence, after);
    return rec;
}

DiagnosticsRecord diagnose_cnle_step(const TaylorHoodSpace& space, const SparseMatrix& divergence,
                                     const ModelParams& params, const VectorFunction& f, const SimState& before,
                                     const SimState& after) {
    const Field& w0 = before.w_curr;
    const Field& w1 = after.w_curr;
    DiagnosticsRecord rec;
    const Dissipation d = compute_md_cnle(space, w1, w0, before.w_prev, params);
    rec.md = d.md;
    rec.msmd = d.msmd;
    rec.evd = d.evd;
    const double t_half = after.t - 0.5 * params.dt;
    const Field mid{FieldKind::velocity, 0.5 * (w0.coeffs + w1.coeffs), t_half};
    rec.vd = compute_vd(space, mid, params);
    rec.numerical_diffusion = 0.0;
    rec.forcing_work = forcing_work(space, f, t_half, mid);
    const double mke0 = compute_mke(space, w0, params);
    rec.mke = compute_mke(space, w1, params);
    rec.energy_residual = audit_energy({mke0, rec.mke, 0.0, rec.vd + rec.evd, rec.forcing_work, params.dt});
    fill_common(rec, divergence, after);
    return rec;
}

double energy_bound(double mke0, double elapsed, double nu, double c_pf, double f_l2_max) {
    return mke0 + elapsed * c_pf * c_pf * f_l2_max * f_l2_max / (2.0 * nu);
}

double poincare_bound(const Mesh& mesh) {
    double xmin = mesh.vertices()[0].x, xmax = xmin, ymin = mesh.vertices()[0].y, ymax = ymin;
    for (const auto& p : mesh.vertices()) {
        xmin = std::min(xmin, p.x);
        xmax = std::max(xmax, p.x);
        ymin = std::min(ymin, p.y);
        ymax = std::max(ymax, p.y);
    }
    return std::min(xmax - xmin, ymax - ymin) / std::numbers::pi;
}

double force_l2_norm(const TaylorHoodSpace& space, const VectorFunction& f, double t) {
    double s = 0.0;
    for (int e = 0; e < space.num_elements(); ++e)
        for (int q = 0; q < space.num_qp(); ++q) {
            const Point x = space.qp_coord(e, q);
            const Vec2 fv = f(x.x, x.y, t);
            s += space.jxw(e, q) * (fv[0] * fv[0] + fv[1] * fv[1]);
        }
    return std::sqrt(s);
}

void write_diagnostics_header(std::ostream& out) {
    out << "step,t,mke,md,msmd,evd,vd,energy_residual,backscatter_flag\n";
}

void write_diagnostics_row(std::ostream& out, const DiagnosticsRecord& r) {
    out << std::setprecision(17) << r.step << ',' << r.t << ',' << r.mke << ',' << r.md << ',' << r.msmd << ','
        << r.evd << ',' << r.vd << ',' << r.energy_residual << ',' << (r.backscatter ? 1 : 0) << '\n';
}

void write_diagnostics_csv(const std::string& path, const std::vector<DiagnosticsRecord>& records) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    write_diagnostics_header(out);
    for (const auto& r : records) write_diagnostics_row(out, r);
}

} // namespace msm
