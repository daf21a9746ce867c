#include "msm/diagnostics.hpp"
#include "msm/verification.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace msm;

namespace {

std::shared_ptr<const Mesh> square(int n) { return std::make_shared<const Mesh>(build_square_mesh(n)); }

const VectorFunction shear = [](double, double y, double) { return Vec2{y, 0.0}; };

ModelParams params() {
    ModelParams p;
    p.nu = 0.01;
    p.dt = 0.05;
    p.delta = 0.5;
    return p;
}

Field scaled(const Field& f, double s) { return Field{FieldKind::velocity, s * f.coeffs, f.time}; }

} // namespace

TEST(Diagnostics, NormsOfShear) {
    const TaylorHoodSpace space(square(4));
    const Field w = interpolate(space, shear);
    EXPECT_NEAR(l2_norm_squared(space, w), 4.0 / 3.0, 1e-13);
    EXPECT_NEAR(grad_norm_squared(space, w), 4.0, 1e-13);
    const ModelParams p = params();
    EXPECT_NEAR(compute_mke(space, w, p), 0.5 * 4.0 / 3.0 + 0.5 * p.dispersion() * 4.0, 1e-13);
    EXPECT_NEAR(compute_vd(space, w, p), 4.0 * p.nu, 1e-14);
}

TEST(Diagnostics, BackwardEulerDissipationOfShear) {
    const TaylorHoodSpace space(square(4));
    const ModelParams p = params();
    const Field s = interpolate(space, shear);
    const Dissipation same = compute_md_be(space, s, s, p);
    EXPECT_NEAR(same.msmd, 0.0, 1e-15);
    EXPECT_NEAR(same.evd, 4.0 * p.eddy(), 1e-14);
    const Dissipation grow = compute_md_be(space, scaled(s, 2.0), s, p);
    EXPECT_NEAR(grow.msmd, 8.0 * p.dispersion() / p.dt, 1e-13);
    EXPECT_NEAR(grow.evd, 16.0 * p.eddy(), 1e-13);
    EXPECT_DOUBLE_EQ(grow.md, grow.msmd + grow.evd);
    const Dissipation shrink = compute_md_be(space, scaled(s, 0.5), s, p);
    EXPECT_LT(shrink.msmd, 0.0);
}

TEST(Diagnostics, CnleDissipationOfShear) {
    const TaylorHoodSpace space(square(4));
    const ModelParams p = params();
    const Field s = interpolate(space, shear);
    // mid = extrapolant = 1.5 s.
    const Dissipation d = compute_md_cnle(space, scaled(s, 2.0), s, scaled(s, 0.0), p);
    EXPECT_NEAR(d.msmd, 6.0 * p.dispersion() / p.dt, 1e-13);
    EXPECT_NEAR(d.evd, 13.5 * p.eddy(), 1e-13);
    EXPECT_DOUBLE_EQ(d.md, d.msmd + d.evd);
}

TEST(Diagnostics, CnleDispersiveDissipationTelescopes) {
    const TaylorHoodSpace space(square(5));
    const ModelParams p = params();
    std::vector<Field> w;
    for (int i = 0; i < 6; ++i)
        w.push_back(Field{FieldKind::velocity, random_masked_velocity(space, 10 + i), 0.0});
    double sum = 0.0;
    for (int n = 1; n + 1 < 6; ++n) sum += p.dt * compute_md_cnle(space, w[n + 1], w[n], w[n - 1], p).msmd;
    const double expected = 0.5 * p.dispersion() * (grad_norm_squared(space, w[5]) - grad_norm_squared(space, w[1]));
    EXPECT_NEAR(sum, expected, 1e-12 * std::abs(expected) + 1e-14);
}

TEST(Diagnostics, ForcingWorkAndForceNorm) {
    const TaylorHoodSpace space(square(4));
    const Field ones = interpolate(space, [](double, double, double) { return Vec2{1.0, 0.0}; });
    const VectorFunction f = [](double, double y, double t) { return Vec2{y * y * (1 + t), 3.0}; };
    EXPECT_NEAR(forcing_work(space, f, 0.0, ones), 4.0 / 3.0, 1e-13);
    EXPECT_NEAR(forcing_work(space, f, 1.0, ones), 8.0 / 3.0, 1e-13);
    const VectorFunction c = [](double, double, double) { return Vec2{1.0, 2.0}; };
    EXPECT_NEAR(force_l2_norm(space, c, 0.0), std::sqrt(20.0), 1e-13);
}

TEST(Diagnostics, EnergyBoundPieces) {
    const TaylorHoodSpace space(square(3));
    EXPECT_NEAR(poincare_bound(space.mesh()), 2.0 / std::numbers::pi, 1e-15);
    EXPECT_DOUBLE_EQ(energy_bound(1.0, 2.0, 0.5, 3.0, 0.5), 1.0 + 2.0 * 9.0 * 0.25 / 1.0);
    EXPECT_DOUBLE_EQ(energy_bound(1.0, 0.0, 0.5, 3.0, 0.5), 1.0);
}

TEST(AuditEnergy, ExactBalanceIsZero) {
    EXPECT_EQ(audit_energy({}), 0.0);
    // 1.0 -> 0.9 with 0.02 numerical diffusion, dissipation 2 and work 1 over dt 0.08.
    EXPECT_NEAR(audit_energy({1.0, 0.9, 0.02, 2.0, 1.0, 0.08}), 0.0, 1e-15);
}

TEST(AuditEnergy, DetectsPerturbation) {
    const TaylorHoodSpace space(square(5));
    ModelParams p = params();
    const VectorFunction f = [](double x, double y, double) { return Vec2{std::cos(y), x}; };
    Stepper stepper(space, p, f, {SolverType::direct, 1e-12, 10});
    const SparseMatrix div = assemble_divergence(space);
    const SimState s0 = bootstrap(Field{FieldKind::velocity, random_masked_velocity(space, 3), 0.0}, Scheme::cnle);
    const SimState s1 = stepper.advance(s0, Scheme::cnle);
    const DiagnosticsRecord r = diagnose_cnle_step(space, div, p, f, s0, s1);
    EXPECT_LE(std::abs(r.energy_residual), 1e-10);
    const double mke0 = compute_mke(space, s0.w_curr, p);
    EnergyStep e{mke0, r.mke, 0.0, r.vd + r.evd, r.forcing_work, p.dt};
    e.mke_after *= 1.0 + 1e-3;
    EXPECT_GT(std::abs(audit_energy(e)), 1e-4);
}

TEST(DiagnosticsRecord, BackscatterFlagFollowsSign) {
    const TaylorHoodSpace space(square(4));
    const ModelParams p = params();
    const SparseMatrix div = assemble_divergence(space);
    const VectorFunction zero = [](double, double, double) { return Vec2{0.0, 0.0}; };
    SimState before = bootstrap(interpolate(space, shear), Scheme::backward_euler);
    SimState after = before;
    after.w_curr = scaled(before.w_curr, 0.1);
    after.t = p.dt;
    after.step_index = 1;
    const DiagnosticsRecord r = diagnose_be_step(space, div, p, zero, before, after);
    EXPECT_LT(r.md, 0.0);
    EXPECT_TRUE(r.backscatter);
    EXPECT_EQ(r.step, 1);
    EXPECT_NEAR(r.mke, compute_mke(space, after.w_curr, p), 1e-15);
}

TEST(DiagnosticsCsv, HeaderAndRoundTrippableRow) {
    std::ostringstream out;
    write_diagnostics_header(out);
    DiagnosticsRecord r;
    r.step = 7;
    r.t = 0.07;
    r.mke = 1.0 / 3.0;
    r.md = -2e-5;
    r.backscatter = true;
    write_diagnostics_row(out, r);
    std::istringstream in(out.str());
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    EXPECT_EQ(header, "step,t,mke,md,msmd,evd,vd,energy_residual,backscatter_flag");
    std::vector<std::string> cells;
    std::stringstream ss(row);
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    ASSERT_EQ(cells.size(), 9u);
    EXPECT_EQ(cells[0], "7");
    EXPECT_EQ(std::stod(cells[2]), 1.0 / 3.0);
    EXPECT_EQ(std::stod(cells[3]), -2e-5);
    EXPECT_EQ(cells[8], "1");
}
