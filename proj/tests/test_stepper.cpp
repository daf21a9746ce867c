#include "msm/diagnostics.hpp"
#include "msm/stepper.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace msm;

namespace {

std::shared_ptr<const Mesh> square(int n) { return std::make_shared<const Mesh>(build_square_mesh(n)); }

const VectorFunction zero_force = [](double, double, double) { return Vec2{0.0, 0.0}; };
const VectorFunction swirl = [](double x, double y, double t) {
    return Vec2{-std::sin(3.0 * y) * (1.0 + t), std::cos(2.0 * x)};
};
// Vanishes on the boundary of (-1,1)^2.
const VectorFunction bubble = [](double x, double y, double) {
    const double b = (1 - x * x) * (1 - y * y);
    return Vec2{b * y, -b * x};
};

ModelParams params(double nu, double dt, double delta) {
    ModelParams p;
    p.nu = nu;
    p.dt = dt;
    p.delta = delta;
    return p;
}

} // namespace

TEST(Scheme, ParseAndPrint) {
    EXPECT_EQ(parse_scheme("be"), Scheme::backward_euler);
    EXPECT_EQ(parse_scheme("backward_euler"), Scheme::backward_euler);
    EXPECT_EQ(parse_scheme("cnle"), Scheme::cnle);
    EXPECT_THROW(parse_scheme("rk4"), std::invalid_argument);
    EXPECT_EQ(to_string(Scheme::cnle), "cnle");
    EXPECT_EQ(to_string(Scheme::backward_euler), "be");
}

TEST(Bootstrap, CnleStartsFromRepeatedState) {
    const TaylorHoodSpace space(square(4));
    const Field w0 = interpolate(space, bubble);
    const SimState s = bootstrap(w0, Scheme::cnle, 0.5);
    EXPECT_EQ(s.w_prev.coeffs, w0.coeffs);
    EXPECT_EQ(s.w_curr.coeffs, w0.coeffs);
    EXPECT_EQ(s.t, 0.5);
    EXPECT_EQ(s.step_index, 0);
    EXPECT_THROW(bootstrap(space.zero_pressure(), Scheme::cnle), std::invalid_argument);
}

TEST(Stepper, RestStaysAtRest) {
    const TaylorHoodSpace space(square(5));
    Stepper stepper(space, params(1e-2, 0.1, 0.5), zero_force);
    for (Scheme scheme : {Scheme::backward_euler, Scheme::cnle}) {
        SimState s = bootstrap(space.zero_velocity(), scheme);
        for (int i = 0; i < 3; ++i) s = stepper.advance(s, scheme);
        EXPECT_EQ(s.w_curr.coeffs.lpNorm<Eigen::Infinity>(), 0.0);
        EXPECT_NEAR(s.t, 0.3, 1e-15);
        EXPECT_EQ(s.step_index, 3);
    }
}

TEST(Stepper, VelocityIsDiscretelyDivergenceFreeAndVanishesOnBoundary) {
    const TaylorHoodSpace space(square(6));
    Stepper stepper(space, params(1e-2, 0.05, 0.4), swirl);
    const SparseMatrix div = assemble_divergence(space);
    const Field w0 = stepper.solve_stokes(0.0).first;
    for (Scheme scheme : {Scheme::backward_euler, Scheme::cnle}) {
        SimState s = bootstrap(w0, scheme);
        for (int i = 0; i < 4; ++i) {
            s = stepper.advance(s, scheme);
            EXPECT_LE((div * s.w_curr.coeffs).norm(), 1e-9 * s.w_curr.coeffs.norm());
            for (int d = 0; d < space.n_vel(); ++d)
                if (space.dirichlet_mask()[d]) {
                    EXPECT_EQ(s.w_curr.coeffs[d], 0.0);
                }
        }
    }
}

TEST(Stepper, DiscreteEnergyEqualityHolds) {
    const TaylorHoodSpace space(square(6));
    const ModelParams p = params(1e-2, 0.05, 0.4);
    Stepper stepper(space, p, swirl, {SolverType::direct, 1e-12, 10});
    const SparseMatrix div = assemble_divergence(space);
    for (Scheme scheme : {Scheme::backward_euler, Scheme::cnle}) {
        SimState s = bootstrap(interpolate(space, bubble), scheme);
        for (int i = 0; i < 5; ++i) {
            const SimState next = stepper.advance(s, scheme);
            const DiagnosticsRecord r = scheme == Scheme::cnle
                                            ? diagnose_cnle_step(space, div, p, swirl, s, next)
                                            : diagnose_be_step(space, div, p, swirl, s, next);
            EXPECT_LE(std::abs(r.energy_residual), 1e-8) << to_string(scheme) << " step " << i;
            s = next;
        }
    }
}

TEST(Stepper, HugeStepStaysBounded) {
    const TaylorHoodSpace space(square(5));
    const ModelParams p = params(1e-3, 10.0, 0.5);
    Stepper stepper(space, p, swirl);
    const double c_pf = poincare_bound(space.mesh());
    const double f0 = force_l2_norm(space, swirl, 0.0);
    for (Scheme scheme : {Scheme::backward_euler, Scheme::cnle}) {
        SimState s = bootstrap(interpolate(space, bubble), scheme);
        const double mke0 = compute_mke(space, s.w_curr, p);
        for (int i = 0; i < 5; ++i) {
            s = stepper.advance(s, scheme);
            ASSERT_TRUE(s.w_curr.coeffs.allFinite());
            // The forcing grows like (1 + t); bound its norm by the final time.
            const double f_max = f0 * (1.0 + s.t);
            EXPECT_LE(compute_mke(space, s.w_curr, p), energy_bound(mke0, s.t - s.t0, p.nu, c_pf, f_max));
        }
    }
}

TEST(Stepper, SchemesAgreeToFirstOrderOverOneSmallStep) {
    const TaylorHoodSpace space(square(5));
    // A discretely solenoidal start; the interpolant is not.
    const Field w0 = Stepper(space, params(1e-2, 0.1, 0.5), swirl).solve_stokes(0.0).first;
    double prev = 0.0;
    for (double k : {0.02, 0.01}) {
        Stepper stepper(space, params(1e-2, k, 0.5), swirl);
        const SimState be = stepper.advance(bootstrap(w0, Scheme::backward_euler), Scheme::backward_euler);
        const SimState cn = stepper.advance(bootstrap(w0, Scheme::cnle), Scheme::cnle);
        const double diff = (be.w_curr.coeffs - cn.w_curr.coeffs).norm();
        EXPECT_GT(diff, 0.0);
        // Both are consistent; over one step they differ by O(k^2).
        if (prev > 0.0) {
            EXPECT_NEAR(prev / diff, 4.0, 0.6);
        }
        prev = diff;
    }
}

TEST(Stepper, PressureTimesFollowTheScheme) {
    const TaylorHoodSpace space(square(4));
    Stepper stepper(space, params(1e-2, 0.1, 0.5), swirl);
    const SimState be = stepper.advance(bootstrap(space.zero_velocity(), Scheme::backward_euler), Scheme::backward_euler);
    const SimState cn = stepper.advance(bootstrap(space.zero_velocity(), Scheme::cnle), Scheme::cnle);
    EXPECT_NEAR(be.p_curr.time, 0.1, 1e-15);
    EXPECT_NEAR(cn.p_curr.time, 0.05, 1e-15);
    EXPECT_NEAR(cn.w_curr.time, 0.1, 1e-15);
}

TEST(Stepper, StokesBalancesGradientForceWithPressure) {
    // A gradient force is absorbed entirely by a linear pressure.
    const TaylorHoodSpace space(square(4));
    const double nu = 0.5;
    const VectorFunction grad_p = [](double, double, double) { return Vec2{2.0, -1.0}; };
    Stepper stepper(space, params(nu, 0.1, 0.5), grad_p);
    auto [w, p] = stepper.solve_stokes(0.0);
    EXPECT_LE(w.coeffs.lpNorm<Eigen::Infinity>(), 1e-10);
    for (int v = 0; v < space.num_vertices(); ++v) {
        const Point& x = space.node(v);
        EXPECT_NEAR(p.coeffs[v], 2.0 * x.x - x.y, 1e-9);
    }
}

TEST(Stepper, RejectsBadInput) {
    const TaylorHoodSpace space(square(3));
    EXPECT_THROW(Stepper(space, params(0.0, 0.1, 0.5), swirl), std::invalid_argument);
    EXPECT_THROW(Stepper(space, params(1.0, 0.1, 0.5), VectorFunction{}), std::invalid_argument);
    Stepper stepper(space, params(1.0, 0.1, 0.5), swirl);
    SimState bad = bootstrap(space.zero_velocity(), Scheme::cnle);
    bad.w_curr.coeffs.resize(3);
    EXPECT_THROW(stepper.advance(bad, Scheme::backward_euler), std::invalid_argument);
}

namespace {

// Final velocity after integrating to t_final from a Stokes start.
Eigen::VectorXd integrate(const TaylorHoodSpace& space, Scheme scheme, double dt, double t_final) {
    Stepper stepper(space, params(1e-2, dt, 0.5), swirl, {SolverType::direct, 1e-12, 10});
    SimState s = bootstrap(stepper.solve_stokes(0.0).first, scheme);
    const int n = static_cast<int>(std::lround(t_final / dt));
    for (int i = 0; i < n; ++i) s = stepper.advance(s, scheme);
    return s.w_curr.coeffs;
}

} // namespace

// Temporal error against a fine-step reference on the same mesh, so the
// spatial error cancels.
TEST(Stepper, TemporalOrderAgainstFineReference) {
    const TaylorHoodSpace space(square(6));
    const double t_final = 0.4;
    for (auto [scheme, order] : {std::pair{Scheme::backward_euler, 1.0}, std::pair{Scheme::cnle, 2.0}}) {
        const Eigen::VectorXd ref = integrate(space, scheme, 0.4 / 2048, t_final);
        const double e1 = (integrate(space, scheme, 0.02, t_final) - ref).norm();
        const double e2 = (integrate(space, scheme, 0.01, t_final) - ref).norm();
        const double e3 = (integrate(space, scheme, 0.005, t_final) - ref).norm();
        EXPECT_NEAR(std::log2(e1 / e2), order, 0.3) << to_string(scheme);
        EXPECT_NEAR(std::log2(e2 / e3), order, 0.3) << to_string(scheme);
    }
}
