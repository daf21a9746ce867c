#include "msm/assembly.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace msm;

namespace {

std::shared_ptr<const Mesh> square(int n) { return std::make_shared<const Mesh>(build_square_mesh(n)); }

Eigen::VectorXd random_vector(int n, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = d(rng);
    return v;
}

double max_abs(const SparseMatrix& m) {
    double s = 0.0;
    for (int k = 0; k < m.nonZeros(); ++k) s = std::max(s, std::abs(m.valuePtr()[k]));
    return s;
}

const VectorFunction shear = [](double, double y, double) { return Vec2{y, 0.0}; };

} // namespace

TEST(ModelParams, DerivedCoefficients) {
    ModelParams p;
    p.c_s = 0.1;
    p.mu = 0.4;
    p.delta = 0.05;
    EXPECT_NEAR(p.dispersion(), 1e-4 * 0.0025 / 0.16, 1e-18);
    EXPECT_NEAR(p.eddy(), 0.005 * 0.005, 1e-18);
}

TEST(ModelParams, ValidateRejectsNonPositive) {
    ModelParams p;
    EXPECT_NO_THROW(p.validate());
    for (double ModelParams::*field :
         {&ModelParams::nu, &ModelParams::c_s, &ModelParams::mu, &ModelParams::delta, &ModelParams::dt}) {
        ModelParams q;
        q.*field = 0.0;
        EXPECT_THROW(q.validate(), std::invalid_argument);
        q.*field = -1.0;
        EXPECT_THROW(q.validate(), std::invalid_argument);
    }
}

TEST(P1ElementMatrices, ReferenceTriangleMatchesClosedForm) {
    const std::array<Point, 3> ref{Point{0, 0}, Point{1, 0}, Point{0, 1}};
    Eigen::Matrix3d mass_oracle;
    mass_oracle << 2, 1, 1, 1, 2, 1, 1, 1, 2;
    mass_oracle /= 24.0;
    Eigen::Matrix3d stiff_oracle;
    stiff_oracle << 2, -1, -1, -1, 1, 0, -1, 0, 1;
    stiff_oracle /= 2.0;
    EXPECT_LE((p1_element_mass(ref) - mass_oracle).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_LE((p1_element_stiffness(ref) - stiff_oracle).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(P1ElementMatrices, GeneralTriangleMatchesCotangentFormula) {
    const std::array<Point, 3> t{Point{0.1, -0.2}, Point{1.3, 0.4}, Point{-0.2, 0.9}};
    const double area = signed_area(t[0], t[1], t[2]);
    Eigen::Matrix3d mass_oracle;
    mass_oracle << 2, 1, 1, 1, 2, 1, 1, 1, 2;
    mass_oracle *= area / 12.0;
    // K_ij = (e_i . e_j) / (4 area) with e_i the edge opposite vertex i, rotated.
    Eigen::Matrix3d stiff_oracle;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            const Point& a = t[(i + 1) % 3];
            const Point& b = t[(i + 2) % 3];
            const Point& c = t[(j + 1) % 3];
            const Point& d = t[(j + 2) % 3];
            stiff_oracle(i, j) = ((b.x - a.x) * (d.x - c.x) + (b.y - a.y) * (d.y - c.y)) / (4 * area);
        }
    EXPECT_LE((p1_element_mass(t) - mass_oracle).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_LE((p1_element_stiffness(t) - stiff_oracle).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(ScalarOperators, MassSumsToAreaAndStiffnessKillsConstants) {
    const TaylorHoodSpace space(square(5));
    for (ScalarOrder order : {ScalarOrder::p1, ScalarOrder::p2}) {
        const SparseMatrix m = assemble_scalar_mass(space, order);
        const SparseMatrix k = assemble_scalar_stiffness(space, order);
        const Eigen::VectorXd one = Eigen::VectorXd::Ones(m.rows());
        EXPECT_NEAR(one.dot(m * one), 4.0, 1e-13);
        EXPECT_LE((k * one).cwiseAbs().maxCoeff(), 1e-13);
        EXPECT_LE(symmetry_defect(m), 1e-15);
        EXPECT_LE(symmetry_defect(k), 1e-15);
    }
}

TEST(ScalarOperators, SharedPattern) {
    const TaylorHoodSpace space(square(4));
    const Field a{FieldKind::velocity, random_vector(space.n_vel(), 3), 0.0};
    const SparseMatrix m = assemble_scalar_mass(space);
    for (const SparseMatrix& other : {assemble_scalar_stiffness(space), assemble_scalar_convection(space, a),
                                      assemble_scalar_eddy(space, a, 1.0)}) {
        ASSERT_EQ(other.nonZeros(), m.nonZeros());
        for (int r = 0; r <= m.rows(); ++r) EXPECT_EQ(other.outerIndexPtr()[r], m.outerIndexPtr()[r]);
    }
}

TEST(VectorOperators, ShearFlowQuadraticForms) {
    const TaylorHoodSpace space(square(6));
    const Field w = interpolate(space, shear);
    EXPECT_NEAR(w.coeffs.dot(assemble_mass(space) * w.coeffs), 4.0 / 3.0, 1e-13); // integral of y^2
    EXPECT_NEAR(w.coeffs.dot(assemble_stiffness(space) * w.coeffs), 4.0, 1e-13);  // |grad w|^2 = 1
}

TEST(VectorOperators, EddyViscosityOfShearIsScaledStiffness) {
    const TaylorHoodSpace space(square(5));
    ModelParams p;
    p.delta = 0.3;
    const Field w = interpolate(space, shear);
    const SparseMatrix e = assemble_eddy_viscosity(space, w, p);
    const SparseMatrix k = p.eddy() * assemble_stiffness(space);
    EXPECT_LE(max_abs(SparseMatrix(e - k)), 1e-14 * max_abs(k));
}

TEST(VectorOperators, EddyViscosityVanishesForConstantLag) {
    const TaylorHoodSpace space(square(4));
    const Field w = interpolate(space, VectorFunction([](double, double, double) { return Vec2{2.0, -1.0}; }));
    EXPECT_LE(max_abs(assemble_eddy_viscosity(space, w, ModelParams{})), 1e-15);
}

TEST(Trilinear, SkewSymmetricForRandomFields) {
    const TaylorHoodSpace space(square(6));
    for (unsigned s = 0; s < 100; ++s) {
        const Field a{FieldKind::velocity, random_vector(space.n_vel(), 1000 + s), 0.0};
        const Eigen::VectorXd w = random_vector(space.n_vel(), 5000 + s);
        const SparseMatrix n = assemble_trilinear(space, a);
        EXPECT_LE(std::abs(w.dot(n * w)), 1e-13 * w.squaredNorm() * a.coeffs.norm()) << s;
    }
}

TEST(Trilinear, MatrixIsAntisymmetric) {
    const TaylorHoodSpace space(square(4));
    const Field a{FieldKind::velocity, random_vector(space.n_vel(), 9), 0.0};
    const SparseMatrix n = assemble_trilinear(space, a);
    const SparseMatrix sum = n + SparseMatrix(n.transpose());
    EXPECT_LE(max_abs(sum), 1e-15 * max_abs(n));
}

TEST(Trilinear, MatchesHandComputedForm) {
    // a = (1, 0), v = (x, 0), w = (y + 2, 0):
    // 1/2 [(a.grad v, w) - (a.grad w, v)] = 1/2 integral (y + 2) = 4 on (-1,1)^2.
    const TaylorHoodSpace space(square(3));
    const Field a = interpolate(space, VectorFunction([](double, double, double) { return Vec2{1.0, 0.0}; }));
    const Field v = interpolate(space, VectorFunction([](double x, double, double) { return Vec2{x, 0.0}; }));
    const Field w = interpolate(space, VectorFunction([](double, double y, double) { return Vec2{y + 2, 0.0}; }));
    const SparseMatrix n = assemble_trilinear(space, a);
    EXPECT_NEAR(w.coeffs.dot(n * v.coeffs), 4.0, 1e-13);
}

TEST(Divergence, AnnihilatesSolenoidalQuadratic) {
    const TaylorHoodSpace space(square(5));
    const Field w = interpolate(space, VectorFunction([](double x, double y, double) {
                                    return Vec2{x * x + y, -2 * x * y};
                                }));
    EXPECT_LE((assemble_divergence(space) * w.coeffs).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Divergence, UnitDivergenceGivesMeanWeights) {
    const TaylorHoodSpace space(square(5));
    const Field w = interpolate(space, VectorFunction([](double x, double, double) { return Vec2{x, 0.0}; }));
    const Eigen::VectorXd bw = assemble_divergence(space) * w.coeffs;
    EXPECT_LE((bw - pressure_mean_weights(space)).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_NEAR(pressure_mean_weights(space).sum(), 4.0, 1e-13);
}

TEST(BodyForce, ConstantForceIntegratesToArea) {
    const TaylorHoodSpace space(square(4));
    const Eigen::VectorXd f =
        assemble_body_force(space, [](double, double, double) { return Vec2{1.0, -2.0}; }, 0.0);
    const int nn = space.num_nodes();
    EXPECT_NEAR(f.head(nn).sum(), 4.0, 1e-13);
    EXPECT_NEAR(f.tail(nn).sum(), -8.0, 1e-13);
}

TEST(SaddleAssembler, SymmetricWithIdentityDirichletRows) {
    const TaylorHoodSpace space(square(4));
    const SaddleAssembler assembler(space);
    const SparseMatrix block = assemble_scalar_mass(space) + assemble_scalar_stiffness(space);
    const SaddleSystem sys = assembler.build(block, Eigen::VectorXd::Ones(space.n_vel()));
    EXPECT_EQ(sys.size(), space.n_vel() + space.n_pre() + 1);
    EXPECT_EQ(sys.matrix.rows(), sys.size());
    EXPECT_LE(symmetry_defect(sys.matrix), 1e-15);
    const auto& mask = space.dirichlet_mask();
    for (int i = 0; i < space.n_vel(); ++i) {
        if (!mask[i]) continue;
        EXPECT_EQ(sys.rhs[i], 0.0);
        for (SparseMatrix::InnerIterator it(sys.matrix, i); it; ++it)
            EXPECT_EQ(it.value(), it.col() == i ? 1.0 : 0.0);
    }
}

TEST(SaddleAssembler, PatternIsStableAcrossBuilds) {
    const TaylorHoodSpace space(square(4));
    const SaddleAssembler assembler(space);
    const Field a{FieldKind::velocity, random_vector(space.n_vel(), 4), 0.0};
    const SaddleSystem s1 = assembler.build(assemble_scalar_mass(space), Eigen::VectorXd::Zero(space.n_vel()));
    const SaddleSystem s2 =
        assembler.build(assemble_scalar_convection(space, a), Eigen::VectorXd::Zero(space.n_vel()));
    ASSERT_EQ(s1.matrix.nonZeros(), s2.matrix.nonZeros());
    for (int k = 0; k < s1.matrix.nonZeros(); ++k)
        EXPECT_EQ(s1.matrix.innerIndexPtr()[k], s2.matrix.innerIndexPtr()[k]);
}

TEST(SaddleAssembler, RejectsForeignPattern) {
    const TaylorHoodSpace space(square(4));
    const SaddleAssembler assembler(space);
    SparseMatrix diag(space.num_nodes(), space.num_nodes());
    diag.setIdentity();
    EXPECT_THROW(assembler.build(diag, Eigen::VectorXd::Zero(space.n_vel())), std::invalid_argument);
    EXPECT_THROW(assembler.build(assemble_scalar_mass(space), Eigen::VectorXd::Zero(3)), std::invalid_argument);
}
