#pragma once

#include "msm/assembly.hpp"

#include <cstdint>
#include <iosfwd>

namespace msm {

/// |u'Mv - 1/2 (u'Mu + v'Mv - (u-v)'M(u-v))| relative to the sum of the
/// magnitudes of the three quadratic forms (absolute when they all vanish).
double check_polarization(const Eigen::VectorXd& u, const Eigen::VectorXd& v, const SparseMatrix& m);

struct PoincareReport {
    std::uint64_t seed = 0;
    int samples = 0;
    double empirical = 0.0;   ///< max over random masked fields of ||u|| / ||grad u||
    double eigen_ratio = 0.0; ///< 1 / sqrt(lambda_min) of the Dirichlet stiffness-mass pencil
    double bound = 0.0;       ///< narrower bounding-box width / pi
    double diameter = 0.0;    ///< bounding-box diagonal, an upper bound of diam
};

/// Empirical Poincare-Friedrichs constant of the velocity space. The
/// smallest eigenvalue comes from inverse iteration on the interior scalar
/// P2 pencil (both components share it).
PoincareReport check_poincare(const TaylorHoodSpace& space, std::uint64_t seed = 1, int samples = 100);

/// Discrete inf-sup constant of a velocity-pressure pair given dense
/// operators restricted to free velocity dofs: the square root of the
/// smallest eigenvalue of B K^{-1} B' q = lambda Mp q after discarding the
/// single constant-pressure mode. Zero (to roundoff) signals spurious
/// pressure modes.
double infsup_constant(const Eigen::MatrixXd& b, const Eigen::MatrixXd& k, const Eigen::MatrixXd& mp);

/// Inf-sup constant of the Taylor-Hood pair on `space`. Dense; coarse meshes only.
double check_infsup(const TaylorHoodSpace& space);

/// Pointwise Smagorinsky flux |A| A for a 2x2 gradient.
Mat2 smagorinsky_flux(const Mat2& a);

/// (|A|A - |B|B) : (A - B) / |A - B|^3; at least 1/2 for A != B.
double sm_pointwise_ratio(const Mat2& a, const Mat2& b);
/// | |A|A - |B|B | / (max(|A|,|B|) |A - B|); at most 2.
double llc_pointwise_ratio(const Mat2& a, const Mat2& b);

/// Integrated strong-monotonicity form (|grad u| grad u - |grad w| grad w, grad(u - w)).
double sm_form(const TaylorHoodSpace& space, const Eigen::VectorXd& u, const Eigen::VectorXd& w);
/// ||grad u||_{L3}.
double grad_l3_norm(const TaylorHoodSpace& space, const Eigen::VectorXd& u);

struct MonotonicityReport {
    std::uint64_t seed = 0;
    int samples = 0;
    double sm_min_ratio = 0.0;           ///< min of sm_form / ||grad(u-w)||_{L3}^3
    double sm_pointwise_min_ratio = 0.0; ///< min over quadrature points
    double llc_max_ratio = 0.0;          ///< max over quadrature points
    double homogeneity_defect = 0.0;     ///< max |sm(tu,tw) - t^3 sm(u,w)| / |t^3 sm(u,w)|
    double self_defect = 0.0;            ///< max |sm(u,u)|
};

/// Random masked fields (uniform coefficients in [-1, 1]) drawn from a
/// seeded generator.
MonotonicityReport check_monotonicity_suite(const TaylorHoodSpace& space, int n_random, std::uint64_t seed = 1);

/// Random velocity field vanishing on the Dirichlet dofs.
Eigen::VectorXd random_masked_velocity(const TaylorHoodSpace& space, std::uint64_t seed);

void print_report(std::ostream& out, const PoincareReport& r);
void print_report(std::ostream& out, const MonotonicityReport& r);

} // namespace msm
