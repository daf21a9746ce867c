#pragma once

#include "msm/space.hpp"

#include <Eigen/Sparse>

namespace msm {

/// Compressed-row sparse matrix; column indices are sorted and unique per
/// row. Explicit zeros are kept so that matrices assembled over the same
/// element pattern share one sparsity structure.
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;

/// Every constant of the model and the time discretization.
struct ModelParams {
    double nu = 1.0;    ///< kinematic viscosity
    double c_s = 0.1;   ///< Smagorinsky constant
    double mu = 0.4;    ///< Kolmogorov-Prandtl constant
    double delta = 0.1; ///< filter width, the shortest mesh edge
    double dt = 0.01;   ///< time step

    /// Throws std::invalid_argument unless every field is strictly positive.
    void validate() const;

    /// Coefficient of the dispersive term, C_s^4 delta^2 / mu^2.
    double dispersion() const { return c_s * c_s * c_s * c_s * delta * delta / (mu * mu); }
    /// Smagorinsky coefficient (C_s delta)^2.
    double eddy() const { return (c_s * delta) * (c_s * delta); }
};

enum class ScalarOrder { p1, p2 };

// Scalar operators. P2 matrices are num_nodes() square, P1 are n_pre() square.
SparseMatrix assemble_scalar_mass(const TaylorHoodSpace& space, ScalarOrder order = ScalarOrder::p2);
SparseMatrix assemble_scalar_stiffness(const TaylorHoodSpace& space, ScalarOrder order = ScalarOrder::p2);

/// Scalar block of the skew-symmetrized convection operator:
/// entry (i, j) = 1/2 (a . grad phi_j, phi_i) - 1/2 (a . grad phi_i, phi_j).
SparseMatrix assemble_scalar_convection(const TaylorHoodSpace& space, const Field& a);

/// Scalar block of the Smagorinsky operator: entry (i, j) =
/// coefficient * integral |grad w_lag| grad phi_j . grad phi_i, with the
/// Frobenius norm of the full velocity gradient.
SparseMatrix assemble_scalar_eddy(const TaylorHoodSpace& space, const Field& w_lag, double coefficient);

/// Two copies of a scalar P2 operator, one per velocity component.
SparseMatrix vector_block(const SparseMatrix& scalar);

// Velocity operators (n_vel square).
SparseMatrix assemble_mass(const TaylorHoodSpace& space);
SparseMatrix assemble_stiffness(const TaylorHoodSpace& space);
SparseMatrix assemble_eddy_viscosity(const TaylorHoodSpace& space, const Field& w_lag, const ModelParams& params);
/// Matrix N(a) with v_i' N(a) w_j = b*(a, phi_j, phi_i); exactly skew.
SparseMatrix assemble_trilinear(const TaylorHoodSpace& space, const Field& a);

/// n_pre x n_vel operator B with (B w)_q = (q_h, div w_h).
SparseMatrix assemble_divergence(const TaylorHoodSpace& space);

/// Load vector (f(., t), phi_i) over the velocity dofs.
Eigen::VectorXd assemble_body_force(const TaylorHoodSpace& space, const VectorFunction& f, double t);

/// Integrals of the P1 pressure basis; the mean-value constraint row.
Eigen::VectorXd pressure_mean_weights(const TaylorHoodSpace& space);

// Element matrices of the linear Lagrange triangle, by quadrature.
Eigen::Matrix3d p1_element_mass(const std::array<Point, 3>& tri);
Eigen::Matrix3d p1_element_stiffness(const std::array<Point, 3>& tri);

/// Saddle-point system with unknowns ordered [velocity | pressure | lambda],
/// where lambda is the Lagrange multiplier enforcing zero pressure mean.
struct SaddleSystem {
    SparseMatrix matrix;
    Eigen::VectorXd rhs;
    int n_vel = 0;
    int n_pre = 0;

    int size() const { return n_vel + n_pre + 1; }
};

/// Builds the symmetric block system [[A, -B^T, 0], [-B, 0, c], [0, c^T, 0]]
/// from a scalar P2 velocity block (applied to both components), the
/// divergence operator and the pressure mean weights. The pressure unknown is
/// the physical pressure. The sparsity pattern is computed once at
/// construction.
class SaddleAssembler {
public:
    explicit SaddleAssembler(const TaylorHoodSpace& space);

    /// `scalar_block` must share the pattern of assemble_scalar_mass(space).
    SaddleSystem build(const SparseMatrix& scalar_block, const Eigen::VectorXd& velocity_rhs) const;

    const SparseMatrix& divergence() const { return divergence_; }
    const Eigen::VectorXd& mean_weights() const { return mean_weights_; }

private:
    const TaylorHoodSpace* space_;
    SparseMatrix divergence_;
    Eigen::VectorXd mean_weights_;
    SparseMatrix pattern_;
    std::vector<int> pos_x_, pos_y_;   // per scalar-block nonzero
    std::vector<int> pos_b_, pos_bt_;  // per divergence nonzero
    std::vector<int> pos_c_, pos_ct_;  // per pressure dof
};

/// Imposes w = 0 on masked velocity dofs: their rows and columns become
/// identity rows/columns and the right-hand side is zeroed there.
void apply_dirichlet(SaddleSystem& system, const TaylorHoodSpace& space);

/// max |A - A^T| relative to max |A|.
double symmetry_defect(const SparseMatrix& a);

} // namespace msm
