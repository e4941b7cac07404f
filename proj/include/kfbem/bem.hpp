#pragma once

#include <string>
#include <vector>

#include "kfbem/coefficients.hpp"
#include "kfbem/factorization.hpp"
#include "kfbem/fem.hpp"
#include "kfbem/geometry.hpp"
#include "kfbem/surrogate.hpp"
#include "kfbem/types.hpp"

namespace kfbem {

/// Legendre polynomial P_q on [-1, 1].
double legendre(int q, double s);

/// Discontinuous piecewise polynomials of degree k on the panels; basis
/// function m lives on panel m / (k + 1) and equals P_q(2t - 1), q = m % (k + 1).
struct BoundarySpace {
  int degree = 0;
  InterfaceMesh mesh;

  int n_h() const { return mesh.num_panels() * (degree + 1); }
  int panel_of(int m) const { return m / (degree + 1); }
  int order_of(int m) const { return m % (degree + 1); }
  double basis(int m, double t) const { return legendre(order_of(m), 2.0 * t - 1.0); }
};

/// Throws UnsupportedDegree unless k is 0 or 1.
BoundarySpace make_boundary_space(InterfaceMesh mesh, int k);

/// Gram matrix of the basis in L2(Sigma): diag(L / (2q + 1)).
SparseRowC boundary_mass(const BoundarySpace& space);

/// RHS_m = int f conj(psi_m), Gauss rule of degree k + 6 per panel.
VectorXc assemble_rhs(const BoundarySpace& space, const ScalarFunction& f);

/// L2 projection of f onto the space (coefficients).
VectorXc project_l2(const BoundarySpace& space, const ScalarFunction& f);

/// Value of a density at parameter t of panel l.
cplx density_value(const BoundarySpace& space, const VectorXc& z, int panel, double t);

struct TransferMatrix {
  SparseRowC r;                            // n_d x n_h, R(j, m) = int trace(phi_j) conj(psi_m)
  std::vector<int> sigma;                  // N_Sigma, sorted free dof indices
  SparseRowC r_sigma;                      // |N_Sigma| x n_h
  std::vector<std::vector<int>> support;   // N_Sigma(l) per panel, free dof indices
  int c_r = 0;                             // max distinct free dofs on the triangles of T(tau_l)
  int c_r_effective = 0;                   // max_l |N_Sigma(l)|
  double c_ov = 0.0;                       // max_l |T(tau_l)| / (1 + h/d)^2
  long long assembly_ops = 0;              // quadrature-point times basis evaluations
};

TransferMatrix assemble_transfer(const Mesh2D& mesh, const DofMap& dofs, const BoundarySpace& space,
                                 const OverlapTable& overlaps);

enum class AssemblyPath { MultiSolve, RestrictedSubmatrix };

struct AssemblyCounters {
  long long volume_solves = 0;
  long long spmm_ops = 0;     // complex multiply-adds in the sparse-dense products
  long long sigma_size = 0;
  long long nnz_r = 0;
  double seconds_solve = 0.0;
  double seconds_spmm = 0.0;
};

/// Dense N_Sigma: rows and columns of L^{-1} restricted to sigma, from |sigma|
/// unit-vector solves.
RowMatrixXc restricted_inverse(const NewtonFactorization& fact, const std::vector<int>& sigma,
                               AssemblyCounters* counters = nullptr);

/// SpMM stage V = R_Sigma^H N_Sigma R_Sigma; counts nnz(R) (|sigma| + n_h) ops.
MatrixXc single_layer_from_restricted(const RowMatrixXc& n_sigma, const TransferMatrix& t,
                                      AssemblyCounters* counters = nullptr);

/// V = R^H L^{-1} R with the factorization, along either algebraic path.
MatrixXc assemble_single_layer(const NewtonFactorization& fact, const TransferMatrix& t,
                               AssemblyPath path = AssemblyPath::MultiSolve, AssemblyCounters* counters = nullptr);

/// V = R^H X with X from the iterative surrogate.
MatrixXc assemble_single_layer(const SurrogateInverse& inv, const TransferMatrix& t,
                               AssemblyCounters* counters = nullptr);

struct SingleLayerSolution {
  VectorXc z;
  double relative_residual = 0.0;
  double condition_estimate = 0.0;
  bool ill_conditioned = false;  // condition estimate above 1e12
};

/// Dense LU with one refinement step; an ill-conditioned system is flagged,
/// not rejected.
SingleLayerSolution solve_single_layer(const MatrixXc& v, const VectorXc& rhs);

/// Smallest eigenvalue of the Hermitian part (V + V^H) / 2.
double coercivity_proxy(const MatrixXc& v);

/// (g^H G g)^{1/2}; throws NonSPD on a clearly negative quadratic form.
double dual_norm(const Eigen::MatrixXd& gram, const VectorXc& g);

/// Mesh-dependent proxy h^{1/2} ||g||_{L2(Sigma)}.
double l2_proxy_norm(const BoundarySpace& space, const VectorXc& g);

/// Transfers a density to a space whose panels refine the coarse panels by an
/// integer factor along the same parametrization; total charge per coarse
/// panel is preserved.
VectorXc prolong_density(const BoundarySpace& coarse, const BoundarySpace& fine, const VectorXc& z);

struct JumpCheck {
  double defect = 0.0;        // dual norm of the projected jump minus g
  double relative = 0.0;      // defect / dual norm of g
  VectorXc jump;              // L2 projection of the Neumann jump onto B_h
};

/// Neumann jump of the discrete single-layer potential u_d = N_d R g, from
/// element-wise co-normal fluxes on both sides of each panel, projected onto
/// B_h and compared with g in the norm induced by `gram`. Panels must lie on
/// mesh edges (InterfaceNotResolved otherwise).
JumpCheck jump_relation_check(const Mesh2D& mesh, const DofMap& dofs, const OperatorCoefficients& coeffs,
                              const BoundarySpace& space, const OverlapTable& overlaps,
                              const NewtonFactorization& fact, const TransferMatrix& t, const VectorXc& g,
                              const Eigen::MatrixXd& gram);

}  // namespace kfbem
