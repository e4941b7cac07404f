#pragma once

#include <array>
#include <functional>
#include <vector>

#include "kfbem/coefficients.hpp"
#include "kfbem/geometry.hpp"
#include "kfbem/types.hpp"

namespace kfbem {

/// Global numbering of continuous P1/P2 Lagrange functions. Full numbering:
/// vertices first, then one dof per edge (p = 2). Dirichlet dofs are removed
/// in the free numbering.
struct DofMap {
  int degree = 1;
  int n_full = 0;
  int n_d = 0;
  std::vector<std::array<int, 6>> local;  // full indices; entries 3..5 sit on local edges 0..2
  std::vector<int> free_index;            // full -> free, -1 when constrained
  std::vector<int> free_to_full;
  std::vector<char> constrained;

  int local_size() const { return degree == 1 ? 3 : 6; }
  bool is_free(int full) const { return free_index[full] >= 0; }
};

/// Throws UnsupportedDegree unless p is 1 or 2.
DofMap build_dofmap(const Mesh2D& mesh, int p);

/// Location of the nodal point of a full dof (vertex or edge midpoint).
Point2 dof_point(const Mesh2D& mesh, const DofMap& dofs, int full);

std::array<double, 3> barycentric(const std::array<Point2, 3>& tri, Point2 x);
std::array<Point2, 3> barycentric_gradients(const std::array<Point2, 3>& tri);

struct ShapeValues {
  std::array<double, 6> value{};
  std::array<Point2, 6> grad{};
};

void eval_shape(int p, const std::array<double, 3>& lambda, const std::array<Point2, 3>& grad_lambda,
                ShapeValues& out);

/// Volume quadrature order used for degree p (2p + 2).
inline int volume_quadrature_degree(int p) { return 2 * p + 2; }

struct StiffnessMatrix {
  SparseRowC L;  // n_d x n_d over free dofs, L(j,k) = l(phi_k, phi_j)
  bool hermitian = false;
  int n_d = 0;
};

/// Element matrix over all local dofs of triangle t (Robin terms excluded).
Eigen::MatrixXcd element_matrix(const Mesh2D& mesh, const DofMap& dofs,
                                const OperatorCoefficients& coeffs, int t);

/// Sesquilinear form over all dofs including constrained ones; the Robin
/// boundary mass on Neumann faces is subtracted.
SparseRowC assemble_full(const Mesh2D& mesh, const DofMap& dofs, const OperatorCoefficients& coeffs);

/// Restriction of assemble_full to free dofs. Throws QuadratureOverflow on
/// non-finite coefficient values.
StiffnessMatrix assemble_stiffness(const Mesh2D& mesh, const DofMap& dofs,
                                   const OperatorCoefficients& coeffs);

enum class DofSet { Free, Full };

SparseRowC assemble_mass(const Mesh2D& mesh, const DofMap& dofs, DofSet set = DofSet::Free);
/// Gram matrix of the H1 inner product (grad-grad plus mass).
SparseRowC assemble_h1_gram(const Mesh2D& mesh, const DofMap& dofs, DofSet set = DofSet::Free);
/// L2 Gram matrix over the faces carrying `marker`.
SparseRowC assemble_boundary_mass(const Mesh2D& mesh, const DofMap& dofs, Marker marker,
                                  DofSet set = DofSet::Free);

using ScalarFunction = std::function<cplx(Point2)>;
using GradientFunction = std::function<std::array<cplx, 2>(Point2)>;

/// Load vector (f, phi_j) over all full dofs.
VectorXc assemble_load(const Mesh2D& mesh, const DofMap& dofs, const ScalarFunction& f);

/// Nodal interpolant over full dofs.
VectorXc interpolate(const Mesh2D& mesh, const DofMap& dofs, const ScalarFunction& g);

/// Solves l(u, w) = (f, w) with u = g on Dirichlet faces (g interpolated);
/// returns the full coefficient vector.
VectorXc solve_dirichlet_problem(const Mesh2D& mesh, const DofMap& dofs,
                                 const OperatorCoefficients& coeffs, const ScalarFunction& f,
                                 const ScalarFunction& g);

/// Broken H1 seminorm error |u - u_h| and L2 error against exact data.
double h1_seminorm_error(const Mesh2D& mesh, const DofMap& dofs, const VectorXc& u_full,
                         const GradientFunction& grad_exact);
double l2_error(const Mesh2D& mesh, const DofMap& dofs, const VectorXc& u_full,
                const ScalarFunction& exact);

/// Value of a full coefficient vector at x inside triangle t.
cplx evaluate_fe(const Mesh2D& mesh, const DofMap& dofs, const VectorXc& u_full, int t, Point2 x);

/// Free vector embedded into the full numbering (constrained entries zero).
VectorXc expand_free(const DofMap& dofs, const VectorXc& u_free);

}  // namespace kfbem
