#pragma once

#include <functional>
#include <memory>

#include "kfbem/types.hpp"

namespace kfbem {

struct SurrogateConfig {
  double tolerance = 1e-8;   // relative residual per column
  int restart = 60;
  int max_iterations = 5000;
  double ilut_drop = 1e-3;
  int ilut_fill = 10;
};

struct SurrogateStats {
  int solves = 0;
  long long total_iterations = 0;
  int max_iterations = 0;
  double max_relative_residual = 0.0;
};

using LinearOperator = std::function<void(const VectorXc& in, VectorXc& out)>;

struct GmresResult {
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

/// Right-preconditioned restarted GMRES (modified Gram-Schmidt, Givens
/// rotations). Convergence is judged on the true residual ||b - A x|| / ||b||.
GmresResult gmres(const LinearOperator& a, const LinearOperator& precond, const VectorXc& b, VectorXc& x,
                  double tol, int restart, int max_iterations);

/// Tolerance-controlled iterative stand-in for N_d = L_d^{-1}: GMRES with an
/// incomplete LU (threshold) preconditioner.
class SurrogateInverse {
 public:
  SurrogateInverse(const SparseRowC& l, SurrogateConfig cfg);
  ~SurrogateInverse();
  SurrogateInverse(SurrogateInverse&&) noexcept;
  SurrogateInverse& operator=(SurrogateInverse&&) noexcept;

  /// Throws NoConvergence when a column misses the tolerance.
  VectorXc solve(const VectorXc& b) const;
  VectorXc solve_adjoint(const VectorXc& b) const;
  RowMatrixXc solve_block(const RowMatrixXc& b) const;

  const SurrogateConfig& config() const { return cfg_; }
  const SurrogateStats& stats() const { return stats_; }
  int size() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  SurrogateConfig cfg_;
  mutable SurrogateStats stats_;
};

/// Power-iteration estimate of the largest eigenvalue of a Hermitian positive
/// semidefinite matrix (used for ||J_d||^2 with the H1 Gram matrix).
double power_iteration_lambda_max(const SparseRowC& g, int steps = 50, unsigned seed = 7);

/// Power-iteration estimate of ||A^{-1}||_2 from solves with A and A^H.
double inverse_norm_estimate(const std::function<VectorXc(const VectorXc&)>& solve,
                             const std::function<VectorXc(const VectorXc&)>& solve_adjoint, int n,
                             int steps = 30, unsigned seed = 11);

struct SurrogateSolveResult {
  RowMatrixXc solution;
  double kappa_bound = 0.0;     // ||L^{-1}||_2 * ||J_d||^2
  double eps_d_estimate = 0.0;  // tolerance * kappa_bound
  SurrogateStats stats;
};

/// Solves L X = B column by column with the surrogate and reports the
/// perturbation estimate; `h1_gram` supplies ||J_d||^2.
SurrogateSolveResult surrogate_solve_multi(const SparseRowC& l, const SurrogateConfig& cfg, const RowMatrixXc& rhs,
                                           const SparseRowC& h1_gram);

}  // namespace kfbem
