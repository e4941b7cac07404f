#pragma once

#include <vector>

#include "kfbem/config.hpp"
#include "kfbem/pipeline.hpp"
#include "kfbem/report.hpp"

namespace kfbem {

/// Report skeleton carrying the canonical config and its hash.
StudyReport make_report(const std::string& kind, const ProblemConfig& cfg);

/// One pipeline run: density, panel representation, residual, coercivity proxy.
StudyReport solve_report(const ProblemConfig& cfg, const PipelineRun& run);

/// Coupled refinement over `levels` levels; errors against the kernel oracle
/// when available (and not overridden), otherwise against fine_fem_oracle.
/// The fitted EOC drops the coarsest level.
StudyReport convergence_study(const ProblemConfig& cfg, int levels);

/// Fixed boundary space (level 0), volume refined `levels` times; the
/// consistency error and coercivity proxies per level, plus a coarse-volume
/// sweep d/h in {1, 2, 4, 8}.
StudyReport consistency_study(const ProblemConfig& cfg, int levels);

/// Times the sparse-dense stage of the assembly for each boundary size n_h;
/// N_Sigma is computed outside the timed region.
StudyReport complexity_study(const ProblemConfig& cfg, const std::vector<int>& sizes);

/// Matrix-level comparison of V_d^h with the kernel Galerkin matrix.
StudyReport validate_kernel_study(const ProblemConfig& cfg, int levels);

/// Smallest eigenvalue of the Hermitian part of V_d^h per level.
StudyReport coercivity_study(const ProblemConfig& cfg, int levels);

/// Neumann-jump defect of the discrete single-layer potential per level.
StudyReport jump_study(const ProblemConfig& cfg, int levels);

/// Surrogate-versus-exact comparison for each tolerance.
StudyReport surrogate_study(const ProblemConfig& cfg, const std::vector<double>& tolerances);

/// Least-squares slope of log2(y) against log2(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// sup |y^H E x| / (||x||_G ||y||_G) for Hermitian positive definite G.
double relative_operator_norm(const MatrixXc& e, const Eigen::MatrixXd& g);

/// Smallest eigenvalue of the Hermitian part of A relative to G.
double relative_coercivity(const MatrixXc& a, const Eigen::MatrixXd& g);

}  // namespace kfbem
