#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "kfbem/bem.hpp"
#include "kfbem/config.hpp"
#include "kfbem/reference.hpp"

namespace kfbem {

/// Volume mesh of a refinement level: ring meshes double their ring count,
/// other meshes are refined uniformly `level` times.
Mesh2D build_level_mesh(const ProblemConfig& cfg, int level);

/// Interface panels of a level; panel counts double per level so that the
/// partitions are nested along the curve parametrization. Embedded interfaces
/// follow the mesh loop.
InterfaceMesh build_level_interface(const ProblemConfig& cfg, const Mesh2D& mesh, int level);

/// Polyline or circle interface with exactly `panels` panels.
InterfaceMesh build_interface_with_panels(const ProblemConfig& cfg, int panels);

/// Each panel split into `factor` equal sub-panels.
InterfaceMesh subdivide_interface(const InterfaceMesh& iface, int factor);

/// Cache key of the volume stage: mesh, volume degree and coefficients.
std::uint64_t volume_key(const Mesh2D& mesh, int p, const OperatorCoefficients& coeffs);

struct VolumeStage {
  Mesh2D mesh;
  DofMap dofs;
  std::optional<StiffnessMatrix> stiffness;
  std::shared_ptr<const NewtonFactorization> factorization;
  std::uint64_t key = 0;
  bool cache_hit = false;
  std::string cache_file;
  double seconds_mesh = 0.0;
  double seconds_assembly = 0.0;
  double seconds_factorization = 0.0;
};

/// Builds the mesh and, unless cached under cfg.cache_dir, assembles and
/// factorizes L_d. A corrupt or mismatched cache file is recomputed and a
/// warning appended.
VolumeStage prepare_volume(const ProblemConfig& cfg, const Mesh2D& mesh, bool factorize,
                           std::vector<std::string>& warnings);
VolumeStage prepare_volume(const ProblemConfig& cfg, int level, std::vector<std::string>& warnings);

/// Loads the stiffness matrix from the cache or assembles it.
const StiffnessMatrix& ensure_stiffness(const ProblemConfig& cfg, VolumeStage& volume);

struct BoundaryStage {
  BoundarySpace space;
  OverlapTable overlaps;
  TransferMatrix transfer;
  double seconds_overlaps = 0.0;
  double seconds_transfer = 0.0;
};

BoundaryStage prepare_boundary(const ProblemConfig& cfg, const VolumeStage& volume, InterfaceMesh iface);

struct SolveStage {
  MatrixXc v;
  VectorXc rhs;
  SingleLayerSolution solution;
  double coercivity = 0.0;
  AssemblyCounters counters;
  double seconds_assembly = 0.0;
  double seconds_solve = 0.0;
  // surrogate path only
  double kappa_bound = 0.0;
  double eps_d = 0.0;
  SurrogateStats surrogate;
};

SolveStage solve_stage(const ProblemConfig& cfg, VolumeStage& volume, const BoundaryStage& boundary,
                       AssemblyPath path = AssemblyPath::MultiSolve);

struct PipelineRun {
  int level = 0;
  VolumeStage volume;
  BoundaryStage boundary;
  SolveStage solve;
  std::vector<std::string> warnings;
};

/// Full kernel-free pipeline at coupled refinement level `level`.
PipelineRun run_pipeline(const ProblemConfig& cfg, int level);

/// Laplace kernel whose single layer induces the dual norm: the disk Green's
/// function for disks centred at the origin with a Dirichlet boundary, the
/// full-space kernel otherwise.
GreenKernel norm_kernel(const ProblemConfig& cfg);

/// True when the kernel Galerkin matrix of norm_kernel() is the exact
/// counterpart of V_d^h (Laplace on a Dirichlet disk centred at the origin).
bool kernel_oracle_available(const ProblemConfig& cfg);

}  // namespace kfbem
