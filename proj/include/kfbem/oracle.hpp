#pragma once

#include <optional>

#include "kfbem/pipeline.hpp"

namespace kfbem {

struct OracleResult {
  int level = 0;            // refinement level the reference was computed on
  BoundarySpace space;
  VectorXc z;               // reference density
  VectorXc trace;           // Galerkin moments V_d^h z of its single-layer trace
  std::optional<double> richardson_estimate;  // L2 proxy error estimate of z
};

/// Reference density from the kernel-free pipeline at level + extra. With
/// extra >= 1 the pipeline also runs one level coarser for a Richardson
/// estimate. Throws ResourceLimit when the volume problem exceeds max_dofs.
OracleResult fine_fem_oracle(const ProblemConfig& cfg, int level, int extra, int max_dofs = 600'000);

/// Classical kernel BEM on the given interface (each panel split into
/// `subdivision` pieces, degree `degree`), with norm_kernel(cfg).
struct KernelReference {
  BoundarySpace space;
  Eigen::MatrixXd v;
  VectorXc z;
};
KernelReference kernel_reference(const ProblemConfig& cfg, const InterfaceMesh& iface, int subdivision, int degree);

}  // namespace kfbem
