#pragma once

#include "kfbem/bem.hpp"
#include "kfbem/types.hpp"

namespace kfbem {

enum class KernelKind { FullSpace, Disk };

/// Laplace Green's functions: the full-space fundamental solution
/// -(1/2pi) ln|x - y|, and the Dirichlet Green's function of the disk of the
/// given radius centred at the origin (method of images).
struct GreenKernel {
  KernelKind kind = KernelKind::FullSpace;
  double radius = 1.0;

  /// Throws SingularPoint if |x - y| < 1e-14.
  double operator()(Point2 x, Point2 y) const;
  /// Kernel minus the logarithmic part -(1/2pi) ln|x - y|; smooth inside the disk.
  double regular_part(Point2 x, Point2 y) const;
};

double eval_kernel(const GreenKernel& kernel, Point2 x, Point2 y);

/// Quadrature for the kernel Galerkin matrix. Well separated panel pairs use a
/// tensor Gauss rule; panels closer than `near_factor` times the larger length
/// use a 4 x 4 composite rule; touching and identical panels use geometric
/// grading toward the singularity.
struct KernelQuadrature {
  int far_points = 8;
  double near_factor = 2.0;
  int near_subdivisions = 4;
  int graded_levels = 4;
  double graded_ratio = 0.15;
  int graded_points = 12;
};

/// Integral of -(1/2pi) ln|x - y| psi_a(y) psi_b(x) over two panels, with
/// the basis functions given as Legendre orders on each panel.
double log_panel_integral(const Segment& px, int qx, const Segment& py, int qy,
                          const KernelQuadrature& quad = {});

/// V(m, l) = int int G(x, y) psi_l(y) psi_m(x); symmetric.
Eigen::MatrixXd assemble_kernel_galerkin(const GreenKernel& kernel, const BoundarySpace& space,
                                         const KernelQuadrature& quad = {});

}  // namespace kfbem
