#pragma once

#include <array>
#include <vector>

namespace kfbem::quad {

/// Nodes and weights on the unit interval [0, 1]; weights sum to 1.
struct Rule1D {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

/// n-point Gauss-Legendre rule on [0, 1], exact for polynomials of degree 2n - 1.
const Rule1D& gauss_legendre(int n);

/// Gauss-Legendre rule with the fewest points that integrates degree `degree` exactly.
const Rule1D& gauss_for_degree(int degree);

/// Composite rule on [0, 1] graded geometrically toward t = 0, for integrands with a
/// logarithmic singularity at the origin. Breakpoints are 0, r^L, ..., r, 1; the piece
/// touching the singularity uses the substitution t = r^L v^4.
struct GradedRuleParams {
  int levels = 4;
  double ratio = 0.15;
  int points_per_piece = 12;
};
const Rule1D& graded_toward_zero(const GradedRuleParams& params = {});

/// Symmetric triangle rule on the reference triangle; points are barycentric
/// coordinates, weights sum to 1 (multiply by the element area).
struct TriangleRule {
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;

  std::size_t size() const { return points.size(); }
};

/// Symmetric rule exact for total degree `degree` (supported up to 6).
const TriangleRule& triangle_rule(int degree);

}  // namespace kfbem::quad
