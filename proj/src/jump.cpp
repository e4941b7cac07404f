#include <cmath>
#include <string>

#include "kfbem/bem.hpp"
#include "kfbem/error.hpp"
#include "kfbem/quadrature.hpp"

namespace kfbem {

namespace {

// Outward co-normal derivative (A grad u) . n of the restriction of u to triangle t.
cplx conormal_flux(const Mesh2D& mesh, const DofMap& dofs, const OperatorCoefficients& coeffs, const VectorXc& u,
                   int t, int local_edge, Point2 x) {
  const auto c = mesh.corners(t);
  const auto gl = barycentric_gradients(c);
  ShapeValues sv;
  eval_shape(dofs.degree, barycentric(c, x), gl, sv);
  cplx gx = 0.0, gy = 0.0;
  for (int a = 0; a < dofs.local_size(); ++a) {
    const cplx ua = u[dofs.local[t][a]];
    gx += ua * sv.grad[a].x;
    gy += ua * sv.grad[a].y;
  }
  const Point2 p = c[(local_edge + 1) % 3], q = c[(local_edge + 2) % 3];
  const Point2 e = q - p;
  const Point2 n = Point2{e.y, -e.x} / norm(e);  // outward for counter-clockwise triangles
  const CoefficientValues v = coeffs.evaluate(x);
  return (v.A(0, 0) * gx + v.A(0, 1) * gy) * n.x + (v.A(1, 0) * gx + v.A(1, 1) * gy) * n.y;
}

int local_edge_containing(const Mesh2D& mesh, int t, Point2 a, Point2 b) {
  const auto c = mesh.corners(t);
  for (int k = 0; k < 3; ++k) {
    const Point2 p = c[(k + 1) % 3], q = c[(k + 2) % 3];
    const Point2 e = q - p;
    const double len = norm(e);
    if (std::abs(cross(e, a - p)) <= 1e-10 * len * len && std::abs(cross(e, b - p)) <= 1e-10 * len * len) {
      return k;
    }
  }
  return -1;
}

}  // namespace

JumpCheck jump_relation_check(const Mesh2D& mesh, const DofMap& dofs, const OperatorCoefficients& coeffs,
                              const BoundarySpace& space, const OverlapTable& overlaps,
                              const NewtonFactorization& fact, const TransferMatrix& t, const VectorXc& g,
                              const Eigen::MatrixXd& gram) {
  JumpCheck out;
  const VectorXc u = expand_free(dofs, fact.solve(t.r * g));
  const int nb = space.degree + 1;
  const auto& rule = quad::gauss_for_degree(dofs.degree + space.degree + 6);
  const cplx r = coeffs.robin_r().value_or(0.0);
  out.jump = VectorXc::Zero(space.n_h());
  for (int l = 0; l < space.mesh.num_panels(); ++l) {
    const Segment seg = space.mesh.panel(l);
    for (const ClipPiece& piece : panel_pieces(mesh, space.mesh, overlaps, l)) {
      const Point2 a = seg.at(piece.t0), b = seg.at(piece.t1);
      const int k = local_edge_containing(mesh, piece.triangle, a, b);
      if (k < 0) {
        throw Error(ErrorCode::InterfaceNotResolved, "panel " + std::to_string(l) + " does not lie on mesh edges");
      }
      const int e = mesh.triangle_edges[piece.triangle][k];
      const auto owners = mesh.edge_triangles[e];
      const int other = owners[0] == piece.triangle ? owners[1] : owners[0];
      int other_edge = -1;
      if (other >= 0) {
        for (int kk = 0; kk < 3; ++kk)
          if (mesh.triangle_edges[other][kk] == e) other_edge = kk;
      }
      const double dt = piece.t1 - piece.t0;
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const double tt = piece.t0 + dt * rule.nodes[q];
        const Point2 x = seg.at(tt);
        cplx jump = conormal_flux(mesh, dofs, coeffs, u, piece.triangle, k, x);
        if (other >= 0) {
          jump += conormal_flux(mesh, dofs, coeffs, u, other, other_edge, x);
        } else {
          // the exterior side of a boundary face contributes -G u
          jump -= r * evaluate_fe(mesh, dofs, u, piece.triangle, x);
        }
        const double w = rule.weights[q] * dt;
        for (int m = 0; m < nb; ++m) out.jump[l * nb + m] += (2.0 * m + 1.0) * w * jump * legendre(m, 2.0 * tt - 1.0);
      }
    }
  }
  out.defect = dual_norm(gram, out.jump - g);
  const double gn = dual_norm(gram, g);
  out.relative = gn > 0.0 ? out.defect / gn : 0.0;
  return out;
}

}  // namespace kfbem
