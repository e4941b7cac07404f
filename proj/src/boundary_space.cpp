#include <cmath>
#include <string>

#include "kfbem/bem.hpp"
#include "kfbem/error.hpp"
#include "kfbem/quadrature.hpp"

namespace kfbem {

double legendre(int q, double s) {
  if (q == 0) return 1.0;
  double p0 = 1.0, p1 = s;
  for (int k = 2; k <= q; ++k) {
    const double p2 = ((2.0 * k - 1.0) * s * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

BoundarySpace make_boundary_space(InterfaceMesh mesh, int k) {
  if (k != 0 && k != 1) {
    throw Error(ErrorCode::UnsupportedDegree, "boundary degree " + std::to_string(k) + " (supported: 0, 1)");
  }
  BoundarySpace s;
  s.degree = k;
  s.mesh = std::move(mesh);
  return s;
}

SparseRowC boundary_mass(const BoundarySpace& space) {
  const int n = space.n_h();
  SparseRowC m(n, n);
  m.reserve(Eigen::VectorXi::Constant(n, 1));
  for (int i = 0; i < n; ++i) {
    const double len = space.mesh.panel(space.panel_of(i)).length();
    m.insert(i, i) = len / (2.0 * space.order_of(i) + 1.0);
  }
  m.makeCompressed();
  return m;
}

VectorXc assemble_rhs(const BoundarySpace& space, const ScalarFunction& f) {
  VectorXc rhs = VectorXc::Zero(space.n_h());
  const auto& rule = quad::gauss_for_degree(space.degree + 6);
  const int nb = space.degree + 1;
  for (int l = 0; l < space.mesh.num_panels(); ++l) {
    const Segment s = space.mesh.panel(l);
    const double len = s.length();
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double t = rule.nodes[q];
      const cplx fx = f(s.at(t));
      for (int b = 0; b < nb; ++b) rhs[l * nb + b] += rule.weights[q] * len * fx * legendre(b, 2.0 * t - 1.0);
    }
  }
  return rhs;
}

VectorXc project_l2(const BoundarySpace& space, const ScalarFunction& f) {
  VectorXc z = assemble_rhs(space, f);
  for (int m = 0; m < space.n_h(); ++m) {
    z[m] *= (2.0 * space.order_of(m) + 1.0) / space.mesh.panel(space.panel_of(m)).length();
  }
  return z;
}

cplx density_value(const BoundarySpace& space, const VectorXc& z, int panel, double t) {
  const int nb = space.degree + 1;
  cplx v = 0.0;
  for (int b = 0; b < nb; ++b) v += z[panel * nb + b] * legendre(b, 2.0 * t - 1.0);
  return v;
}

double l2_proxy_norm(const BoundarySpace& space, const VectorXc& g) {
  const SparseRowC m = boundary_mass(space);
  const double q = g.dot(m * g).real();
  return std::sqrt(space.mesh.h_max) * std::sqrt(std::max(q, 0.0));
}

double dual_norm(const Eigen::MatrixXd& gram, const VectorXc& g) {
  if (gram.rows() != g.size()) throw Error(ErrorCode::NonSPD, "norm inducer and density sizes differ");
  const Eigen::VectorXd re = g.real(), im = g.imag();
  const double q = re.dot(gram * re) + im.dot(gram * im);
  const double scale = gram.cwiseAbs().maxCoeff() * g.squaredNorm();
  if (q < -1e-12 * scale) throw Error(ErrorCode::NonSPD, "negative Rayleigh quotient " + std::to_string(q));
  return std::sqrt(std::max(q, 0.0));
}

VectorXc prolong_density(const BoundarySpace& coarse, const BoundarySpace& fine, const VectorXc& z) {
  const int nc = coarse.mesh.num_panels(), nf = fine.mesh.num_panels();
  if (nc == 0 || nf % nc != 0) {
    throw Error(ErrorCode::DegenerateInterface, "fine panel count is not a multiple of the coarse count");
  }
  const int factor = nf / nc;
  const int nbf = fine.degree + 1;
  const auto& rule = quad::gauss_legendre(4);
  VectorXc out = VectorXc::Zero(fine.n_h());
  for (int l = 0; l < nc; ++l) {
    const double lc = coarse.mesh.panel(l).length();
    for (int i = 0; i < factor; ++i) {
      const int lf = l * factor + i;
      const double scale = (lc / factor) / fine.mesh.panel(lf).length();
      for (int b = 0; b < nbf; ++b) {
        cplx acc = 0.0;
        for (std::size_t q = 0; q < rule.size(); ++q) {
          const double s = rule.nodes[q];
          acc += rule.weights[q] * density_value(coarse, z, l, (i + s) / factor) * legendre(b, 2.0 * s - 1.0);
        }
        out[lf * nbf + b] = (2.0 * b + 1.0) * scale * acc;
      }
    }
  }
  return out;
}

}  // namespace kfbem
