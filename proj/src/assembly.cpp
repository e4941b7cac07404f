#include <cmath>
#include <string>

#include "kfbem/error.hpp"
#include "kfbem/factorization.hpp"
#include "kfbem/fem.hpp"
#include "kfbem/quadrature.hpp"

namespace kfbem {

namespace {

using Triplets = std::vector<Eigen::Triplet<cplx, int>>;

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

void check_finite(const CoefficientValues& v, Point2 x) {
  bool ok = finite(v.c) && finite(v.b[0]) && finite(v.b[1]);
  for (int i = 0; i < 4; ++i) ok = ok && finite(v.A(i / 2, i % 2));
  if (!ok) {
    throw Error(ErrorCode::QuadratureOverflow,
                "non-finite coefficient at (" + std::to_string(x.x) + ", " + std::to_string(x.y) + ")");
  }
}

struct Index {
  const DofMap& dofs;
  DofSet set;
  int operator()(int full) const { return set == DofSet::Full ? full : dofs.free_index[full]; }
  int size() const { return set == DofSet::Full ? dofs.n_full : dofs.n_d; }
};

void scatter(const Index& index, const std::array<int, 6>& loc, int nl, const Eigen::MatrixXcd& ke,
             Triplets& out) {
  for (int a = 0; a < nl; ++a) {
    const int i = index(loc[a]);
    if (i < 0) continue;
    for (int b = 0; b < nl; ++b) {
      const int j = index(loc[b]);
      if (j < 0) continue;
      if (ke(a, b) != cplx(0.0)) out.emplace_back(i, j, ke(a, b));
    }
  }
}

SparseRowC finish(int n, Triplets& t) {
  SparseRowC m(n, n);
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

// Boundary mass on one face in the local numbering of the owning triangle.
Eigen::MatrixXcd face_mass(const Mesh2D& mesh, const DofMap& dofs, int face, int& tri_out) {
  const auto& f = mesh.boundary[face];
  const int e = mesh.find_edge(f.edge[0], f.edge[1]);
  const int t = mesh.edge_triangles[e][0];
  tri_out = t;
  const auto c = mesh.corners(t);
  const auto gl = barycentric_gradients(c);
  const int p = dofs.degree, nl = dofs.local_size();
  const Point2 a = mesh.vertices[f.edge[0]], b = mesh.vertices[f.edge[1]];
  const double len = distance(a, b);
  const auto& rule = quad::gauss_for_degree(2 * p + 2);
  Eigen::MatrixXcd me = Eigen::MatrixXcd::Zero(nl, nl);
  ShapeValues sv;
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const Point2 x = a + (b - a) * rule.nodes[q];
    eval_shape(p, barycentric(c, x), gl, sv);
    const double w = rule.weights[q] * len;
    for (int i = 0; i < nl; ++i)
      for (int j = 0; j < nl; ++j) me(i, j) += w * sv.value[i] * sv.value[j];
  }
  return me;
}

SparseRowC assemble_form(const Mesh2D& mesh, const DofMap& dofs, const OperatorCoefficients& coeffs,
                         DofSet set) {
  const Index index{dofs, set};
  const int nl = dofs.local_size();
  Triplets trip;
  trip.reserve(static_cast<std::size_t>(mesh.num_triangles()) * nl * nl);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    scatter(index, dofs.local[t], nl, element_matrix(mesh, dofs, coeffs, t), trip);
  }
  if (const auto r = coeffs.robin_r()) {
    for (int f = 0; f < static_cast<int>(mesh.boundary.size()); ++f) {
      if (mesh.boundary[f].marker != Marker::Neumann) continue;
      int t = -1;
      const Eigen::MatrixXcd me = face_mass(mesh, dofs, f, t);
      scatter(index, dofs.local[t], nl, -(*r) * me, trip);
    }
  }
  return finish(index.size(), trip);
}

}  // namespace

Eigen::MatrixXcd element_matrix(const Mesh2D& mesh, const DofMap& dofs, const OperatorCoefficients& coeffs,
                                int t) {
  const auto c = mesh.corners(t);
  const auto gl = barycentric_gradients(c);
  const double area = mesh.area(t);
  const int p = dofs.degree, nl = dofs.local_size();
  const auto& rule = quad::triangle_rule(volume_quadrature_degree(p));
  Eigen::MatrixXcd ke = Eigen::MatrixXcd::Zero(nl, nl);
  ShapeValues sv;
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const auto& l = rule.points[q];
    const Point2 x = c[0] * l[0] + c[1] * l[1] + c[2] * l[2];
    const CoefficientValues v = coeffs.evaluate(x);
    check_finite(v, x);
    eval_shape(p, l, gl, sv);
    const double w = rule.weights[q] * area;
    for (int k = 0; k < nl; ++k) {
      const Point2 gk = sv.grad[k];
      const cplx agx = v.A(0, 0) * gk.x + v.A(0, 1) * gk.y;
      const cplx agy = v.A(1, 0) * gk.x + v.A(1, 1) * gk.y;
      const cplx bg = v.b[0] * gk.x + v.b[1] * gk.y;
      for (int j = 0; j < nl; ++j) {
        const Point2 gj = sv.grad[j];
        ke(j, k) += w * (agx * gj.x + agy * gj.y + (bg + v.c * sv.value[k]) * sv.value[j]);
      }
    }
  }
  return ke;
}

SparseRowC assemble_full(const Mesh2D& mesh, const DofMap& dofs, const OperatorCoefficients& coeffs) {
  return assemble_form(mesh, dofs, coeffs, DofSet::Full);
}

StiffnessMatrix assemble_stiffness(const Mesh2D& mesh, const DofMap& dofs, const OperatorCoefficients& coeffs) {
  StiffnessMatrix s;
  s.L = assemble_form(mesh, dofs, coeffs, DofSet::Free);
  s.n_d = dofs.n_d;
  s.hermitian = coeffs.hermitian_form();
  return s;
}

SparseRowC assemble_mass(const Mesh2D& mesh, const DofMap& dofs, DofSet set) {
  auto mass = OperatorCoefficients::from_json(nlohmann::json{{"A", "0"}, {"c", "1"}, {"a_min", 0.0}}, "/mass");
  return assemble_form(mesh, dofs, mass, set);
}

SparseRowC assemble_h1_gram(const Mesh2D& mesh, const DofMap& dofs, DofSet set) {
  auto gram = OperatorCoefficients::from_json(nlohmann::json{{"A", "1"}, {"c", "1"}}, "/gram");
  return assemble_form(mesh, dofs, gram, set);
}

SparseRowC assemble_boundary_mass(const Mesh2D& mesh, const DofMap& dofs, Marker marker, DofSet set) {
  const Index index{dofs, set};
  const int nl = dofs.local_size();
  Triplets trip;
  for (int f = 0; f < static_cast<int>(mesh.boundary.size()); ++f) {
    if (mesh.boundary[f].marker != marker) continue;
    int t = -1;
    const Eigen::MatrixXcd me = face_mass(mesh, dofs, f, t);
    scatter(index, dofs.local[t], nl, me, trip);
  }
  return finish(index.size(), trip);
}

VectorXc assemble_load(const Mesh2D& mesh, const DofMap& dofs, const ScalarFunction& f) {
  VectorXc b = VectorXc::Zero(dofs.n_full);
  const int p = dofs.degree, nl = dofs.local_size();
  const auto& rule = quad::triangle_rule(6);
  ShapeValues sv;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto c = mesh.corners(t);
    const auto gl = barycentric_gradients(c);
    const double area = mesh.area(t);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const auto& l = rule.points[q];
      const Point2 x = c[0] * l[0] + c[1] * l[1] + c[2] * l[2];
      const cplx fx = f(x);
      eval_shape(p, l, gl, sv);
      for (int j = 0; j < nl; ++j) b[dofs.local[t][j]] += rule.weights[q] * area * fx * sv.value[j];
    }
  }
  return b;
}

VectorXc interpolate(const Mesh2D& mesh, const DofMap& dofs, const ScalarFunction& g) {
  VectorXc u(dofs.n_full);
  for (int i = 0; i < dofs.n_full; ++i) u[i] = g(dof_point(mesh, dofs, i));
  return u;
}

VectorXc solve_dirichlet_problem(const Mesh2D& mesh, const DofMap& dofs, const OperatorCoefficients& coeffs,
                                 const ScalarFunction& f, const ScalarFunction& g) {
  const SparseRowC a = assemble_full(mesh, dofs, coeffs);
  const VectorXc load = assemble_load(mesh, dofs, f);
  VectorXc u = VectorXc::Zero(dofs.n_full);
  for (int i = 0; i < dofs.n_full; ++i) {
    if (dofs.constrained[i]) u[i] = g(dof_point(mesh, dofs, i));
  }
  const VectorXc lifted = load - a * u;
  VectorXc rhs(dofs.n_d);
  for (int i = 0; i < dofs.n_d; ++i) rhs[i] = lifted[dofs.free_to_full[i]];
  const StiffnessMatrix s = assemble_stiffness(mesh, dofs, coeffs);
  const VectorXc uf = NewtonFactorization::factorize(s.L).solve(rhs);
  for (int i = 0; i < dofs.n_d; ++i) u[dofs.free_to_full[i]] = uf[i];
  return u;
}

cplx evaluate_fe(const Mesh2D& mesh, const DofMap& dofs, const VectorXc& u_full, int t, Point2 x) {
  const auto c = mesh.corners(t);
  ShapeValues sv;
  eval_shape(dofs.degree, barycentric(c, x), barycentric_gradients(c), sv);
  cplx s = 0.0;
  for (int j = 0; j < dofs.local_size(); ++j) s += u_full[dofs.local[t][j]] * sv.value[j];
  return s;
}

double h1_seminorm_error(const Mesh2D& mesh, const DofMap& dofs, const VectorXc& u_full,
                         const GradientFunction& grad_exact) {
  const auto& rule = quad::triangle_rule(6);
  double err = 0.0;
  ShapeValues sv;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto c = mesh.corners(t);
    const auto gl = barycentric_gradients(c);
    const double area = mesh.area(t);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const auto& l = rule.points[q];
      const Point2 x = c[0] * l[0] + c[1] * l[1] + c[2] * l[2];
      eval_shape(dofs.degree, l, gl, sv);
      cplx gx = 0.0, gy = 0.0;
      for (int j = 0; j < dofs.local_size(); ++j) {
        gx += u_full[dofs.local[t][j]] * sv.grad[j].x;
        gy += u_full[dofs.local[t][j]] * sv.grad[j].y;
      }
      const auto ge = grad_exact(x);
      err += rule.weights[q] * area * (std::norm(gx - ge[0]) + std::norm(gy - ge[1]));
    }
  }
  return std::sqrt(err);
}

double l2_error(const Mesh2D& mesh, const DofMap& dofs, const VectorXc& u_full, const ScalarFunction& exact) {
  const auto& rule = quad::triangle_rule(6);
  double err = 0.0;
  ShapeValues sv;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto c = mesh.corners(t);
    const auto gl = barycentric_gradients(c);
    const double area = mesh.area(t);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const auto& l = rule.points[q];
      const Point2 x = c[0] * l[0] + c[1] * l[1] + c[2] * l[2];
      eval_shape(dofs.degree, l, gl, sv);
      cplx v = 0.0;
      for (int j = 0; j < dofs.local_size(); ++j) v += u_full[dofs.local[t][j]] * sv.value[j];
      err += rule.weights[q] * area * std::norm(v - exact(x));
    }
  }
  return std::sqrt(err);
}

}  // namespace kfbem
