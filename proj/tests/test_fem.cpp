#include <cmath>
#include <numbers>

#include "doctest.h"
#include "kfbem/error.hpp"
#include "kfbem/fem.hpp"

using namespace kfbem;

namespace {

constexpr double pi = std::numbers::pi;

// u = sin(pi x) sin(pi y) + x y, -lap u = 2 pi^2 sin sin
cplx exact(Point2 p) { return std::sin(pi * p.x) * std::sin(pi * p.y) + p.x * p.y; }
std::array<cplx, 2> exact_grad(Point2 p) {
  return {pi * std::cos(pi * p.x) * std::sin(pi * p.y) + p.y, pi * std::sin(pi * p.x) * std::cos(pi * p.y) + p.x};
}
cplx rhs_laplace(Point2 p) { return 2 * pi * pi * std::sin(pi * p.x) * std::sin(pi * p.y); }

double rate(double e0, double e1) { return std::log2(e0 / e1); }

}  // namespace

TEST_CASE("dof counts") {
  const Mesh2D m = build_structured_mesh(DomainSpec::unit_square(), 0.2);
  const DofMap p1 = build_dofmap(m, 1), p2 = build_dofmap(m, 2);
  CHECK(p1.n_full == m.num_vertices());
  CHECK(p2.n_full == m.num_vertices() + m.num_edges());
  int boundary_vertices = 0;
  for (int i = 0; i < p1.n_full; ++i) boundary_vertices += p1.constrained[i];
  CHECK(p1.n_d == m.num_vertices() - boundary_vertices);
  CHECK(p2.n_d == p1.n_d + (m.num_edges() - static_cast<int>(m.boundary.size())));
  CHECK_THROWS_AS(build_dofmap(m, 3), Error);
}

TEST_CASE("shape functions form a partition of unity with zero gradient sum") {
  const std::array<Point2, 3> tri{{{0.1, 0.2}, {0.9, 0.3}, {0.4, 0.8}}};
  const auto g = barycentric_gradients(tri);
  for (int p : {1, 2}) {
    ShapeValues s;
    eval_shape(p, {0.2, 0.3, 0.5}, g, s);
    const int n = p == 1 ? 3 : 6;
    double sum = 0.0;
    Point2 gsum{};
    for (int i = 0; i < n; ++i) {
      sum += s.value[i];
      gsum = gsum + s.grad[i];
    }
    CHECK(sum == doctest::Approx(1.0));
    CHECK(norm(gsum) < 1e-12);
  }
  const auto l = barycentric(tri, Point2{0.4, 0.8});
  CHECK(l[2] == doctest::Approx(1.0));
}

TEST_CASE("mass and gram matrices") {
  const Mesh2D m = build_structured_mesh(DomainSpec::unit_square(), 0.25);
  for (int p : {1, 2}) {
    const DofMap d = build_dofmap(m, p);
    const SparseRowC mass = assemble_mass(m, d, DofSet::Full);
    const VectorXc one = VectorXc::Ones(d.n_full);
    CHECK(std::abs((one.adjoint() * (mass * one))(0) - 1.0) < 1e-12);
    const VectorXc x = interpolate(m, d, [](Point2 q) { return cplx(q.x); });
    // integral of x^2 over the square, exact for interpolated linears
    CHECK(std::abs((x.adjoint() * (mass * x))(0) - 1.0 / 3.0) < 1e-12);
    const SparseRowC bm = assemble_boundary_mass(m, d, Marker::Dirichlet, DofSet::Full);
    CHECK(std::abs((one.adjoint() * (bm * one))(0) - 4.0) < 1e-12);
    const SparseRowC k = assemble_full(m, d, OperatorCoefficients::laplace());
    CHECK((k * one).norm() < 1e-12);
    CHECK(std::abs((x.adjoint() * (k * x))(0) - 1.0) < 1e-12);
  }
}

TEST_CASE("stiffness matrix symmetry follows the form") {
  const Mesh2D m = build_structured_mesh(DomainSpec::unit_square(), 0.25);
  const DofMap d = build_dofmap(m, 2);
  const auto sym = assemble_stiffness(m, d, OperatorCoefficients::preset(Preset::VariableDiffusion));
  CHECK(sym.hermitian);
  CHECK((SparseRowC(sym.L.adjoint()) - sym.L).norm() < 1e-12 * sym.L.norm());
  const auto conv = assemble_stiffness(m, d, OperatorCoefficients::preset(Preset::Convection));
  CHECK_FALSE(conv.hermitian);
  CHECK((SparseRowC(conv.L.adjoint()) - conv.L).norm() > 1e-3);
}

TEST_CASE("robin term subtracts the boundary mass") {
  DomainSpec dom = DomainSpec::unit_square();
  dom.neumann_sides = {2};
  const Mesh2D m = build_structured_mesh(dom, 0.25);
  const DofMap d = build_dofmap(m, 1);
  const SparseRowC plain = assemble_full(m, d, OperatorCoefficients::laplace());
  const SparseRowC robin = assemble_full(m, d, OperatorCoefficients::preset(Preset::Robin));
  const SparseRowC bm = assemble_boundary_mass(m, d, Marker::Neumann, DofSet::Full);
  CHECK((SparseRowC(plain - bm) - robin).norm() < 1e-12);
  const VectorXc one = VectorXc::Ones(d.n_full);
  CHECK(std::abs((one.adjoint() * (bm * one))(0) - 1.0) < 1e-12);
}

TEST_CASE("manufactured solution converges at the optimal rates") {
  for (int p : {1, 2}) {
    CAPTURE(p);
    std::vector<double> eh1, el2;
    Mesh2D m = build_structured_mesh(DomainSpec::unit_square(), 0.2);
    for (int level = 0; level < 3; ++level) {
      const DofMap d = build_dofmap(m, p);
      const VectorXc u = solve_dirichlet_problem(m, d, OperatorCoefficients::laplace(), rhs_laplace, exact);
      eh1.push_back(h1_seminorm_error(m, d, u, exact_grad));
      el2.push_back(l2_error(m, d, u, exact));
      m = refine_uniform(m);
    }
    CHECK(rate(eh1[1], eh1[2]) == doctest::Approx(p).epsilon(0.1));
    CHECK(rate(el2[1], el2[2]) == doctest::Approx(p + 1).epsilon(0.1));
  }
}

TEST_CASE("complex reaction and convection reproduce a manufactured solution") {
  OperatorCoefficients c = OperatorCoefficients::laplace();
  c.set_b(ComplexField::constant(1.0), ComplexField::constant(0.0));
  c.set_c(ComplexField::constant({0.0, 1.0}));
  const ScalarFunction f = [](Point2 p) {
    return rhs_laplace(p) + exact_grad(p)[0] + cplx(0.0, 1.0) * exact(p);
  };
  std::vector<double> err;
  Mesh2D m = build_structured_mesh(DomainSpec::unit_square(), 0.2);
  for (int level = 0; level < 3; ++level) {
    const DofMap d = build_dofmap(m, 2);
    err.push_back(l2_error(m, d, solve_dirichlet_problem(m, d, c, f, exact), exact));
    m = refine_uniform(m);
  }
  CHECK(rate(err[1], err[2]) == doctest::Approx(3.0).epsilon(0.1));
}

TEST_CASE("finite element evaluation reproduces quadratics exactly for p = 2") {
  const Mesh2D m = build_structured_mesh(DomainSpec::unit_square(), 0.3);
  const DofMap d = build_dofmap(m, 2);
  const ScalarFunction q = [](Point2 p) { return cplx(p.x * p.x - 2 * p.x * p.y + 3 * p.y, p.y * p.y); };
  const VectorXc u = interpolate(m, d, q);
  for (int t = 0; t < m.num_triangles(); t += 7) {
    const auto c = m.corners(t);
    const Point2 x = (c[0] * 0.2 + c[1] * 0.5 + c[2] * 0.3);
    CHECK(std::abs(evaluate_fe(m, d, u, t, x) - q(x)) < 1e-13);
  }
  CHECK(l2_error(m, d, u, q) < 1e-13);
}

TEST_CASE("non-finite coefficients are reported") {
  const Mesh2D m = build_structured_mesh(DomainSpec::unit_square(), 0.3);
  OperatorCoefficients c = OperatorCoefficients::laplace();
  c.set_c(ComplexField::real(Expression::parse("1/(x1 - x1)")));
  CHECK_THROWS_AS(assemble_stiffness(m, build_dofmap(m, 1), c), Error);
}
