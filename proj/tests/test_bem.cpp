#include <cmath>
#include <random>

#include "doctest.h"
#include "kfbem/bem.hpp"
#include "kfbem/error.hpp"

using namespace kfbem;

namespace {

struct Setup {
  Mesh2D mesh;
  DofMap dofs;
  OperatorCoefficients coeffs;
  StiffnessMatrix stiffness;
  NewtonFactorization fact;
  BoundarySpace space;
  OverlapTable overlaps;
  TransferMatrix transfer;
};

Setup make_setup(double d, const std::vector<Point2>& loop, double h, int p, int k,
                 OperatorCoefficients coeffs = OperatorCoefficients::laplace(), DomainSpec dom = DomainSpec::unit_square()) {
  Setup s;
  s.mesh = build_structured_mesh(dom, d);
  s.dofs = build_dofmap(s.mesh, p);
  s.coeffs = std::move(coeffs);
  s.stiffness = assemble_stiffness(s.mesh, s.dofs, s.coeffs);
  s.fact = NewtonFactorization::factorize(s.stiffness.L);
  s.space = make_boundary_space(build_interface(loop, h, true), k);
  s.overlaps = compute_overlaps(s.mesh, s.space.mesh);
  s.transfer = assemble_transfer(s.mesh, s.dofs, s.space, s.overlaps);
  return s;
}

const std::vector<Point2> kSquareLoop{{0.25, 0.25}, {0.75, 0.25}, {0.75, 0.75}, {0.25, 0.75}};
const std::vector<Point2> kSkewLoop{{0.21, 0.33}, {0.78, 0.27}, {0.69, 0.81}, {0.3, 0.72}};

VectorXc random_vector(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g;
  VectorXc v(n);
  for (int i = 0; i < n; ++i) v[i] = cplx(g(rng), g(rng));
  return v;
}

}  // namespace

TEST_CASE("legendre basis and boundary mass") {
  CHECK(legendre(0, 0.3) == 1.0);
  CHECK(legendre(1, 0.3) == doctest::Approx(0.3));
  CHECK(legendre(2, 0.3) == doctest::Approx(0.5 * (3 * 0.09 - 1)));
  const BoundarySpace s = make_boundary_space(build_interface(kSkewLoop, 0.2, true), 1);
  const SparseRowC m = boundary_mass(s);
  for (int i = 0; i < s.n_h(); ++i) {
    const double len = s.mesh.panel(s.panel_of(i)).length();
    CHECK(m.coeff(i, i).real() == doctest::Approx(len / (2 * s.order_of(i) + 1)));
  }
  CHECK_THROWS_AS(make_boundary_space(build_interface(kSkewLoop, 0.2, true), 2), Error);
}

TEST_CASE("projection reproduces piecewise linears") {
  const BoundarySpace s = make_boundary_space(build_interface(kSkewLoop, 0.15, true), 1);
  const ScalarFunction f = [](Point2 x) { return cplx(2 * x.x - x.y, x.y); };
  const VectorXc z = project_l2(s, f);
  for (int l = 0; l < s.mesh.num_panels(); ++l) {
    for (double t : {0.0, 0.3, 1.0}) CHECK(std::abs(density_value(s, z, l, t) - f(s.mesh.panel(l).at(t))) < 1e-13);
  }
}

TEST_CASE("transfer matrix integrates traces exactly") {
  for (int p : {1, 2}) {
    for (int k : {0, 1}) {
      CAPTURE(p);
      CAPTURE(k);
      const Setup s = make_setup(0.1, kSkewLoop, 0.13, p, k);
      const VectorXc one = VectorXc::Ones(s.dofs.n_d);
      const ScalarFunction q = [p](Point2 x) { return p == 1 ? cplx(x.x - 2 * x.y) : cplx(x.x * x.y, x.x * x.x); };
      VectorXc qf(s.dofs.n_d);
      const VectorXc full = interpolate(s.mesh, s.dofs, q);
      for (int i = 0; i < s.dofs.n_d; ++i) qf[i] = full[s.dofs.free_to_full[i]];
      const VectorXc moments = s.transfer.r.transpose() * qf;
      const VectorXc expected = assemble_rhs(s.space, q);
      CHECK((moments - expected).norm() < 1e-13);
      const VectorXc ones = s.transfer.r.transpose() * one;
      for (int m = 0; m < s.space.n_h(); ++m) {
        const double len = s.space.mesh.panel(s.space.panel_of(m)).length();
        CHECK(std::abs(ones[m] - (s.space.order_of(m) == 0 ? len : 0.0)) < 1e-14);
      }
    }
  }
}

TEST_CASE("transfer sparsity is bounded by the overlap constant") {
  for (double d : {0.2, 0.1, 0.05}) {
    for (const auto& loop : {kSquareLoop, kSkewLoop}) {
      const Setup s = make_setup(d, loop, d, 1, 0);
      const auto& t = s.transfer;
      CHECK(t.r.nonZeros() <= static_cast<long long>(t.c_r) * s.space.n_h());
      CHECK(t.c_r_effective <= t.c_r);
      CHECK(static_cast<long long>(t.sigma.size()) == t.r_sigma.rows());
      CHECK(t.r_sigma.nonZeros() == t.r.nonZeros());
      CHECK(t.c_ov > 0.0);
    }
  }
}

TEST_CASE("single layer matches the dense inverse at micro scale") {
  for (int p : {1, 2}) {
    for (int k : {0, 1}) {
      for (Preset pr : {Preset::Laplace, Preset::Convection}) {
        const Setup s = make_setup(p == 1 ? 0.2 : 0.4, kSkewLoop, 0.45, p, k, OperatorCoefficients::preset(pr));
        REQUIRE(s.dofs.n_d <= 200);
        REQUIRE(s.space.n_h() <= 16);
        const Eigen::MatrixXcd l(s.stiffness.L);
        const Eigen::MatrixXcd r(s.transfer.r);
        const Eigen::MatrixXcd brute = r.adjoint() * l.inverse() * r;
        const MatrixXc multi = assemble_single_layer(s.fact, s.transfer, AssemblyPath::MultiSolve);
        const MatrixXc restricted = assemble_single_layer(s.fact, s.transfer, AssemblyPath::RestrictedSubmatrix);
        CHECK((multi - brute).norm() <= 1e-10 * brute.norm());
        CHECK((restricted - multi).norm() <= 1e-12 * multi.norm());
      }
    }
  }
}

TEST_CASE("energy identity for a hermitian form") {
  const Setup s = make_setup(0.05, kSkewLoop, 0.1, 2, 1, OperatorCoefficients::preset(Preset::VariableDiffusion));
  const MatrixXc v = assemble_single_layer(s.fact, s.transfer);
  for (unsigned seed : {1u, 2u, 3u}) {
    const VectorXc z = random_vector(s.space.n_h(), seed);
    const VectorXc x = s.fact.solve(s.transfer.r * z);
    const cplx lhs = z.dot(v * z);
    const cplx rhs = x.dot(s.stiffness.L * x);
    CHECK(std::abs(lhs - rhs) <= 1e-10 * std::abs(lhs));
    CHECK(std::abs(lhs.imag()) <= 1e-10 * std::abs(lhs));
  }
  CHECK((v - v.adjoint()).norm() <= 1e-12 * v.norm());
}

TEST_CASE("single layer is coercive for the coercive presets") {
  DomainSpec dom = DomainSpec::unit_square();
  dom.neumann_sides = {2};
  for (Preset pr : {Preset::Laplace, Preset::VariableDiffusion, Preset::Convection, Preset::Robin}) {
    CAPTURE(preset_name(pr));
    const Setup s = make_setup(0.05, kSquareLoop, 0.05, 1, 0, OperatorCoefficients::preset(pr), dom);
    CHECK(coercivity_proxy(assemble_single_layer(s.fact, s.transfer)) > 0.0);
  }
}

TEST_CASE("zero data gives a zero density") {
  const Setup s = make_setup(0.1, kSquareLoop, 0.1, 1, 0);
  const MatrixXc v = assemble_single_layer(s.fact, s.transfer);
  const auto sol = solve_single_layer(v, assemble_rhs(s.space, [](Point2) { return cplx(0.0); }));
  CHECK(sol.z.norm() == 0.0);
  const VectorXc rhs = assemble_rhs(s.space, [](Point2 x) { return cplx(1.0 + x.x); });
  const auto one = solve_single_layer(v, rhs);
  CHECK(one.relative_residual < 1e-12);
  CHECK_FALSE(one.ill_conditioned);
}

TEST_CASE("dual and proxy norms") {
  const BoundarySpace s = make_boundary_space(build_interface(kSquareLoop, 0.25, true), 0);
  Eigen::MatrixXd gram = Eigen::MatrixXd::Identity(s.n_h(), s.n_h());
  const VectorXc g = VectorXc::Constant(s.n_h(), cplx(0.0, 2.0));
  CHECK(dual_norm(gram, g) == doctest::Approx(2.0 * std::sqrt(s.n_h())));
  CHECK(l2_proxy_norm(s, g) == doctest::Approx(std::sqrt(0.25) * 2.0 * std::sqrt(2.0)));
  CHECK_THROWS_AS(dual_norm(-gram, g), Error);
}

TEST_CASE("prolongation preserves panel charges and is exact on coarse densities") {
  for (int k : {0, 1}) {
    const InterfaceMesh coarse = build_interface(kSkewLoop, 0.3, true);
    const BoundarySpace sc = make_boundary_space(coarse, k);
    InterfaceMesh fine_mesh;
    {
      std::vector<Point2> pts;
      for (int l = 0; l < coarse.num_panels(); ++l) {
        const Segment seg = coarse.panel(l);
        for (int i = 0; i < 3; ++i) pts.push_back(seg.at(i / 3.0));
      }
      fine_mesh = interface_from_points(pts, true);
    }
    const BoundarySpace sf = make_boundary_space(fine_mesh, k);
    const VectorXc z = random_vector(sc.n_h(), 4);
    const VectorXc zf = prolong_density(sc, sf, z);
    for (int l = 0; l < coarse.num_panels(); ++l) {
      for (double t : {0.1, 0.5, 0.95}) {
        const int sub = std::min(2, static_cast<int>(t * 3));
        CHECK(std::abs(density_value(sf, zf, 3 * l + sub, 3 * t - sub) - density_value(sc, z, l, t)) < 1e-13);
      }
    }
  }
}

TEST_CASE("neumann jump of the discrete potential") {
  const Setup s = make_setup(0.045, kSquareLoop, 0.1, 1, 0);
  const Eigen::MatrixXd gram = Eigen::MatrixXd(boundary_mass(s.space).real());
  const VectorXc zero = VectorXc::Zero(s.space.n_h());
  const auto j0 = jump_relation_check(s.mesh, s.dofs, s.coeffs, s.space, s.overlaps, s.fact, s.transfer, zero, gram);
  CHECK(j0.defect == 0.0);
  const VectorXc g = project_l2(s.space, [](Point2 x) { return cplx(1.0 + x.x * x.y); });
  const auto j1 = jump_relation_check(s.mesh, s.dofs, s.coeffs, s.space, s.overlaps, s.fact, s.transfer, g, gram);
  const auto j2 =
      jump_relation_check(s.mesh, s.dofs, s.coeffs, s.space, s.overlaps, s.fact, s.transfer, VectorXc(2.0 * g), gram);
  CHECK(j2.defect == doctest::Approx(2.0 * j1.defect).epsilon(1e-12));
  CHECK(j1.relative < 1.0);

  const Setup skew = make_setup(0.05, kSkewLoop, 0.1, 1, 0);
  const Eigen::MatrixXd gs = Eigen::MatrixXd(boundary_mass(skew.space).real());
  CHECK_THROWS_AS(jump_relation_check(skew.mesh, skew.dofs, skew.coeffs, skew.space, skew.overlaps, skew.fact,
                                      skew.transfer, project_l2(skew.space, [](Point2) { return cplx(1.0); }), gs),
                  Error);
}
