#include <random>

#include "doctest.h"
#include "kfbem/error.hpp"
#include "kfbem/factorization.hpp"
#include "kfbem/fem.hpp"
#include "kfbem/surrogate.hpp"

using namespace kfbem;

namespace {

struct Problem {
  SparseRowC l;
  SparseRowC gram;
};

Problem make_problem(Preset preset, double target) {
  const Mesh2D m = build_structured_mesh(DomainSpec::unit_square(), target);
  const DofMap d = build_dofmap(m, 1);
  return {assemble_stiffness(m, d, OperatorCoefficients::preset(preset)).L, assemble_h1_gram(m, d)};
}

VectorXc random_vector(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g;
  VectorXc v(n);
  for (int i = 0; i < n; ++i) v[i] = cplx(g(rng), g(rng));
  return v;
}

}  // namespace

TEST_CASE("gmres on a diagonal system converges in as many steps as distinct eigenvalues") {
  const int n = 40;
  const LinearOperator a = [](const VectorXc& in, VectorXc& out) {
    out = in;
    for (int i = 0; i < in.size(); ++i) out[i] *= (i % 3 == 0) ? 2.0 : 5.0;
  };
  const LinearOperator id = [](const VectorXc& in, VectorXc& out) { out = in; };
  const VectorXc b = random_vector(n, 5);
  VectorXc x = VectorXc::Zero(n);
  const auto r = gmres(a, id, b, x, 1e-12, 30, 100);
  CHECK(r.converged);
  CHECK(r.iterations <= 3);
  VectorXc ax;
  a(x, ax);
  CHECK((ax - b).norm() < 1e-11 * b.norm());
}

TEST_CASE("surrogate solves meet the requested tolerance") {
  for (Preset p : {Preset::Laplace, Preset::Convection}) {
    const Problem pr = make_problem(p, 0.05);
    const auto exact = NewtonFactorization::factorize(pr.l);
    for (double tol : {1e-4, 1e-8}) {
      SurrogateConfig cfg;
      cfg.tolerance = tol;
      const SurrogateInverse inv(pr.l, cfg);
      const VectorXc b = random_vector(inv.size(), 9);
      const VectorXc x = inv.solve(b);
      CHECK((pr.l * x - b).norm() <= tol * b.norm() * (1 + 1e-9));
      const VectorXc xh = inv.solve_adjoint(b);
      CHECK((SparseRowC(pr.l.adjoint()) * xh - b).norm() <= tol * b.norm() * (1 + 1e-9));
      const VectorXc xe = exact.solve(b);
      CHECK((x - xe).norm() <= 1e3 * tol * xe.norm());
      CHECK(inv.stats().solves >= 1);
    }
  }
}

TEST_CASE("surrogate reports non-convergence") {
  const Problem pr = make_problem(Preset::Laplace, 0.05);
  SurrogateConfig cfg;
  cfg.tolerance = 1e-14;
  cfg.max_iterations = 2;
  cfg.ilut_drop = 0.5;
  cfg.ilut_fill = 1;
  const SurrogateInverse inv(pr.l, cfg);
  CHECK_THROWS_AS(inv.solve(random_vector(inv.size(), 1)), Error);
}

TEST_CASE("norm estimates against dense eigenvalues") {
  const Problem pr = make_problem(Preset::Laplace, 0.2);
  const Eigen::MatrixXcd g(pr.gram);
  const double lmax = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(g).eigenvalues().maxCoeff();
  CHECK(power_iteration_lambda_max(pr.gram, 200) == doctest::Approx(lmax).epsilon(0.02));

  const auto f = NewtonFactorization::factorize(pr.l);
  const Eigen::MatrixXcd l(pr.l);
  const auto svd = l.jacobiSvd();
  const double inv_norm = 1.0 / svd.singularValues().minCoeff();
  const double est = inverse_norm_estimate([&](const VectorXc& b) { return f.solve(b); },
                                           [&](const VectorXc& b) { return f.solve_adjoint(b); }, f.size(), 100);
  CHECK(est == doctest::Approx(inv_norm).epsilon(0.02));
  CHECK(est <= inv_norm * (1 + 1e-9));
}

TEST_CASE("multi-column surrogate solve reports the perturbation bound") {
  const Problem pr = make_problem(Preset::Laplace, 0.1);
  SurrogateConfig cfg;
  cfg.tolerance = 1e-6;
  RowMatrixXc b(pr.l.rows(), 3);
  for (int j = 0; j < 3; ++j) b.col(j) = random_vector(static_cast<int>(pr.l.rows()), 20 + j);
  const auto r = surrogate_solve_multi(pr.l, cfg, b, pr.gram);
  CHECK(r.kappa_bound > 0.0);
  CHECK(r.eps_d_estimate == doctest::Approx(1e-6 * r.kappa_bound));
  CHECK(r.stats.solves == 3);
  CHECK((pr.l * Eigen::MatrixXcd(r.solution) - Eigen::MatrixXcd(b)).norm() < 1e-5 * b.norm());
}
