#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "kfbem/error.hpp"
#include "kfbem/factorization.hpp"
#include "kfbem/fem.hpp"

using namespace kfbem;

namespace {

SparseRowC convection_matrix(double target) {
  const Mesh2D m = build_structured_mesh(DomainSpec::unit_square(), target);
  return assemble_stiffness(m, build_dofmap(m, 2), OperatorCoefficients::preset(Preset::Convection)).L;
}

RowMatrixXc random_block(int n, int m, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g;
  RowMatrixXc b(n, m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) b(i, j) = cplx(g(rng), g(rng));
  return b;
}

std::filesystem::path temp_file(const char* name) {
  return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("sparse LU solves against a dense reference") {
  const SparseRowC a = convection_matrix(0.25);
  const auto f = NewtonFactorization::factorize(a);
  CHECK(f.size() == a.rows());
  const Eigen::MatrixXcd dense(a);
  const RowMatrixXc b = random_block(f.size(), 5, 1);
  const RowMatrixXc x = f.solve_block(b);
  const Eigen::MatrixXcd ref = dense.partialPivLu().solve(Eigen::MatrixXcd(b));
  CHECK((Eigen::MatrixXcd(x) - ref).norm() < 1e-10 * ref.norm());

  const VectorXc y = f.solve_adjoint(b.col(0));
  const VectorXc yref = dense.adjoint().partialPivLu().solve(VectorXc(b.col(0)));
  CHECK((y - yref).norm() < 1e-10 * yref.norm());
  CHECK(f.stats().pivot_ratio > 0.0);
  CHECK(f.stats().nnz_matrix == a.nonZeros());
}

TEST_CASE("in-place solve with a leading dimension larger than the block") {
  const SparseRowC a = convection_matrix(0.3);
  const auto f = NewtonFactorization::factorize(a);
  const int n = f.size();
  RowMatrixXc wide = random_block(n, 7, 2);
  const RowMatrixXc sub = wide.leftCols(3);
  f.solve_in_place(wide.data(), 3, 7);
  CHECK((RowMatrixXc(wide.leftCols(3)) - f.solve_block(sub)).norm() < 1e-12 * sub.norm());
}

TEST_CASE("singular matrices are rejected") {
  SparseRowC a(3, 3);
  a.insert(0, 0) = 1.0;
  a.insert(1, 1) = 1.0;
  a.makeCompressed();
  CHECK_THROWS_AS(NewtonFactorization::factorize(a), Error);
}

TEST_CASE("factorization file round trip and corruption") {
  const SparseRowC a = convection_matrix(0.3);
  const auto f = NewtonFactorization::factorize(a);
  const auto path = temp_file("kfbem_test_factor.kfbm");
  f.save(path.string(), 42);
  const auto g = NewtonFactorization::load(path.string(), 42, f.size());
  const RowMatrixXc b = random_block(f.size(), 2, 3);
  CHECK((f.solve_block(b) - g.solve_block(b)).norm() == 0.0);

  try {
    NewtonFactorization::load(path.string(), 43, f.size());
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CacheMismatch);
  }
  {
    std::fstream io(path, std::ios::in | std::ios::out | std::ios::binary);
    io.seekp(64);
    const char junk = 0x5a;
    io.write(&junk, 1);
  }
  try {
    NewtonFactorization::load(path.string(), 42, f.size());
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CacheCorrupt);
  }
  std::filesystem::remove(path);
  CHECK_THROWS_AS(NewtonFactorization::load(path.string(), 42, f.size()), Error);
}
