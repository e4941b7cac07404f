#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kfbem/types.hpp"

namespace kfbem {

struct FactorizationStats {
  int n = 0;
  std::int64_t nnz_matrix = 0;
  std::int64_t nnz_l = 0;
  std::int64_t nnz_u = 0;
  double seconds = 0.0;
  double pivot_ratio = 0.0;  // min |U_ii| / max |U_ii|
};

/// Sparse LU of the stiffness matrix, P R A Q = L U. The numeric factors are
/// extracted once; all solves run on our own blocked triangular kernels so
/// that many right-hand sides go through the SIMD axpy path.
class NewtonFactorization {
 public:
  NewtonFactorization() = default;

  /// Throws SingularMatrix when a zero or negligible pivot appears.
  static NewtonFactorization factorize(const SparseRowC& a);

  int size() const { return n_; }
  const FactorizationStats& stats() const { return stats_; }

  /// In-place A^{-1} B for a row-major n x m block with leading dimension ld.
  void solve_in_place(cplx* block, std::size_t m, std::size_t ld) const;
  /// In-place A^{-H} B.
  void solve_adjoint_in_place(cplx* block, std::size_t m, std::size_t ld) const;

  RowMatrixXc solve_block(const RowMatrixXc& rhs) const;
  VectorXc solve(const VectorXc& rhs) const;
  VectorXc solve_adjoint(const VectorXc& rhs) const;

  /// Binary file: "KFBM", u32 version, u64 n_d, u64 mesh hash, payload, u64
  /// FNV-1a checksum of everything before it.
  void save(const std::string& path, std::uint64_t mesh_hash) const;
  /// Throws CacheCorrupt on bad magic/version/checksum, CacheMismatch when the
  /// size or mesh hash differ from the expectation.
  static NewtonFactorization load(const std::string& path, std::uint64_t mesh_hash, int expected_n);

  static constexpr std::uint32_t kFormatVersion = 1;

 private:
  void apply(cplx* block, std::size_t m, std::size_t ld, bool adjoint) const;

  int n_ = 0;
  std::vector<int> p_, q_;
  std::vector<double> row_scale_;  // multiply row i by row_scale_[i]
  // strictly lower part of L (unit diagonal), CSR
  std::vector<int> l_ptr_, l_idx_;
  std::vector<cplx> l_val_;
  // strictly upper part of U, CSR, and its diagonal
  std::vector<int> u_ptr_, u_idx_;
  std::vector<cplx> u_val_, u_diag_;
  // conjugate transposes for adjoint solves
  std::vector<int> uh_ptr_, uh_idx_;
  std::vector<cplx> uh_val_, uh_diag_;
  std::vector<int> lh_ptr_, lh_idx_;
  std::vector<cplx> lh_val_;
  FactorizationStats stats_;

  void build_adjoint_factors();
};

}  // namespace kfbem
