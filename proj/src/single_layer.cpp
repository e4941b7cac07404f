#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "kfbem/bem.hpp"
#include "kfbem/simd.hpp"

namespace kfbem {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

constexpr Eigen::Index kSolveChunk = 64;

simd::CsrView view(const SparseRowC& m) {
  return {static_cast<int>(m.rows()), m.outerIndexPtr(), m.innerIndexPtr(), m.valuePtr()};
}

}  // namespace

RowMatrixXc restricted_inverse(const NewtonFactorization& fact, const std::vector<int>& sigma,
                               AssemblyCounters* counters) {
  const auto t0 = Clock::now();
  const Eigen::Index s = static_cast<Eigen::Index>(sigma.size());
  const Eigen::Index n = fact.size();
  RowMatrixXc out(s, s);
  for (Eigen::Index c0 = 0; c0 < s; c0 += kSolveChunk) {
    const Eigen::Index w = std::min(kSolveChunk, s - c0);
    RowMatrixXc block = RowMatrixXc::Zero(n, w);
    for (Eigen::Index c = 0; c < w; ++c) block(sigma[c0 + c], c) = 1.0;
    fact.solve_in_place(block.data(), static_cast<std::size_t>(w), static_cast<std::size_t>(w));
    for (Eigen::Index i = 0; i < s; ++i) out.block(i, c0, 1, w) = block.row(sigma[i]);
  }
  if (counters) {
    counters->volume_solves += s;
    counters->sigma_size = s;
    counters->seconds_solve += seconds_since(t0);
  }
  return out;
}

MatrixXc single_layer_from_restricted(const RowMatrixXc& n_sigma, const TransferMatrix& t,
                                      AssemblyCounters* counters) {
  const auto t0 = Clock::now();
  const std::size_t s = static_cast<std::size_t>(t.r_sigma.rows());
  const Eigen::Index nh = t.r_sigma.cols();
  const SparseRowC rt = t.r_sigma.transpose();  // n_h x |sigma|

  // Y = R_Sigma^H N_Sigma streams rows of N_Sigma, then V = Y R_Sigma row by row
  RowMatrixXc y(nh, static_cast<Eigen::Index>(s));
  simd::kernels().csrmm(view(rt), true, s, n_sigma.data(), s, y.data(), s);
  RowMatrixXc v = RowMatrixXc::Zero(nh, nh);
  const SparseRowC& r = t.r_sigma;
  for (Eigen::Index i = 0; i < nh; ++i) {
    const cplx* yi = y.data() + i * static_cast<Eigen::Index>(s);
    for (Eigen::Index j = 0; j < r.outerSize(); ++j) {
      const cplx a = yi[j];
      for (SparseRowC::InnerIterator it(r, j); it; ++it) v(i, it.col()) += a * it.value();
    }
  }

  if (counters) {
    const long long nnz = t.r_sigma.nonZeros();
    counters->spmm_ops += nnz * static_cast<long long>(s + nh);
    counters->nnz_r = t.r.nonZeros();
    counters->sigma_size = static_cast<long long>(s);
    counters->seconds_spmm += seconds_since(t0);
  }
  return MatrixXc(v);
}

MatrixXc assemble_single_layer(const NewtonFactorization& fact, const TransferMatrix& t, AssemblyPath path,
                               AssemblyCounters* counters) {
  if (path == AssemblyPath::RestrictedSubmatrix) {
    const RowMatrixXc n_sigma = restricted_inverse(fact, t.sigma, counters);
    return single_layer_from_restricted(n_sigma, t, counters);
  }
  const auto t0 = Clock::now();
  const Eigen::Index n = fact.size(), nh = t.r.cols();
  const Eigen::Index s = static_cast<Eigen::Index>(t.sigma.size());
  const SparseColC rc = t.r;  // column access
  MatrixXc v(nh, nh);
  RowMatrixXc x_sigma(s, nh);
  for (Eigen::Index c0 = 0; c0 < nh; c0 += kSolveChunk) {
    const Eigen::Index w = std::min(kSolveChunk, nh - c0);
    RowMatrixXc block = RowMatrixXc::Zero(n, w);
    for (Eigen::Index c = 0; c < w; ++c) {
      for (SparseColC::InnerIterator it(rc, c0 + c); it; ++it) block(it.row(), c) = it.value();
    }
    fact.solve_in_place(block.data(), static_cast<std::size_t>(w), static_cast<std::size_t>(w));
    for (Eigen::Index i = 0; i < s; ++i) x_sigma.block(i, c0, 1, w) = block.row(t.sigma[i]);
  }
  const double solve_seconds = seconds_since(t0);
  const auto t1 = Clock::now();
  RowMatrixXc vr(nh, nh);
  const SparseRowC rt = t.r_sigma.transpose();
  simd::kernels().csrmm(view(rt), true, static_cast<std::size_t>(nh), x_sigma.data(), static_cast<std::size_t>(nh),
                        vr.data(), static_cast<std::size_t>(nh));
  v = vr;
  if (counters) {
    counters->volume_solves += nh;
    counters->sigma_size = s;
    counters->nnz_r = t.r.nonZeros();
    counters->spmm_ops += static_cast<long long>(t.r_sigma.nonZeros()) * nh;
    counters->seconds_solve += solve_seconds;
    counters->seconds_spmm += seconds_since(t1);
  }
  return v;
}

MatrixXc assemble_single_layer(const SurrogateInverse& inv, const TransferMatrix& t, AssemblyCounters* counters) {
  const auto t0 = Clock::now();
  const RowMatrixXc r = RowMatrixXc(Eigen::MatrixXcd(t.r));
  const RowMatrixXc x = inv.solve_block(r);
  const MatrixXc v = t.r.adjoint() * x;
  if (counters) {
    counters->volume_solves += t.r.cols();
    counters->nnz_r = t.r.nonZeros();
    counters->sigma_size = static_cast<long long>(t.sigma.size());
    counters->seconds_solve += seconds_since(t0);
  }
  return v;
}

SingleLayerSolution solve_single_layer(const MatrixXc& v, const VectorXc& rhs) {
  SingleLayerSolution out;
  const double rn = rhs.norm();
  if (rn == 0.0) {
    out.z = VectorXc::Zero(rhs.size());
    out.condition_estimate = 0.0;
    return out;
  }
  Eigen::PartialPivLU<MatrixXc> lu(v);
  out.z = lu.solve(rhs);
  out.z += lu.solve(rhs - v * out.z);
  out.relative_residual = (rhs - v * out.z).norm() / rn;
  const double rc = lu.rcond();
  out.condition_estimate = rc > 0.0 ? 1.0 / rc : std::numeric_limits<double>::infinity();
  out.ill_conditioned = out.condition_estimate > 1e12;
  return out;
}

double coercivity_proxy(const MatrixXc& v) {
  if (v.rows() == 0) return 0.0;
  const MatrixXc h = 0.5 * (v + v.adjoint());
  Eigen::SelfAdjointEigenSolver<MatrixXc> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace kfbem
