#include "kfbem/factorization.hpp"

#include <umfpack.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "kfbem/error.hpp"
#include "kfbem/hash.hpp"
#include "kfbem/simd.hpp"

namespace kfbem {

namespace {

constexpr double kPivotRatioFloor = 1e-13;
constexpr std::size_t kChunk = 32;

void conj_transpose(int n, const std::vector<int>& ptr, const std::vector<int>& idx,
                    const std::vector<cplx>& val, std::vector<int>& tptr, std::vector<int>& tidx,
                    std::vector<cplx>& tval) {
  tptr.assign(n + 1, 0);
  for (int j : idx) ++tptr[j + 1];
  for (int i = 0; i < n; ++i) tptr[i + 1] += tptr[i];
  tidx.resize(idx.size());
  tval.resize(val.size());
  std::vector<int> next(tptr.begin(), tptr.end() - 1);
  for (int i = 0; i < n; ++i) {
    for (int p = ptr[i]; p < ptr[i + 1]; ++p) {
      const int q = next[idx[p]]++;
      tidx[q] = i;
      tval[q] = std::conj(val[p]);
    }
  }
}

struct UmfNumeric {
  void* symbolic = nullptr;
  void* numeric = nullptr;
  ~UmfNumeric() {
    if (numeric) umfpack_zi_free_numeric(&numeric);
    if (symbolic) umfpack_zi_free_symbolic(&symbolic);
  }
};

// Binary stream helpers with a running checksum.
class Writer {
 public:
  explicit Writer(std::ofstream& out) : out_(out) {}
  void raw(const void* p, std::size_t n) {
    out_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
    hash_.update(p, n);
  }
  template <class T>
  void value(const T& v) {
    raw(&v, sizeof(T));
  }
  template <class T>
  void vec(const std::vector<T>& v) {
    const std::uint64_t n = v.size();
    value(n);
    if (n) raw(v.data(), n * sizeof(T));
  }
  std::uint64_t digest() const { return hash_.digest(); }

 private:
  std::ofstream& out_;
  Fnv1a hash_;
};

class Reader {
 public:
  Reader(const char* data, std::size_t size) : data_(data), size_(size) {}
  void raw(void* p, std::size_t n) {
    if (pos_ + n > size_) throw Error(ErrorCode::CacheCorrupt, "factorization file truncated");
    std::memcpy(p, data_ + pos_, n);
    pos_ += n;
  }
  template <class T>
  T value() {
    T v;
    raw(&v, sizeof(T));
    return v;
  }
  template <class T>
  std::vector<T> vec(std::uint64_t limit) {
    const auto n = value<std::uint64_t>();
    if (n > limit) throw Error(ErrorCode::CacheCorrupt, "factorization file has an implausible array size");
    std::vector<T> v(n);
    if (n) raw(v.data(), n * sizeof(T));
    return v;
  }

 private:
  const char* data_;
  std::size_t size_;
  std::size_t pos_ = 0;
};

}  // namespace

NewtonFactorization NewtonFactorization::factorize(const SparseRowC& a) {
  if (a.rows() != a.cols()) throw Error(ErrorCode::SingularMatrix, "matrix is not square");
  const auto start = std::chrono::steady_clock::now();
  NewtonFactorization f;
  const int n = static_cast<int>(a.rows());
  f.n_ = n;
  f.stats_.n = n;
  f.stats_.nnz_matrix = a.nonZeros();
  if (n == 0) {
    f.l_ptr_.assign(1, 0);
    f.u_ptr_.assign(1, 0);
    f.build_adjoint_factors();
    f.stats_.pivot_ratio = 1.0;
    return f;
  }

  SparseColC csc(a);
  csc.makeCompressed();
  const int* ap = csc.outerIndexPtr();
  const int* ai = csc.innerIndexPtr();
  const double* ax = reinterpret_cast<const double*>(csc.valuePtr());

  double control[UMFPACK_CONTROL];
  double info[UMFPACK_INFO];
  umfpack_zi_defaults(control);
  UmfNumeric h;
  int status = umfpack_zi_symbolic(n, n, ap, ai, ax, nullptr, &h.symbolic, control, info);
  if (status != UMFPACK_OK) {
    throw Error(ErrorCode::SingularMatrix, "symbolic analysis failed (status " + std::to_string(status) + ")");
  }
  status = umfpack_zi_numeric(ap, ai, ax, nullptr, h.symbolic, &h.numeric, control, info);
  if (status == UMFPACK_WARNING_singular_matrix) {
    throw Error(ErrorCode::SingularMatrix, "zero pivot encountered");
  }
  if (status != UMFPACK_OK) {
    throw Error(ErrorCode::SingularMatrix, "numeric factorization failed (status " + std::to_string(status) + ")");
  }

  int lnz = 0, unz = 0, n_row = 0, n_col = 0, nz_udiag = 0;
  umfpack_zi_get_lunz(&lnz, &unz, &n_row, &n_col, &nz_udiag, h.numeric);
  std::vector<int> lp(n + 1), lj(lnz), up(n + 1), ui(unz), p(n), q(n);
  std::vector<cplx> lx(lnz), ux(unz);
  std::vector<double> rs(n);
  int do_recip = 0;
  status = umfpack_zi_get_numeric(lp.data(), lj.data(), reinterpret_cast<double*>(lx.data()), nullptr,
                                  up.data(), ui.data(), reinterpret_cast<double*>(ux.data()), nullptr,
                                  p.data(), q.data(), nullptr, nullptr, &do_recip, rs.data(), h.numeric);
  if (status != UMFPACK_OK) throw Error(ErrorCode::SingularMatrix, "could not extract LU factors");

  f.p_ = std::move(p);
  f.q_ = std::move(q);
  f.row_scale_.resize(n);
  for (int i = 0; i < n; ++i) f.row_scale_[i] = do_recip ? rs[i] : 1.0 / rs[i];

  // L rows: diagonal (one) is the last entry of each row
  f.l_ptr_.assign(n + 1, 0);
  for (int i = 0; i < n; ++i) {
    for (int k = lp[i]; k < lp[i + 1]; ++k) {
      if (lj[k] != i) {
        f.l_idx_.push_back(lj[k]);
        f.l_val_.push_back(lx[k]);
      }
    }
    f.l_ptr_[i + 1] = static_cast<int>(f.l_idx_.size());
  }

  // U columns -> rows
  f.u_diag_.assign(n, 0.0);
  std::vector<int> col_ptr(n + 1, 0), col_idx;
  std::vector<cplx> col_val;
  for (int j = 0; j < n; ++j) {
    for (int k = up[j]; k < up[j + 1]; ++k) {
      if (ui[k] == j) {
        f.u_diag_[j] = ux[k];
      } else {
        col_idx.push_back(ui[k]);
        col_val.push_back(ux[k]);
      }
    }
    col_ptr[j + 1] = static_cast<int>(col_idx.size());
  }
  // U^H in rows equals U in columns, conjugated
  f.uh_ptr_ = col_ptr;
  f.uh_idx_ = col_idx;
  f.uh_val_.resize(col_val.size());
  for (std::size_t k = 0; k < col_val.size(); ++k) f.uh_val_[k] = std::conj(col_val[k]);
  conj_transpose(n, f.uh_ptr_, f.uh_idx_, f.uh_val_, f.u_ptr_, f.u_idx_, f.u_val_);

  double dmin = std::numeric_limits<double>::infinity(), dmax = 0.0;
  for (const auto& d : f.u_diag_) {
    dmin = std::min(dmin, std::abs(d));
    dmax = std::max(dmax, std::abs(d));
  }
  f.stats_.pivot_ratio = dmax > 0.0 ? dmin / dmax : 0.0;
  if (!(f.stats_.pivot_ratio > kPivotRatioFloor)) {
    throw Error(ErrorCode::SingularMatrix,
                "pivot ratio " + std::to_string(f.stats_.pivot_ratio) + " below " + std::to_string(kPivotRatioFloor));
  }
  f.build_adjoint_factors();
  f.stats_.nnz_l = static_cast<std::int64_t>(f.l_idx_.size()) + n;
  f.stats_.nnz_u = static_cast<std::int64_t>(f.u_idx_.size()) + n;
  f.stats_.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return f;
}

void NewtonFactorization::build_adjoint_factors() {
  uh_diag_.resize(u_diag_.size());
  for (std::size_t i = 0; i < u_diag_.size(); ++i) uh_diag_[i] = std::conj(u_diag_[i]);
  if (uh_ptr_.size() != static_cast<std::size_t>(n_ + 1)) {
    conj_transpose(n_, u_ptr_, u_idx_, u_val_, uh_ptr_, uh_idx_, uh_val_);
  }
  conj_transpose(n_, l_ptr_, l_idx_, l_val_, lh_ptr_, lh_idx_, lh_val_);
}

void NewtonFactorization::apply(cplx* block, std::size_t m, std::size_t ld, bool adjoint) const {
  if (n_ == 0 || m == 0) return;
  const std::size_t n = static_cast<std::size_t>(n_);
  std::vector<cplx> work(n * std::min(m, kChunk));
  const simd::CsrView l{n_, l_ptr_.data(), l_idx_.data(), l_val_.data()};
  const simd::CsrView u{n_, u_ptr_.data(), u_idx_.data(), u_val_.data()};
  const simd::CsrView lh{n_, lh_ptr_.data(), lh_idx_.data(), lh_val_.data()};
  const simd::CsrView uh{n_, uh_ptr_.data(), uh_idx_.data(), uh_val_.data()};
  for (std::size_t c0 = 0; c0 < m; c0 += kChunk) {
    const std::size_t w = std::min(kChunk, m - c0);
    if (!adjoint) {
      for (std::size_t k = 0; k < n; ++k) {
        const std::size_t src = static_cast<std::size_t>(p_[k]);
        const double s = row_scale_[src];
        for (std::size_t c = 0; c < w; ++c) work[k * w + c] = s * block[src * ld + c0 + c];
      }
      simd::unit_lower_solve(l, w, work.data(), w);
      simd::upper_solve(u, u_diag_.data(), w, work.data(), w);
      for (std::size_t k = 0; k < n; ++k) {
        const std::size_t dst = static_cast<std::size_t>(q_[k]);
        for (std::size_t c = 0; c < w; ++c) block[dst * ld + c0 + c] = work[k * w + c];
      }
    } else {
      for (std::size_t k = 0; k < n; ++k) {
        const std::size_t src = static_cast<std::size_t>(q_[k]);
        for (std::size_t c = 0; c < w; ++c) work[k * w + c] = block[src * ld + c0 + c];
      }
      simd::lower_solve(uh, uh_diag_.data(), w, work.data(), w);
      simd::unit_upper_solve(lh, w, work.data(), w);
      for (std::size_t k = 0; k < n; ++k) {
        const std::size_t dst = static_cast<std::size_t>(p_[k]);
        const double s = row_scale_[dst];
        for (std::size_t c = 0; c < w; ++c) block[dst * ld + c0 + c] = s * work[k * w + c];
      }
    }
  }
}

void NewtonFactorization::solve_in_place(cplx* block, std::size_t m, std::size_t ld) const {
  apply(block, m, ld, false);
}

void NewtonFactorization::solve_adjoint_in_place(cplx* block, std::size_t m, std::size_t ld) const {
  apply(block, m, ld, true);
}

RowMatrixXc NewtonFactorization::solve_block(const RowMatrixXc& rhs) const {
  RowMatrixXc x = rhs;
  apply(x.data(), static_cast<std::size_t>(x.cols()), static_cast<std::size_t>(x.cols()), false);
  return x;
}

VectorXc NewtonFactorization::solve(const VectorXc& rhs) const {
  VectorXc x = rhs;
  apply(x.data(), 1, 1, false);
  return x;
}

VectorXc NewtonFactorization::solve_adjoint(const VectorXc& rhs) const {
  VectorXc x = rhs;
  apply(x.data(), 1, 1, true);
  return x;
}

void NewtonFactorization::save(const std::string& path, std::uint64_t mesh_hash) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  Writer w(out);
  w.raw("KFBM", 4);
  w.value(kFormatVersion);
  w.value(static_cast<std::uint64_t>(n_));
  w.value(mesh_hash);
  w.vec(p_);
  w.vec(q_);
  w.vec(row_scale_);
  w.vec(l_ptr_);
  w.vec(l_idx_);
  w.vec(l_val_);
  w.vec(u_ptr_);
  w.vec(u_idx_);
  w.vec(u_val_);
  w.vec(u_diag_);
  w.value(stats_);
  const std::uint64_t sum = w.digest();
  out.write(reinterpret_cast<const char*>(&sum), sizeof(sum));
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path);
}

NewtonFactorization NewtonFactorization::load(const std::string& path, std::uint64_t mesh_hash, int expected_n) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path);
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() < 4 + 4 + 8 + 8 + 8 || std::memcmp(bytes.data(), "KFBM", 4) != 0) {
    throw Error(ErrorCode::CacheCorrupt, path + " is not a factorization file");
  }
  const std::size_t body = bytes.size() - sizeof(std::uint64_t);
  std::uint64_t stored = 0;
  std::memcpy(&stored, bytes.data() + body, sizeof(stored));
  if (fnv1a(bytes.data(), body) != stored) throw Error(ErrorCode::CacheCorrupt, "checksum mismatch in " + path);

  Reader r(bytes.data() + 4, body - 4);
  if (r.value<std::uint32_t>() != kFormatVersion) throw Error(ErrorCode::CacheCorrupt, "unsupported version");
  const auto n = r.value<std::uint64_t>();
  const auto hash = r.value<std::uint64_t>();
  if (static_cast<std::int64_t>(n) != expected_n || hash != mesh_hash) {
    throw Error(ErrorCode::CacheMismatch, "factorization in " + path + " belongs to a different mesh");
  }
  const std::uint64_t limit = bytes.size();
  NewtonFactorization f;
  f.n_ = static_cast<int>(n);
  f.p_ = r.vec<int>(limit);
  f.q_ = r.vec<int>(limit);
  f.row_scale_ = r.vec<double>(limit);
  f.l_ptr_ = r.vec<int>(limit);
  f.l_idx_ = r.vec<int>(limit);
  f.l_val_ = r.vec<cplx>(limit);
  f.u_ptr_ = r.vec<int>(limit);
  f.u_idx_ = r.vec<int>(limit);
  f.u_val_ = r.vec<cplx>(limit);
  f.u_diag_ = r.vec<cplx>(limit);
  f.stats_ = r.value<FactorizationStats>();
  const std::size_t nn = static_cast<std::size_t>(n);
  auto bad_csr = [&](const std::vector<int>& ptr, const std::vector<int>& idx, std::size_t nval) {
    if (ptr.size() != nn + 1 || ptr.front() != 0 || static_cast<std::size_t>(ptr.back()) != idx.size() ||
        idx.size() != nval) {
      return true;
    }
    for (std::size_t i = 0; i < nn; ++i) {
      if (ptr[i] > ptr[i + 1]) return true;
    }
    return std::any_of(idx.begin(), idx.end(), [&](int j) { return j < 0 || static_cast<std::size_t>(j) >= nn; });
  };
  auto bad_perm = [&](const std::vector<int>& v) {
    if (v.size() != nn) return true;
    std::vector<char> seen(nn, 0);
    for (int i : v) {
      if (i < 0 || static_cast<std::size_t>(i) >= nn || seen[i]) return true;
      seen[i] = 1;
    }
    return false;
  };
  if (bad_perm(f.p_) || bad_perm(f.q_) || f.row_scale_.size() != nn || f.u_diag_.size() != nn ||
      bad_csr(f.l_ptr_, f.l_idx_, f.l_val_.size()) || bad_csr(f.u_ptr_, f.u_idx_, f.u_val_.size())) {
    throw Error(ErrorCode::CacheCorrupt, "inconsistent factor arrays in " + path);
  }
  f.build_adjoint_factors();
  return f;
}

}  // namespace kfbem
