#include <complex>

#include "kfbem/simd.hpp"

namespace kfbem::simd::scalar {

namespace {

void caxpy(std::size_t n, cplx a, const cplx* x, cplx* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

cplx cdotc(std::size_t n, const cplx* x, const cplx* y) {
  cplx s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::conj(x[i]) * y[i];
  return s;
}

void cscal(std::size_t n, cplx a, cplx* x) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

void csrmm(const CsrView& a, bool conj, std::size_t m, const cplx* x, std::size_t ldx, cplx* y,
           std::size_t ldy) {
  for (int r = 0; r < a.rows; ++r) {
    cplx* yr = y + static_cast<std::size_t>(r) * ldy;
    for (std::size_t c = 0; c < m; ++c) yr[c] = 0.0;
    for (int k = a.ptr[r]; k < a.ptr[r + 1]; ++k) {
      const cplx v = conj ? std::conj(a.val[k]) : a.val[k];
      caxpy(m, v, x + static_cast<std::size_t>(a.idx[k]) * ldx, yr);
    }
  }
}

}  // namespace

const Kernels table{caxpy, cdotc, cscal, csrmm};

}  // namespace kfbem::simd::scalar
