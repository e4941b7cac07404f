#include "kfbem/simd.hpp"

namespace kfbem::simd {

void unit_lower_solve(const CsrView& lower, std::size_t m, cplx* b, std::size_t ldb) {
  const Kernels& k = kernels();
  for (int i = 0; i < lower.rows; ++i) {
    cplx* bi = b + static_cast<std::size_t>(i) * ldb;
    for (int p = lower.ptr[i]; p < lower.ptr[i + 1]; ++p) {
      k.caxpy(m, -lower.val[p], b + static_cast<std::size_t>(lower.idx[p]) * ldb, bi);
    }
  }
}

void lower_solve(const CsrView& lower, const cplx* diag, std::size_t m, cplx* b, std::size_t ldb) {
  const Kernels& k = kernels();
  for (int i = 0; i < lower.rows; ++i) {
    cplx* bi = b + static_cast<std::size_t>(i) * ldb;
    for (int p = lower.ptr[i]; p < lower.ptr[i + 1]; ++p) {
      k.caxpy(m, -lower.val[p], b + static_cast<std::size_t>(lower.idx[p]) * ldb, bi);
    }
    k.cscal(m, 1.0 / diag[i], bi);
  }
}

void upper_solve(const CsrView& upper, const cplx* diag, std::size_t m, cplx* b, std::size_t ldb) {
  const Kernels& k = kernels();
  for (int i = upper.rows - 1; i >= 0; --i) {
    cplx* bi = b + static_cast<std::size_t>(i) * ldb;
    for (int p = upper.ptr[i]; p < upper.ptr[i + 1]; ++p) {
      k.caxpy(m, -upper.val[p], b + static_cast<std::size_t>(upper.idx[p]) * ldb, bi);
    }
    k.cscal(m, 1.0 / diag[i], bi);
  }
}

void unit_upper_solve(const CsrView& upper, std::size_t m, cplx* b, std::size_t ldb) {
  const Kernels& k = kernels();
  for (int i = upper.rows - 1; i >= 0; --i) {
    cplx* bi = b + static_cast<std::size_t>(i) * ldb;
    for (int p = upper.ptr[i]; p < upper.ptr[i + 1]; ++p) {
      k.caxpy(m, -upper.val[p], b + static_cast<std::size_t>(upper.idx[p]) * ldb, bi);
    }
  }
}

}  // namespace kfbem::simd
