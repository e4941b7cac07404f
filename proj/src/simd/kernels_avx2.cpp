#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <complex>

#include "kfbem/simd.hpp"

namespace kfbem::simd::avx2 {

namespace {

// Two complex numbers per register: [re0, im0, re1, im1].
inline __m256d cmul_bcast(__m256d ar, __m256d ai, __m256d x) {
  const __m256d xs = _mm256_permute_pd(x, 0b0101);
  return _mm256_fmaddsub_pd(ar, x, _mm256_mul_pd(ai, xs));
}

inline void axpy_inline(std::size_t n, cplx a, const cplx* x, cplx* y) {
  const __m256d ar = _mm256_set1_pd(a.real());
  const __m256d ai = _mm256_set1_pd(a.imag());
  const double* xp = reinterpret_cast<const double*>(x);
  double* yp = reinterpret_cast<double*>(y);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d x0 = _mm256_loadu_pd(xp + 2 * i);
    const __m256d x1 = _mm256_loadu_pd(xp + 2 * i + 4);
    const __m256d y0 = _mm256_loadu_pd(yp + 2 * i);
    const __m256d y1 = _mm256_loadu_pd(yp + 2 * i + 4);
    _mm256_storeu_pd(yp + 2 * i, _mm256_add_pd(y0, cmul_bcast(ar, ai, x0)));
    _mm256_storeu_pd(yp + 2 * i + 4, _mm256_add_pd(y1, cmul_bcast(ar, ai, x1)));
  }
  for (; i + 2 <= n; i += 2) {
    const __m256d x0 = _mm256_loadu_pd(xp + 2 * i);
    const __m256d y0 = _mm256_loadu_pd(yp + 2 * i);
    _mm256_storeu_pd(yp + 2 * i, _mm256_add_pd(y0, cmul_bcast(ar, ai, x0)));
  }
  for (; i < n; ++i) {
    const double xr = xp[2 * i], xi = xp[2 * i + 1];
    yp[2 * i] += a.real() * xr - a.imag() * xi;
    yp[2 * i + 1] += a.real() * xi + a.imag() * xr;
  }
}

void caxpy(std::size_t n, cplx a, const cplx* x, cplx* y) { axpy_inline(n, a, x, y); }

cplx cdotc(std::size_t n, const cplx* x, const cplx* y) {
  const double* xp = reinterpret_cast<const double*>(x);
  const double* yp = reinterpret_cast<const double*>(y);
  __m256d re = _mm256_setzero_pd();  // x.re*y.re, x.im*y.im
  __m256d im = _mm256_setzero_pd();  // x.im*y.re, x.re*y.im
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d xv = _mm256_loadu_pd(xp + 2 * i);
    const __m256d yv = _mm256_loadu_pd(yp + 2 * i);
    re = _mm256_fmadd_pd(xv, yv, re);
    im = _mm256_fmadd_pd(_mm256_permute_pd(xv, 0b0101), yv, im);
  }
  alignas(32) double r[4], m[4];
  _mm256_store_pd(r, re);
  _mm256_store_pd(m, im);
  double sr = (r[0] + r[1]) + (r[2] + r[3]);
  double si = (m[1] - m[0]) + (m[3] - m[2]);
  for (; i < n; ++i) {
    sr += xp[2 * i] * yp[2 * i] + xp[2 * i + 1] * yp[2 * i + 1];
    si += xp[2 * i] * yp[2 * i + 1] - xp[2 * i + 1] * yp[2 * i];
  }
  return {sr, si};
}

void cscal(std::size_t n, cplx a, cplx* x) {
  const __m256d ar = _mm256_set1_pd(a.real());
  const __m256d ai = _mm256_set1_pd(a.imag());
  double* xp = reinterpret_cast<double*>(x);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    _mm256_storeu_pd(xp + 2 * i, cmul_bcast(ar, ai, _mm256_loadu_pd(xp + 2 * i)));
  }
  for (; i < n; ++i) x[i] *= a;
}

void csrmm(const CsrView& a, bool conj, std::size_t m, const cplx* x, std::size_t ldx, cplx* y,
           std::size_t ldy) {
  for (int r = 0; r < a.rows; ++r) {
    cplx* yr = y + static_cast<std::size_t>(r) * ldy;
    double* yp = reinterpret_cast<double*>(yr);
    std::size_t c = 0;
    for (; c + 2 <= m; c += 2) _mm256_storeu_pd(yp + 2 * c, _mm256_setzero_pd());
    for (; c < m; ++c) yr[c] = 0.0;
    for (int k = a.ptr[r]; k < a.ptr[r + 1]; ++k) {
      const cplx v = conj ? std::conj(a.val[k]) : a.val[k];
      axpy_inline(m, v, x + static_cast<std::size_t>(a.idx[k]) * ldx, yr);
    }
  }
}

}  // namespace

const Kernels table{caxpy, cdotc, cscal, csrmm};

}  // namespace kfbem::simd::avx2

#endif
