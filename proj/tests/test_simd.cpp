#include <random>
#include <vector>

#include "doctest.h"
#include "kfbem/simd.hpp"

using namespace kfbem;
namespace ks = kfbem::simd;

namespace {

std::vector<cplx> random_values(std::size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<cplx> v(n);
  for (auto& x : v) x = cplx(u(rng), u(rng));
  return v;
}

double max_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

struct RandomCsr {
  int rows = 0;
  std::vector<int> ptr, idx;
  std::vector<cplx> val;
  ks::CsrView view() const { return {rows, ptr.data(), idx.data(), val.data()}; }
};

// strictly lower (lower = true) or strictly upper sparse pattern
RandomCsr random_triangle(int n, bool lower, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> coin(0, 3);
  RandomCsr c;
  c.rows = n;
  c.ptr.push_back(0);
  const auto vals = random_values(static_cast<std::size_t>(n) * n, seed + 1);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if ((lower ? j < i : j > i) && coin(rng) == 0) {
        c.idx.push_back(j);
        c.val.push_back(0.3 * vals[i * n + j]);
      }
    }
    c.ptr.push_back(static_cast<int>(c.idx.size()));
  }
  return c;
}

std::vector<ks::Isa> available_isas() {
  std::vector<ks::Isa> isas{ks::Isa::Scalar};
  if (ks::detected_isa() == ks::Isa::Avx2) isas.push_back(ks::Isa::Avx2);
  return isas;
}

}  // namespace

TEST_CASE("vector kernels agree with the scalar reference for all lengths") {
  const auto& ref = ks::kernels(ks::Isa::Scalar);
  for (ks::Isa isa : available_isas()) {
    CAPTURE(ks::isa_name(isa));
    const auto& k = ks::kernels(isa);
    for (std::size_t n : {0u, 1u, 2u, 3u, 4u, 5u, 7u, 8u, 17u, 64u, 1001u}) {
      const auto x = random_values(n, 1), y0 = random_values(n, 2);
      const cplx a(0.7, -1.3);

      auto y1 = y0, y2 = y0;
      ref.caxpy(n, a, x.data(), y1.data());
      k.caxpy(n, a, x.data(), y2.data());
      CHECK(max_diff(y1, y2) < 1e-14);

      const cplx d1 = ref.cdotc(n, x.data(), y0.data()), d2 = k.cdotc(n, x.data(), y0.data());
      CHECK(std::abs(d1 - d2) < 1e-12 * (1.0 + n));

      auto s1 = y0, s2 = y0;
      ref.cscal(n, a, s1.data());
      k.cscal(n, a, s2.data());
      CHECK(max_diff(s1, s2) < 1e-14);
    }
  }
}

TEST_CASE("scalar kernels match a direct loop") {
  const auto& k = ks::kernels(ks::Isa::Scalar);
  const auto x = random_values(9, 3), y = random_values(9, 4);
  cplx dot = 0.0;
  for (int i = 0; i < 9; ++i) dot += std::conj(x[i]) * y[i];
  CHECK(std::abs(k.cdotc(9, x.data(), y.data()) - dot) < 1e-14);
}

TEST_CASE("sparse-dense product agrees across instruction sets") {
  const RandomCsr a = [] {
    RandomCsr c = random_triangle(30, true, 7);
    const RandomCsr u = random_triangle(30, false, 8);
    // merge into a general sparse matrix
    RandomCsr g;
    g.rows = 30;
    g.ptr.push_back(0);
    for (int i = 0; i < 30; ++i) {
      for (int p = c.ptr[i]; p < c.ptr[i + 1]; ++p) g.idx.push_back(c.idx[p]), g.val.push_back(c.val[p]);
      for (int p = u.ptr[i]; p < u.ptr[i + 1]; ++p) g.idx.push_back(u.idx[p]), g.val.push_back(u.val[p]);
      g.ptr.push_back(static_cast<int>(g.idx.size()));
    }
    return g;
  }();
  for (std::size_t m : {1u, 2u, 3u, 5u, 8u}) {
    const std::size_t ldx = m + 1, ldy = m + 2;
    const auto x = random_values(30 * ldx, 11);
    for (bool conj : {false, true}) {
      std::vector<cplx> direct(30 * ldy, cplx(0.0));
      for (int i = 0; i < 30; ++i)
        for (int p = a.ptr[i]; p < a.ptr[i + 1]; ++p)
          for (std::size_t c = 0; c < m; ++c)
            direct[i * ldy + c] += (conj ? std::conj(a.val[p]) : a.val[p]) * x[a.idx[p] * ldx + c];
      for (ks::Isa isa : available_isas()) {
        CAPTURE(ks::isa_name(isa));
        std::vector<cplx> y(30 * ldy, cplx(0.0));
        ks::kernels(isa).csrmm(a.view(), conj, m, x.data(), ldx, y.data(), ldy);
        for (int i = 0; i < 30; ++i)
          for (std::size_t c = 0; c < m; ++c) CHECK(std::abs(y[i * ldy + c] - direct[i * ldy + c]) < 1e-13);
      }
    }
  }
}

TEST_CASE("triangular solves invert their matrices on both code paths") {
  const int n = 25;
  const std::size_t m = 3;
  const RandomCsr lower = random_triangle(n, true, 21);
  const RandomCsr upper = random_triangle(n, false, 22);
  auto diag = random_values(n, 23);
  for (auto& d : diag) d += cplx(2.0, 0.0);
  const auto x = random_values(n * m, 24);

  auto apply = [&](const RandomCsr& t, const cplx* dg) {
    std::vector<cplx> b(n * m);
    for (int i = 0; i < n; ++i)
      for (std::size_t c = 0; c < m; ++c) {
        cplx s = dg ? dg[i] * x[i * m + c] : x[i * m + c];
        for (int p = t.ptr[i]; p < t.ptr[i + 1]; ++p) s += t.val[p] * x[t.idx[p] * m + c];
        b[i * m + c] = s;
      }
    return b;
  };

  const ks::Isa initial = ks::active_isa();
  for (ks::Isa isa : available_isas()) {
    CAPTURE(ks::isa_name(isa));
    ks::force_isa(isa);
    CHECK(ks::active_isa() == isa);
    auto b = apply(lower, nullptr);
    ks::unit_lower_solve(lower.view(), m, b.data(), m);
    CHECK(max_diff(b, x) < 1e-12);
    b = apply(upper, diag.data());
    ks::upper_solve(upper.view(), diag.data(), m, b.data(), m);
    CHECK(max_diff(b, x) < 1e-12);
    b = apply(lower, diag.data());
    ks::lower_solve(lower.view(), diag.data(), m, b.data(), m);
    CHECK(max_diff(b, x) < 1e-12);
    b = apply(upper, nullptr);
    ks::unit_upper_solve(upper.view(), m, b.data(), m);
    CHECK(max_diff(b, x) < 1e-12);
  }
  ks::force_isa(std::nullopt);
  CHECK(ks::active_isa() == initial);
}
