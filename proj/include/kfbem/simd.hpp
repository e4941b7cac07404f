#pragma once

#include <cstddef>
#include <optional>
#include <string_view>

#include "kfbem/types.hpp"

namespace kfbem::simd {

enum class Isa { Scalar, Avx2 };

std::string_view isa_name(Isa isa);

/// Best instruction set supported by this CPU and build.
Isa detected_isa();

/// Instruction set in use: detected_isa() unless KFBEM_SIMD=scalar is set or
/// force_isa() overrides it.
Isa active_isa();

/// Test hook; std::nullopt restores automatic selection. Forcing an ISA the
/// CPU lacks falls back to scalar.
void force_isa(std::optional<Isa> isa);

/// Compressed sparse row view; values may be read conjugated.
struct CsrView {
  int rows = 0;
  const int* ptr = nullptr;
  const int* idx = nullptr;
  const cplx* val = nullptr;
};

struct Kernels {
  /// y[i] += a * x[i]
  void (*caxpy)(std::size_t n, cplx a, const cplx* x, cplx* y);
  /// sum conj(x[i]) * y[i]
  cplx (*cdotc)(std::size_t n, const cplx* x, const cplx* y);
  /// x[i] *= a
  void (*cscal)(std::size_t n, cplx a, cplx* x);
  /// Y = op(A) X for row-major dense blocks with m columns; op conjugates the
  /// stored values when conj is set.
  void (*csrmm)(const CsrView& a, bool conj, std::size_t m, const cplx* x, std::size_t ldx, cplx* y,
                std::size_t ldy);
};

const Kernels& kernels(Isa isa);
inline const Kernels& kernels() { return kernels(active_isa()); }

namespace scalar {
extern const Kernels table;
}
#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
extern const Kernels table;
}
#endif

/// In-place solve of L X = B, L unit lower triangular with strictly lower
/// entries in `lower` (rows in order).
void unit_lower_solve(const CsrView& lower, std::size_t m, cplx* b, std::size_t ldb);

/// In-place solve of U X = B, U upper triangular with strictly upper entries
/// in `upper` and the diagonal in `diag`.
void upper_solve(const CsrView& upper, const cplx* diag, std::size_t m, cplx* b, std::size_t ldb);

/// In-place solve of L X = B for general lower L (strictly lower part + diag).
void lower_solve(const CsrView& lower, const cplx* diag, std::size_t m, cplx* b, std::size_t ldb);

/// In-place solve of U X = B with unit diagonal.
void unit_upper_solve(const CsrView& upper, std::size_t m, cplx* b, std::size_t ldb);

}  // namespace kfbem::simd
