#include <atomic>
#include <cstdlib>
#include <string>

#include "kfbem/simd.hpp"

namespace kfbem::simd {

namespace {

std::atomic<int> g_forced{-1};

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(_M_X64)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa env_or_detected() {
  static const Isa isa = [] {
    const Isa best = detected_isa();
    if (const char* env = std::getenv("KFBEM_SIMD")) {
      if (std::string(env) == "scalar") return Isa::Scalar;
    }
    return best;
  }();
  return isa;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
  }
  return "unknown";
}

Isa detected_isa() {
  static const Isa isa = cpu_has_avx2() ? Isa::Avx2 : Isa::Scalar;
  return isa;
}

Isa active_isa() {
  const int forced = g_forced.load(std::memory_order_relaxed);
  if (forced >= 0) return static_cast<Isa>(forced);
  return env_or_detected();
}

void force_isa(std::optional<Isa> isa) {
  if (!isa) {
    g_forced.store(-1);
  } else if (*isa == Isa::Avx2 && detected_isa() != Isa::Avx2) {
    g_forced.store(static_cast<int>(Isa::Scalar));
  } else {
    g_forced.store(static_cast<int>(*isa));
  }
}

const Kernels& kernels(Isa isa) {
#if defined(__x86_64__) || defined(_M_X64)
  if (isa == Isa::Avx2 && detected_isa() == Isa::Avx2) return avx2::table;
#endif
  (void)isa;
  return scalar::table;
}

}  // namespace kfbem::simd
