#include "skyris/simd/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace skyris::simd {
namespace {

Isa detect() {
  if (const char* forced = std::getenv("SKYRIS_ISA")) {
    if (std::string(forced) == "scalar") return Isa::scalar;
  }
  return isa_supported(Isa::avx2) ? Isa::avx2 : Isa::scalar;
}

struct ActiveState {
  std::atomic<Isa> isa;
  std::atomic<const KernelTable*> tab;
  ActiveState() : isa(detect()), tab(&table(isa.load())) {}
};

ActiveState& state() {
  static ActiveState s;
  return s;
}

}  // namespace

std::string_view isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(SKYRIS_HAVE_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& table(Isa isa) {
  if (!isa_supported(isa))
    throw std::invalid_argument("kernel ISA not available: " + std::string(isa_name(isa)));
#if defined(SKYRIS_HAVE_AVX2)
  if (isa == Isa::avx2) return detail::avx2_table;
#endif
  return detail::scalar_table;
}

const KernelTable& active() { return *state().tab.load(std::memory_order_relaxed); }

Isa active_isa() { return state().isa.load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  const KernelTable& t = table(isa);
  state().isa.store(isa, std::memory_order_relaxed);
  state().tab.store(&t, std::memory_order_relaxed);
}

}  // namespace skyris::simd
