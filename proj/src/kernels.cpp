#include "iga/kernels.hpp"

#include <atomic>

namespace iga::kernels {

namespace {

Isa detect() {
#if defined(IGA_WITH_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) return Isa::Avx2;
#endif
  return Isa::Scalar;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

}  // namespace

Isa detected_isa() {
  static const Isa isa = detect();
  return isa;
}

Isa active_isa() { return current().load(std::memory_order_relaxed); }

bool set_isa(Isa isa) {
  if (isa == Isa::Avx2 && detected_isa() != Isa::Avx2) {
    current().store(Isa::Scalar);
    return false;
  }
  current().store(isa);
  return true;
}

std::string_view isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

void stiffness(const double* gx, const double* gy, const double* c, int nq, int nb, double* ke) {
#ifdef IGA_WITH_AVX2
  if (active_isa() == Isa::Avx2) return avx2::stiffness(gx, gy, c, nq, nb, ke);
#endif
  scalar::stiffness(gx, gy, c, nq, nb, ke);
}

void mass(const double* n, const double* c, int nq, int nb, double* me) {
#ifdef IGA_WITH_AVX2
  if (active_isa() == Isa::Avx2) return avx2::mass(n, c, nq, nb, me);
#endif
  scalar::mass(n, c, nq, nb, me);
}

void load(const double* n, const double* c, int nq, int nb, double* fe) {
#ifdef IGA_WITH_AVX2
  if (active_isa() == Isa::Avx2) return avx2::load(n, c, nq, nb, fe);
#endif
  scalar::load(n, c, nq, nb, fe);
}

}  // namespace iga::kernels
