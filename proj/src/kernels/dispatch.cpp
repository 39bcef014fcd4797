#include "superatom/kernels.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace superatom::kernels {
namespace {

constexpr KernelTable kScalarTable{Isa::scalar, &scalar::matmul, &scalar::matvec, &scalar::wigner};

#ifdef SUPERATOM_WITH_AVX2
constexpr KernelTable kAvx2Table{Isa::avx2, &avx2::matmul, &avx2::matvec, &avx2::wigner};
#endif

bool cpu_has_avx2() {
#if defined(SUPERATOM_WITH_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable& select() {
  const char* env = std::getenv("SUPERATOM_KERNELS");
  const std::string want = env ? env : "auto";
  if (want == "scalar") return kScalarTable;
  if (want == "avx2") return table(Isa::avx2);
  if (want != "auto") throw std::invalid_argument("SUPERATOM_KERNELS must be scalar, avx2 or auto");
  return available(Isa::avx2) ? table(Isa::avx2) : kScalarTable;
}

}  // namespace

bool available(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
      return cpu_has_avx2();
  }
  return false;
}

const KernelTable& table(Isa isa) {
  if (!available(isa)) throw std::invalid_argument("kernel ISA not available: " + std::string(name(isa)));
#ifdef SUPERATOM_WITH_AVX2
  if (isa == Isa::avx2) return kAvx2Table;
#endif
  return kScalarTable;
}

const KernelTable& active() {
  static const KernelTable& chosen = select();
  return chosen;
}

std::string_view name(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
  }
  return "unknown";
}

}  // namespace superatom::kernels
