#include <cstdlib>
#include <stdexcept>
#include <string>

#include "kernels_internal.hpp"

namespace waxsim::kernels {

namespace {

constexpr KernelTable kScalarTable{Isa::kScalar, &scalar::real_inner,
                                   &scalar::squared_norm};

#if WAXSIM_HAVE_AVX2_TU
constexpr KernelTable kAvx2Table{Isa::kAvx2, &avx2::real_inner,
                                 &avx2::squared_norm};

bool cpu_has_avx2() {
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}
#endif

#if WAXSIM_HAVE_NEON_TU
// NEON is architecturally mandatory on AArch64.
constexpr KernelTable kNeonTable{Isa::kNeon, &neon::real_inner,
                                 &neon::squared_norm};
#endif

const KernelTable& select() {
  if (const char* env = std::getenv("WAXSIM_SIMD")) {
    if (std::string(env) == "scalar") return kScalarTable;
  }
#if WAXSIM_HAVE_AVX2_TU
  if (cpu_has_avx2()) return kAvx2Table;
#endif
#if WAXSIM_HAVE_NEON_TU
  return kNeonTable;
#endif
  return kScalarTable;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
    case Isa::kNeon:
      return "neon";
  }
  return "unknown";
}

const KernelTable* table_for(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return &kScalarTable;
    case Isa::kAvx2:
#if WAXSIM_HAVE_AVX2_TU
      if (cpu_has_avx2()) return &kAvx2Table;
#endif
      return nullptr;
    case Isa::kNeon:
#if WAXSIM_HAVE_NEON_TU
      return &kNeonTable;
#endif
      return nullptr;
  }
  return nullptr;
}

const KernelTable& active() {
  static const KernelTable& table = select();
  return table;
}

double real_inner(std::span<const std::complex<double>> a,
                  std::span<const std::complex<double>> b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("real_inner: size mismatch");
  }
  return active().real_inner(a.data(), b.data(), a.size());
}

double squared_norm(std::span<const std::complex<double>> a) {
  return active().squared_norm(a.data(), a.size());
}

}  // namespace waxsim::kernels
