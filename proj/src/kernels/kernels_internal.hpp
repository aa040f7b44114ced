#pragma once

#include "waxsim/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#define WAXSIM_HAVE_AVX2_TU 1
#else
#define WAXSIM_HAVE_AVX2_TU 0
#endif

#if defined(__aarch64__) && defined(__ARM_NEON)
#define WAXSIM_HAVE_NEON_TU 1
#else
#define WAXSIM_HAVE_NEON_TU 0
#endif

namespace waxsim::kernels {

#if WAXSIM_HAVE_AVX2_TU
namespace avx2 {
double real_inner(const std::complex<double>* a, const std::complex<double>* b,
                  std::size_t n);
double squared_norm(const std::complex<double>* a, std::size_t n);
}  // namespace avx2
#endif

#if WAXSIM_HAVE_NEON_TU
namespace neon {
double real_inner(const std::complex<double>* a, const std::complex<double>* b,
                  std::size_t n);
double squared_norm(const std::complex<double>* a, std::size_t n);
}  // namespace neon
#endif

}  // namespace waxsim::kernels
