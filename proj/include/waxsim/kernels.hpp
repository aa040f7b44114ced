#pragma once

// Data-parallel reductions over interleaved complex buffers.
//
// Each kernel has a portable scalar reference and vectorized variants (AVX2+FMA
// on x86-64, NEON on AArch64). The variant is picked once at first use from
// the running CPU; WAXSIM_SIMD=scalar in the environment forces the reference
// path.

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>

namespace waxsim::kernels {

enum class Isa { kScalar, kAvx2, kNeon };

std::string_view isa_name(Isa isa);

/// Re{sum_i conj(a_i) b_i}. Sizes must match.
using RealInnerFn = double (*)(const std::complex<double>* a,
                               const std::complex<double>* b, std::size_t n);
/// sum_i |a_i|^2.
using SquaredNormFn = double (*)(const std::complex<double>* a, std::size_t n);

struct KernelTable {
  Isa isa;
  RealInnerFn real_inner;
  SquaredNormFn squared_norm;
};

namespace scalar {
double real_inner(const std::complex<double>* a, const std::complex<double>* b,
                  std::size_t n);
double squared_norm(const std::complex<double>* a, std::size_t n);
}  // namespace scalar

/// Table for a specific ISA, or nullptr when this build or CPU lacks it.
const KernelTable* table_for(Isa isa);

/// Table selected for this process.
const KernelTable& active();

double real_inner(std::span<const std::complex<double>> a,
                  std::span<const std::complex<double>> b);
double squared_norm(std::span<const std::complex<double>> a);

}  // namespace waxsim::kernels
