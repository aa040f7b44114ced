// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.

#include "kernels_internal.hpp"

#if WAXSIM_HAVE_AVX2_TU

#include <immintrin.h>

namespace waxsim::kernels::avx2 {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sw = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sw));
}

// Over the interleaved (re, im) view, Re{conj(a) b} summed is a plain real
// dot product of length 2n.
double dot_real(const double* x, const double* y, std::size_t len) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= len; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4),
                           _mm256_loadu_pd(y + i + 4), acc1);
  }
  for (; i + 4 <= len; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < len; ++i) acc += x[i] * y[i];
  return acc;
}

}  // namespace

double real_inner(const std::complex<double>* a, const std::complex<double>* b,
                  std::size_t n) {
  return dot_real(reinterpret_cast<const double*>(a),
                  reinterpret_cast<const double*>(b), 2 * n);
}

double squared_norm(const std::complex<double>* a, std::size_t n) {
  const auto* x = reinterpret_cast<const double*>(a);
  return dot_real(x, x, 2 * n);
}

}  // namespace waxsim::kernels::avx2

#endif
