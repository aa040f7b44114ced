#include "kernels_internal.hpp"

#if WAXSIM_HAVE_NEON_TU

#include <arm_neon.h>

namespace waxsim::kernels::neon {

namespace {

double dot_real(const double* x, const double* y, std::size_t len) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= len; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(x + i), vld1q_f64(y + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(x + i + 2), vld1q_f64(y + i + 2));
  }
  for (; i + 2 <= len; i += 2) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(x + i), vld1q_f64(y + i));
  }
  double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
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

}  // namespace waxsim::kernels::neon

#endif
