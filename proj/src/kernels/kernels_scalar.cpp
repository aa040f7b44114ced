#include "waxsim/kernels.hpp"

namespace waxsim::kernels::scalar {

double real_inner(const std::complex<double>* a, const std::complex<double>* b,
                  std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
  }
  return acc;
}

double squared_norm(const std::complex<double>* a, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += a[i].real() * a[i].real() + a[i].imag() * a[i].imag();
  }
  return acc;
}

}  // namespace waxsim::kernels::scalar
