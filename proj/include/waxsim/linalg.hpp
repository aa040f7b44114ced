#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace waxsim {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

/// Generator used for every stochastic draw in the library. Always passed
/// explicitly so that trials can run on independent streams.
using Rng = std::mt19937_64;

class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DegenerateMatrix : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace tol {
inline constexpr double kUnitary = 1e-10;
inline constexpr double kRankRelative = 1e-12;
inline constexpr double kChannelRank = 1e-10;
}  // namespace tol

struct SvdResult {
  ComplexMatrix u;  // m x r, orthonormal columns
  RealVector s;     // length r, nonincreasing
  ComplexMatrix v;  // n x r, orthonormal columns
};

struct QrSplit {
  ComplexMatrix u_tilde;  // M x K signal-space basis
  ComplexMatrix n_h;      // M x (M-K) null-space basis
  ComplexMatrix r_tilde;  // K x K upper triangular, positive real diagonal
};

bool all_finite(const ComplexMatrix& m);
void require_finite(const ComplexMatrix& m, const char* what);

/// ||X^H X - I||_max, the deviation of X from having orthonormal columns.
double unitarity_error(const ComplexMatrix& x);

/// Economy SVD (r = min(rows, cols)). Throws InvalidInput on non-finite data.
SvdResult svd(const ComplexMatrix& b);

struct NullVector {
  Eigen::VectorXcd v;  // unit-norm right singular vector
  double sigma_min = 0.0;  // 0 when b has more columns than rows
  double sigma_max = 0.0;
};

/// Right singular vector of the smallest singular value, taken from the full
/// V so that wide matrices yield a null-space vector.
NullVector smallest_right_singular_vector(const ComplexMatrix& b);

/// Solves max Re{tr(U^H B)} over the unitary group. The maximizer is
/// U_B V_B^H and the attained value is the sum of the singular values of B.
/// A zero B yields the identity.
ComplexMatrix procrustes(const ComplexMatrix& b);

/// Re{tr(U^H B)}.
double trace_objective(const ComplexMatrix& u, const ComplexMatrix& b);

/// Unitary factor of W = U P. Throws DegenerateMatrix when W is numerically
/// rank deficient (sigma_min <= 1e-12 sigma_max).
ComplexMatrix polar_factor(const ComplexMatrix& w);

/// Signal/null split of a tall full-column-rank H. The R diagonal is made real
/// positive so that the signal basis is unique; the null basis is the
/// trailing block of the Householder Q, which is deterministic for given bits.
QrSplit qr_split(const ComplexMatrix& h);

/// n x n Haar-distributed unitary (phase-normalized QR of a complex Ginibre
/// matrix).
ComplexMatrix haar_unitary(int n, Rng& rng);

/// First t columns of a Haar unitary of size m.
ComplexMatrix haar_semi_unitary(int m, int t, Rng& rng);

/// Matrix with i.i.d. CN(0, 1) entries.
ComplexMatrix complex_gaussian(int rows, int cols, Rng& rng);

}  // namespace waxsim
