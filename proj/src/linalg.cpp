#include "waxsim/linalg.hpp"

#include <cmath>
#include <span>
#include <vector>

#include <lapacke.h>

#include "waxsim/kernels.hpp"

namespace waxsim {

namespace {

std::span<const Complex> flat(const ComplexMatrix& m) {
  return {m.data(), static_cast<std::size_t>(m.size())};
}

void require_square(const ComplexMatrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    throw InvalidInput(std::string(what) + ": matrix must be square, got " +
                       std::to_string(m.rows()) + "x" +
                       std::to_string(m.cols()));
  }
}

// Householder QR with the R diagonal rotated onto the positive real axis.
// Returns the full m x m unitary factor; r receives the leading k x k block.
ComplexMatrix normalized_qr(const ComplexMatrix& z, ComplexMatrix* r_out) {
  const Eigen::Index m = z.rows();
  const Eigen::Index k = z.cols();
  Eigen::HouseholderQR<ComplexMatrix> qr(z);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(m, m);
  ComplexMatrix r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < k; ++j) {
    const double mag = std::abs(r(j, j));
    if (mag == 0.0) continue;
    const Complex phase = r(j, j) / mag;
    q.col(j) *= phase;
    r.row(j) *= std::conj(phase);
    r(j, j) = mag;
  }
  if (r_out != nullptr) *r_out = std::move(r);
  return q;
}

lapack_complex_double* lp(Complex* p) {
  return reinterpret_cast<lapack_complex_double*>(p);
}

// zgesvd on a copy of `b`. jobvt 'S' gives the thin V^H, 'A' the full one.
SvdResult lapack_svd(const ComplexMatrix& b, char jobvt) {
  const lapack_int m = static_cast<lapack_int>(b.rows());
  const lapack_int n = static_cast<lapack_int>(b.cols());
  const lapack_int r = std::min(m, n);
  ComplexMatrix work = b;
  RealVector s(r);
  ComplexMatrix u(m, r);
  const lapack_int vt_rows = jobvt == 'A' ? n : r;
  ComplexMatrix vt(vt_rows, n);
  std::vector<double> superb(static_cast<std::size_t>(std::max<lapack_int>(r, 1)));
  const lapack_int info =
      LAPACKE_zgesvd(LAPACK_COL_MAJOR, 'S', jobvt, m, n, lp(work.data()), m, s.data(),
                     lp(u.data()), m, lp(vt.data()), vt_rows, superb.data());
  if (info != 0) {
    throw DegenerateMatrix("svd: LAPACK zgesvd failed (info=" + std::to_string(info) + ")");
  }
  return {std::move(u), std::move(s), vt.adjoint()};
}

}  // namespace

bool all_finite(const ComplexMatrix& m) {
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    const Complex& z = m.data()[i];
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

void require_finite(const ComplexMatrix& m, const char* what) {
  if (!all_finite(m)) {
    throw InvalidInput(std::string(what) + ": non-finite entry");
  }
}

double unitarity_error(const ComplexMatrix& x) {
  if (x.cols() == 0) return 0.0;
  const ComplexMatrix gram = x.adjoint() * x;
  return (gram - ComplexMatrix::Identity(x.cols(), x.cols()))
      .cwiseAbs()
      .maxCoeff();
}

SvdResult svd(const ComplexMatrix& b) {
  require_finite(b, "svd");
  const Eigen::Index r = std::min(b.rows(), b.cols());
  if (r == 0) {
    return {ComplexMatrix(b.rows(), 0), RealVector(0),
            ComplexMatrix(b.cols(), 0)};
  }
  return lapack_svd(b, 'S');
}

NullVector smallest_right_singular_vector(const ComplexMatrix& b) {
  require_finite(b, "smallest_right_singular_vector");
  if (b.cols() == 0) throw InvalidInput("smallest_right_singular_vector: no columns");
  if (b.rows() == 0) {
    return {Eigen::VectorXcd::Unit(b.cols(), b.cols() - 1), 0.0, 0.0};
  }
  const SvdResult dec = lapack_svd(b, 'A');
  NullVector out;
  out.v = dec.v.col(b.cols() - 1);
  out.sigma_max = dec.s(0);
  out.sigma_min = b.cols() > b.rows() ? 0.0 : dec.s(dec.s.size() - 1);
  return out;
}

ComplexMatrix procrustes(const ComplexMatrix& b) {
  require_square(b, "procrustes");
  const Eigen::Index n = b.rows();
  if (n == 0) return ComplexMatrix(0, 0);
  if (b.cwiseAbs().maxCoeff() == 0.0) return ComplexMatrix::Identity(n, n);
  const SvdResult dec = svd(b);
  return dec.u * dec.v.adjoint();
}

double trace_objective(const ComplexMatrix& u, const ComplexMatrix& b) {
  if (u.rows() != b.rows() || u.cols() != b.cols()) {
    throw InvalidInput("trace_objective: shape mismatch");
  }
  return kernels::real_inner(flat(u), flat(b));
}

ComplexMatrix polar_factor(const ComplexMatrix& w) {
  require_square(w, "polar_factor");
  if (w.rows() == 0) return ComplexMatrix(0, 0);
  const SvdResult dec = svd(w);
  const double smax = dec.s(0);
  const double smin = dec.s(dec.s.size() - 1);
  if (!(smax > 0.0) || smin <= tol::kRankRelative * smax) {
    throw DegenerateMatrix("polar_factor: rank-deficient input (sigma_min/sigma_max = " +
                           std::to_string(smax > 0.0 ? smin / smax : 0.0) + ")");
  }
  return dec.u * dec.v.adjoint();
}

QrSplit qr_split(const ComplexMatrix& h) {
  require_finite(h, "qr_split");
  const Eigen::Index m = h.rows();
  const Eigen::Index k = h.cols();
  if (k == 0 || m < k) {
    throw InvalidInput("qr_split: need M >= K >= 1, got " + std::to_string(m) +
                       "x" + std::to_string(k));
  }
  const RealVector s = svd(h).s;
  if (!(s(0) > 0.0) || s(k - 1) <= tol::kChannelRank * s(0)) {
    throw DegenerateMatrix("qr_split: channel is not full column rank");
  }
  ComplexMatrix r;
  ComplexMatrix q = normalized_qr(h, &r);
  return {q.leftCols(k), q.rightCols(m - k), std::move(r)};
}

ComplexMatrix complex_gaussian(int rows, int cols, Rng& rng) {
  // CN(0,1): real and imaginary parts each N(0, 1/2).
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  ComplexMatrix z(rows, cols);
  for (Eigen::Index j = 0; j < z.cols(); ++j) {
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      z(i, j) = Complex(re, im);
    }
  }
  return z;
}

ComplexMatrix haar_unitary(int n, Rng& rng) {
  if (n < 1) throw InvalidInput("haar_unitary: n must be >= 1");
  return normalized_qr(complex_gaussian(n, n, rng), nullptr);
}

ComplexMatrix haar_semi_unitary(int m, int t, Rng& rng) {
  if (t < 0 || t > m) {
    throw InvalidInput("haar_semi_unitary: need 0 <= t <= m, got m=" +
                       std::to_string(m) + " t=" + std::to_string(t));
  }
  return haar_unitary(m, rng).leftCols(t);
}

}  // namespace waxsim
