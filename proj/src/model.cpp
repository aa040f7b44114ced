#include "waxsim/model.hpp"

#include <cmath>
#include <string>

namespace waxsim {

namespace {

// log2 det(I + snr C^H C) through a Cholesky factor; the argument is always
// Hermitian positive definite.
double log2_det_identity_plus(const ComplexMatrix& c, double snr) {
  const Eigen::Index n = c.cols();
  if (n == 0) return 0.0;
  ComplexMatrix gram = ComplexMatrix::Identity(n, n);
  gram.noalias() += snr * (c.adjoint() * c);
  Eigen::LLT<ComplexMatrix> llt(gram);
  if (llt.info() != Eigen::Success) {
    throw DegenerateMatrix("log-det: Gram matrix not positive definite");
  }
  double acc = 0.0;
  const ComplexMatrix& l = llt.matrixLLT();
  for (Eigen::Index i = 0; i < n; ++i) acc += std::log2(l(i, i).real());
  return 2.0 * acc;
}

}  // namespace

void SystemConfig::validate() const {
  const auto fail = [&](const std::string& why) {
    throw InvalidInput("SystemConfig(M=" + std::to_string(m) + ", K=" +
                       std::to_string(k) + ", L=" + std::to_string(l) +
                       ", T=" + std::to_string(t) + "): " + why);
  };
  if (l < 1) fail("L must be >= 1");
  if (l > k) fail("L must be <= K");
  if (k > t) fail("K must be <= T");
  if (t > m) fail("T must be <= M");
  if (m % l != 0) fail("L must divide M");
  if (!(snr > 0.0) || !std::isfinite(snr)) fail("snr must be positive");
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

ChannelMatrix::ChannelMatrix(ComplexMatrix h)
    : h_(std::move(h)), qr_(qr_split(h_)) {}

ChannelMatrix sample_channel(const SystemConfig& cfg, Rng& rng) {
  cfg.validate();
  for (;;) {
    try {
      return ChannelMatrix(complex_gaussian(cfg.m, cfg.k, rng));
    } catch (const DegenerateMatrix&) {
      // redraw
    }
  }
}

double mutual_information_full(const ComplexMatrix& h, double snr) {
  if (!(snr > 0.0)) throw InvalidInput("mutual_information_full: snr must be > 0");
  return log2_det_identity_plus(h, snr);
}

double mutual_information_full(const ChannelMatrix& ch, double snr) {
  return mutual_information_full(ch.h(), snr);
}

double mutual_information_processed(const ChannelMatrix& ch,
                                    const ComplexMatrix& g, double snr) {
  if (!(snr > 0.0)) {
    throw InvalidInput("mutual_information_processed: snr must be > 0");
  }
  if (g.rows() != ch.m() || g.cols() < 1 || g.cols() > g.rows()) {
    throw InvalidInput("mutual_information_processed: G must be M x T with 1 <= T <= M");
  }
  const SvdResult dec = svd(g);
  const double smax = dec.s(0);
  const double smin = dec.s(dec.s.size() - 1);
  if (!(smax > 0.0) || smin <= tol::kRankRelative * smax) {
    throw DegenerateMatrix("mutual_information_processed: G is rank deficient");
  }
  // dec.u is an orthonormal basis of span(G); U^H H carries all the
  // information G^H y has about s.
  const ComplexMatrix projected = dec.u.adjoint() * ch.h();
  return log2_det_identity_plus(projected, snr);
}

double capacity_ratio(const ChannelMatrix& ch, const ComplexMatrix& g,
                      double snr) {
  return mutual_information_processed(ch, g, snr) /
         mutual_information_full(ch, snr);
}

}  // namespace waxsim
