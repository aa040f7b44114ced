#pragma once

#include "waxsim/linalg.hpp"

namespace waxsim {

/// One scenario: M antennas split into M_P = M/L panels of L antennas, K
/// users, T streams forwarded to the central unit, linear SNR.
struct SystemConfig {
  int m = 12;
  int k = 4;
  int l = 1;
  int t = 4;
  double snr = 1.0;

  int m_p() const { return l > 0 ? m / l : 0; }

  /// Throws InvalidInput unless 1 <= L <= K <= T <= M, L | M and snr > 0.
  void validate() const;
};

double db_to_linear(double db);

/// Channel H (M x K) together with its signal/null split. Immutable.
class ChannelMatrix {
 public:
  /// Throws DegenerateMatrix when H is not full column rank.
  explicit ChannelMatrix(ComplexMatrix h);

  const ComplexMatrix& h() const { return h_; }
  const ComplexMatrix& u_tilde() const { return qr_.u_tilde; }
  const ComplexMatrix& n_h() const { return qr_.n_h; }
  const ComplexMatrix& r_tilde() const { return qr_.r_tilde; }
  int m() const { return static_cast<int>(h_.rows()); }
  int k() const { return static_cast<int>(h_.cols()); }

 private:
  ComplexMatrix h_;
  QrSplit qr_;
};

/// I.i.d. Rayleigh channel, CN(0, 1) per entry. Redraws on the (measure-zero)
/// rank-deficient event.
ChannelMatrix sample_channel(const SystemConfig& cfg, Rng& rng);

/// log2 det(I_K + snr H^H H).
double mutual_information_full(const ComplexMatrix& h, double snr);
double mutual_information_full(const ChannelMatrix& ch, double snr);

/// Mutual information of G^H y for a full-column-rank M x T processing matrix
/// G. The noise after processing is colored by G^H G, so the value is
/// log2 det(I_K + snr H^H P_G H) with P_G the orthogonal projector onto
/// span(G). Throws DegenerateMatrix if G is rank deficient.
double mutual_information_processed(const ChannelMatrix& ch,
                                    const ComplexMatrix& g, double snr);

/// mutual_information_processed / mutual_information_full.
double capacity_ratio(const ChannelMatrix& ch, const ComplexMatrix& g,
                      double snr);

}  // namespace waxsim
