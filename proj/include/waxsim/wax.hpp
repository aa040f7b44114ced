#pragma once

#include <vector>

#include "waxsim/linalg.hpp"
#include "waxsim/model.hpp"

namespace waxsim {

/// W = diag(W_1, ..., W_{M_P}) with unitary L x L blocks.
class BlockDiagonalFilter {
 public:
  /// Throws InvalidInput if the blocks are empty, differ in size, or any block
  /// deviates from unitarity by more than 1e-9.
  explicit BlockDiagonalFilter(std::vector<ComplexMatrix> blocks);

  static BlockDiagonalFilter identity(int m_p, int l);

  const std::vector<ComplexMatrix>& blocks() const { return blocks_; }
  const ComplexMatrix& block(int m) const { return blocks_[static_cast<std::size_t>(m)]; }
  int block_size() const { return static_cast<int>(blocks_.front().rows()); }
  int block_count() const { return static_cast<int>(blocks_.size()); }
  int dim() const { return block_size() * block_count(); }

  /// diag(W_1^H, ...), which is also W^{-1}.
  BlockDiagonalFilter adjoint() const;

  /// W X computed blockwise; X must have dim() rows.
  ComplexMatrix apply(const ComplexMatrix& x) const;

 private:
  std::vector<ComplexMatrix> blocks_;
};

/// Block-diagonal placement of arbitrary square blocks.
ComplexMatrix block_diag(const std::vector<ComplexMatrix>& blocks);

/// M x M matrix of a unitary block filter.
ComplexMatrix expand_filter(const BlockDiagonalFilter& w);

/// Fixed M x T semi-unitary combining module, viewed as M_P row blocks A_m of
/// size L x T.
class CombiningModule {
 public:
  CombiningModule(ComplexMatrix a, int l);

  static CombiningModule haar(int m, int t, int l, Rng& rng);

  const ComplexMatrix& a() const { return a_; }
  int l() const { return l_; }
  int m() const { return static_cast<int>(a_.rows()); }
  int t() const { return static_cast<int>(a_.cols()); }
  int m_p() const { return m() / l_; }
  auto row_block(int mi) const { return a_.middleRows(static_cast<Eigen::Index>(mi) * l_, l_); }

 private:
  ComplexMatrix a_;
  int l_;
};

/// Unitary pair (Q, Q0) parameterizing a lossless semi-unitary transform.
struct LosslessParams {
  ComplexMatrix q;   // T x T
  ComplexMatrix q0;  // (M-K) x (M-K), 0 x 0 when M == K

  static LosslessParams identity(int t, int m_minus_k);
  static LosslessParams haar(int t, int m_minus_k, Rng& rng);
  void validate() const;
};

/// Factors of an approximate decomposition A X ~= W H.
struct WaxSolution {
  std::vector<ComplexMatrix> w_blocks;
  ComplexMatrix x;  // T x K
  double residual = 0.0;
};

/// ||A X - W H||_F.
double wax_residual(const std::vector<ComplexMatrix>& w_blocks,
                    const ComplexMatrix& a, const ComplexMatrix& x,
                    const ComplexMatrix& h);

/// F_L = [U_H, N_H Q0] [Q; 0] = U_H Q_top + N_H Q0_left Q_bottom, an M x T
/// semi-unitary transform whose output keeps all information about s.
ComplexMatrix assemble_lossless_transform(const ChannelMatrix& ch,
                                          const LosslessParams& p);

/// U_H^H F F^H U_H - I_K, max-abs entry. Zero iff F (semi-unitary) is lossless.
double lossless_condition_error(const ChannelMatrix& ch, const ComplexMatrix& f);

/// True iff T > max(M(K-L)/K, K-1), evaluated in integers.
bool tradeoff_satisfied(const SystemConfig& cfg);

/// Smallest T in [K, M] satisfying tradeoff_satisfied.
int tradeoff_min_t(int m, int k, int l);

/// max(K, floor(M(K-L)/(K+1))).
int t_min(const SystemConfig& cfg);
int t_min(int m, int k, int l);

/// Smallest T in [K, M] for which the unconstrained solver reaches relative
/// residual below 1e-8 on every one of `trials` random (H, A) draws.
int empirical_t_min(int m, int k, int l, int trials, Rng& rng);

}  // namespace waxsim
