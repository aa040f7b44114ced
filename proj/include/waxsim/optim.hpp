#pragma once

#include <vector>

#include "waxsim/model.hpp"
#include "waxsim/wax.hpp"

namespace waxsim {

// Alternating closed-form maximization of
//   J(W, Q, Q0) = Re{tr(A^H W^H F_L(Q, Q0))}
// over the block-unitary filter W and the lossless parameters (Q, Q0).
// Maximizing J is the same as minimizing the distance
//   D_L = ||W A - F_L(Q, Q0)||_F^2 = 2T - 2J,
// and J = T certifies that W A is an information-lossless transform.

enum class InitMode { kIdentity, kHaarRandom };

struct OptimOptions {
  int max_iters = 500;
  /// Stop once |J_k - J_{k-1}| < rel_tol * T.
  double rel_tol = 1e-9;
  int restarts = 3;
  InitMode init = InitMode::kHaarRandom;
  /// Declared lossless when T - J < lossless_tol.
  double lossless_tol = 1e-6;
  /// Sweeps between polar re-projections of all unitary variables.
  int reorthonormalize_every = 100;

  void validate() const;
};

struct OptimResult {
  BlockDiagonalFilter w;
  LosslessParams params;
  double j_initial = 0.0;
  /// Objective after each full W -> Q -> Q0 sweep of the returned restart.
  std::vector<double> j_history;
  bool converged = false;
  bool lossless = false;
  /// 2T - 2J.
  double distance = 0.0;
  int restart_index = 0;
  /// Sweeps summed over every restart that ran.
  int total_sweeps = 0;

  double final_j() const { return j_history.empty() ? j_initial : j_history.back(); }
};

/// Re{tr(A^H W^H F_L)}, evaluated as the real inner product <W A, F_L>.
double objective_j(const BlockDiagonalFilter& w, const CombiningModule& a,
                   const ComplexMatrix& f_l);

/// sum_m Re{tr(W_m^H F_{L,m} A_m^H)}, F_{L,m} the m-th L x T row block.
double objective_j_blockwise(const BlockDiagonalFilter& w, const CombiningModule& a,
                             const ComplexMatrix& f_l);

/// ||W A - F_L||_F^2 computed directly.
double distance_direct(const BlockDiagonalFilter& w, const CombiningModule& a,
                       const ComplexMatrix& f_l);

/// B_{W_m} = F_{L,m} A_m^H (L x L).
ComplexMatrix w_update_matrix(const CombiningModule& a, const ComplexMatrix& f_l, int block);

/// W_m = procrustes(B_{W_m}) for every block.
BlockDiagonalFilter step_w(const CombiningModule& a, const ComplexMatrix& f_l);

/// B_Q = [U_H^H; [Q0]_{:,1:T-K}^H N_H^H] W A (T x T).
ComplexMatrix q_update_matrix(const BlockDiagonalFilter& w, const CombiningModule& a,
                              const ChannelMatrix& ch, const ComplexMatrix& q0);

ComplexMatrix step_q(const BlockDiagonalFilter& w, const CombiningModule& a,
                     const ChannelMatrix& ch, const ComplexMatrix& q0);

/// B_Q0 = N_H^H W A [[Q]_{K+1:T,:}^H, 0] ((M-K) x (M-K)); only the first T-K
/// columns are nonzero.
ComplexMatrix q0_update_matrix(const BlockDiagonalFilter& w, const CombiningModule& a,
                               const ChannelMatrix& ch, const ComplexMatrix& q);

/// Procrustes solution over Q0. When T == K the objective does not depend on
/// Q0 and the identity is returned (0 x 0 when M == K).
ComplexMatrix step_q0(const BlockDiagonalFilter& w, const CombiningModule& a,
                      const ChannelMatrix& ch, const ComplexMatrix& q);

OptimResult optimize(const ChannelMatrix& ch, const CombiningModule& a,
                     const SystemConfig& cfg, const OptimOptions& opts, Rng& rng);

}  // namespace waxsim
