#pragma once

#include <vector>

#include "waxsim/model.hpp"
#include "waxsim/wax.hpp"

namespace waxsim {

/// Minimizer of ||A X - W H||_F over the unit sphere of the stacked vector
/// v = [vec(X); vec(W_1); ...; vec(W_{M_P})].
///
/// The blocks W_m act on the channel side (W H ~= A X). The receive filter
/// that turns this into a WAX decomposition H = W' A X is W' = W^{-1}; see
/// unconstrained_processing().
struct UnconstrainedSolution : WaxSolution {
  /// residual / sigma_max of the constraint operator.
  double relative_residual = 0.0;
};

/// Dense constraint operator Phi: v -> vec(A X - W H), shape
/// (M K) x (T K + M_P L^2). Column-major vec throughout.
ComplexMatrix constraint_operator(const ChannelMatrix& ch, const CombiningModule& a);

/// Right singular vector of Phi for its smallest singular value, reshaped.
UnconstrainedSolution solve_unconstrained(const ChannelMatrix& ch,
                                          const CombiningModule& a,
                                          const SystemConfig& cfg);

/// True when every W_m has sigma_min > 1e-12 sigma_max.
bool blocks_full_rank(const std::vector<ComplexMatrix>& blocks);

/// Processing matrix G = W^{-1} A of the unconstrained method. Throws
/// DegenerateMatrix if a block is singular.
ComplexMatrix unconstrained_processing(const UnconstrainedSolution& sol,
                                       const CombiningModule& a);

struct ProjectionDiagnostics {
  /// Blocks that were rank deficient and went through the Procrustes fallback.
  std::vector<int> singular_blocks;
};

/// Each W_m replaced by its unitary polar factor (nearest unitary matrix in
/// Frobenius and spectral norm). Rank-deficient blocks fall back to
/// procrustes() and are listed in `diag` when supplied.
BlockDiagonalFilter project_to_unitary_blocks(const UnconstrainedSolution& sol,
                                              ProjectionDiagnostics* diag = nullptr);

/// Receive filter of the projected baseline. The projection lives on the
/// channel side, so the filter applied to y is its inverse, U^H per block.
BlockDiagonalFilter baseline_filter(const UnconstrainedSolution& sol,
                                    ProjectionDiagnostics* diag = nullptr);

/// Independent Haar unitary per block.
BlockDiagonalFilter random_isotropic_filter(const SystemConfig& cfg, Rng& rng);

}  // namespace waxsim
