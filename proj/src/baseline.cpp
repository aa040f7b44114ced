#include "waxsim/baseline.hpp"

#include <string>

namespace waxsim {

namespace {

bool block_full_rank(const ComplexMatrix& b) {
  const RealVector s = svd(b).s;
  return s(0) > 0.0 && s(s.size() - 1) > tol::kRankRelative * s(0);
}

}  // namespace

ComplexMatrix constraint_operator(const ChannelMatrix& ch, const CombiningModule& a) {
  const ComplexMatrix& h = ch.h();
  const Eigen::Index m = h.rows();
  const Eigen::Index k = h.cols();
  const Eigen::Index t = a.t();
  const Eigen::Index l = a.l();
  const Eigen::Index m_p = a.m_p();
  if (a.m() != m) throw InvalidInput("constraint_operator: A and H row counts differ");

  const Eigen::Index x_len = t * k;
  ComplexMatrix phi = ComplexMatrix::Zero(m * k, x_len + m_p * l * l);
  for (Eigen::Index col = 0; col < k; ++col) {
    // A X: output column `col` is A times column `col` of X.
    phi.block(col * m, col * t, m, t) = a.a();
    // -W H: row m*L+r of column `col` is -sum_c W_m(r, c) H(m*L+c, col).
    for (Eigen::Index mi = 0; mi < m_p; ++mi) {
      const Eigen::Index w_off = x_len + mi * l * l;
      for (Eigen::Index c = 0; c < l; ++c) {
        const Complex hv = h(mi * l + c, col);
        for (Eigen::Index r = 0; r < l; ++r) {
          phi(col * m + mi * l + r, w_off + c * l + r) = -hv;
        }
      }
    }
  }
  return phi;
}

UnconstrainedSolution solve_unconstrained(const ChannelMatrix& ch,
                                          const CombiningModule& a,
                                          const SystemConfig& cfg) {
  cfg.validate();
  if (a.m() != cfg.m || a.t() != cfg.t || a.l() != cfg.l || ch.m() != cfg.m ||
      ch.k() != cfg.k) {
    throw InvalidInput("solve_unconstrained: dimensions disagree with the config");
  }
  const ComplexMatrix phi = constraint_operator(ch, a);
  const NullVector nv = smallest_right_singular_vector(phi);
  const Eigen::VectorXcd& v = nv.v;

  const int t = cfg.t;
  const int k = cfg.k;
  const int l = cfg.l;
  UnconstrainedSolution sol;
  sol.x = Eigen::Map<const ComplexMatrix>(v.data(), t, k);
  sol.w_blocks.reserve(static_cast<std::size_t>(cfg.m_p()));
  for (int mi = 0; mi < cfg.m_p(); ++mi) {
    sol.w_blocks.emplace_back(
        Eigen::Map<const ComplexMatrix>(v.data() + t * k + mi * l * l, l, l));
  }
  sol.residual = wax_residual(sol.w_blocks, a.a(), sol.x, ch.h());
  const double smax = nv.sigma_max;
  sol.relative_residual = smax > 0.0 ? sol.residual / smax : sol.residual;
  return sol;
}

bool blocks_full_rank(const std::vector<ComplexMatrix>& blocks) {
  for (const auto& b : blocks) {
    if (!block_full_rank(b)) return false;
  }
  return true;
}

ComplexMatrix unconstrained_processing(const UnconstrainedSolution& sol,
                                       const CombiningModule& a) {
  std::vector<ComplexMatrix> inverses;
  inverses.reserve(sol.w_blocks.size());
  for (std::size_t i = 0; i < sol.w_blocks.size(); ++i) {
    if (!block_full_rank(sol.w_blocks[i])) {
      throw DegenerateMatrix("unconstrained_processing: block " + std::to_string(i) +
                             " is singular");
    }
    inverses.emplace_back(sol.w_blocks[i].partialPivLu().inverse());
  }
  return block_diag(inverses) * a.a();
}

BlockDiagonalFilter project_to_unitary_blocks(const UnconstrainedSolution& sol,
                                              ProjectionDiagnostics* diag) {
  std::vector<ComplexMatrix> out;
  out.reserve(sol.w_blocks.size());
  for (std::size_t i = 0; i < sol.w_blocks.size(); ++i) {
    try {
      out.emplace_back(polar_factor(sol.w_blocks[i]));
    } catch (const DegenerateMatrix&) {
      out.emplace_back(procrustes(sol.w_blocks[i]));
      if (diag != nullptr) diag->singular_blocks.push_back(static_cast<int>(i));
    }
  }
  return BlockDiagonalFilter(std::move(out));
}

BlockDiagonalFilter baseline_filter(const UnconstrainedSolution& sol,
                                    ProjectionDiagnostics* diag) {
  return project_to_unitary_blocks(sol, diag).adjoint();
}

BlockDiagonalFilter random_isotropic_filter(const SystemConfig& cfg, Rng& rng) {
  cfg.validate();
  std::vector<ComplexMatrix> blocks;
  blocks.reserve(static_cast<std::size_t>(cfg.m_p()));
  for (int mi = 0; mi < cfg.m_p(); ++mi) blocks.emplace_back(haar_unitary(cfg.l, rng));
  return BlockDiagonalFilter(std::move(blocks));
}

}  // namespace waxsim
