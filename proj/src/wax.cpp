#include "waxsim/wax.hpp"

#include <algorithm>
#include <string>

#include "waxsim/baseline.hpp"

namespace waxsim {

namespace {
constexpr double kBlockUnitaryTol = 1e-9;
}

BlockDiagonalFilter::BlockDiagonalFilter(std::vector<ComplexMatrix> blocks)
    : blocks_(std::move(blocks)) {
  if (blocks_.empty()) throw InvalidInput("BlockDiagonalFilter: no blocks");
  const Eigen::Index l = blocks_.front().rows();
  if (l < 1) throw InvalidInput("BlockDiagonalFilter: empty block");
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    const ComplexMatrix& b = blocks_[i];
    if (b.rows() != l || b.cols() != l) {
      throw InvalidInput("BlockDiagonalFilter: block " + std::to_string(i) +
                         " is not " + std::to_string(l) + "x" + std::to_string(l));
    }
    require_finite(b, "BlockDiagonalFilter");
    if (unitarity_error(b) > kBlockUnitaryTol) {
      throw InvalidInput("BlockDiagonalFilter: block " + std::to_string(i) +
                         " is not unitary");
    }
  }
}

BlockDiagonalFilter BlockDiagonalFilter::identity(int m_p, int l) {
  return BlockDiagonalFilter(std::vector<ComplexMatrix>(
      static_cast<std::size_t>(m_p), ComplexMatrix::Identity(l, l)));
}

BlockDiagonalFilter BlockDiagonalFilter::adjoint() const {
  std::vector<ComplexMatrix> out;
  out.reserve(blocks_.size());
  for (const auto& b : blocks_) out.emplace_back(b.adjoint());
  return BlockDiagonalFilter(std::move(out));
}

ComplexMatrix BlockDiagonalFilter::apply(const ComplexMatrix& x) const {
  const int l = block_size();
  if (x.rows() != dim()) throw InvalidInput("BlockDiagonalFilter::apply: row mismatch");
  ComplexMatrix out(x.rows(), x.cols());
  for (int mi = 0; mi < block_count(); ++mi) {
    out.middleRows(mi * l, l).noalias() = block(mi) * x.middleRows(mi * l, l);
  }
  return out;
}

ComplexMatrix block_diag(const std::vector<ComplexMatrix>& blocks) {
  Eigen::Index n = 0;
  for (const auto& b : blocks) {
    if (b.rows() != b.cols()) throw InvalidInput("block_diag: blocks must be square");
    n += b.rows();
  }
  ComplexMatrix out = ComplexMatrix::Zero(n, n);
  Eigen::Index off = 0;
  for (const auto& b : blocks) {
    out.block(off, off, b.rows(), b.cols()) = b;
    off += b.rows();
  }
  return out;
}

ComplexMatrix expand_filter(const BlockDiagonalFilter& w) {
  return block_diag(w.blocks());
}

CombiningModule::CombiningModule(ComplexMatrix a, int l) : a_(std::move(a)), l_(l) {
  if (l_ < 1 || a_.rows() % l_ != 0) {
    throw InvalidInput("CombiningModule: L must divide the row count");
  }
  if (a_.cols() > a_.rows()) throw InvalidInput("CombiningModule: need T <= M");
  require_finite(a_, "CombiningModule");
  if (unitarity_error(a_) > kBlockUnitaryTol) {
    throw InvalidInput("CombiningModule: A is not semi-unitary");
  }
}

CombiningModule CombiningModule::haar(int m, int t, int l, Rng& rng) {
  return CombiningModule(haar_semi_unitary(m, t, rng), l);
}

LosslessParams LosslessParams::identity(int t, int m_minus_k) {
  return {ComplexMatrix::Identity(t, t), ComplexMatrix::Identity(m_minus_k, m_minus_k)};
}

LosslessParams LosslessParams::haar(int t, int m_minus_k, Rng& rng) {
  LosslessParams p;
  p.q = haar_unitary(t, rng);
  p.q0 = m_minus_k > 0 ? haar_unitary(m_minus_k, rng) : ComplexMatrix(0, 0);
  return p;
}

void LosslessParams::validate() const {
  if (q.rows() != q.cols() || q0.rows() != q0.cols()) {
    throw InvalidInput("LosslessParams: Q and Q0 must be square");
  }
  if (unitarity_error(q) > kBlockUnitaryTol || unitarity_error(q0) > kBlockUnitaryTol) {
    throw InvalidInput("LosslessParams: Q and Q0 must be unitary");
  }
}

double wax_residual(const std::vector<ComplexMatrix>& w_blocks,
                    const ComplexMatrix& a, const ComplexMatrix& x,
                    const ComplexMatrix& h) {
  ComplexMatrix diff = a * x;
  Eigen::Index off = 0;
  for (const auto& w : w_blocks) {
    diff.middleRows(off, w.rows()).noalias() -= w * h.middleRows(off, w.rows());
    off += w.rows();
  }
  if (off != h.rows()) throw InvalidInput("wax_residual: block sizes do not cover H");
  return diff.norm();
}

ComplexMatrix assemble_lossless_transform(const ChannelMatrix& ch,
                                          const LosslessParams& p) {
  const int m = ch.m();
  const int k = ch.k();
  const auto t = static_cast<int>(p.q.rows());
  if (t < k || t > m) {
    throw InvalidInput("assemble_lossless_transform: need K <= T <= M");
  }
  if (p.q.cols() != t || p.q0.rows() != m - k || p.q0.cols() != m - k) {
    throw InvalidInput("assemble_lossless_transform: Q must be TxT and Q0 (M-K)x(M-K)");
  }
  ComplexMatrix f = ch.u_tilde() * p.q.topRows(k);
  if (t > k) {
    f.noalias() += ch.n_h() * (p.q0.leftCols(t - k) * p.q.bottomRows(t - k));
  }
  return f;
}

double lossless_condition_error(const ChannelMatrix& ch, const ComplexMatrix& f) {
  const ComplexMatrix proj = ch.u_tilde().adjoint() * f;
  const ComplexMatrix gram = proj * proj.adjoint();
  return (gram - ComplexMatrix::Identity(ch.k(), ch.k())).cwiseAbs().maxCoeff();
}

bool tradeoff_satisfied(const SystemConfig& cfg) {
  cfg.validate();
  // T > M(K-L)/K  <=>  T K > M (K-L) for K > 0.
  const long long lhs = static_cast<long long>(cfg.t) * cfg.k;
  const long long rhs = static_cast<long long>(cfg.m) * (cfg.k - cfg.l);
  return lhs > rhs && cfg.t > cfg.k - 1;
}

int tradeoff_min_t(int m, int k, int l) {
  for (int t = k; t <= m; ++t) {
    if (tradeoff_satisfied(SystemConfig{m, k, l, t, 1.0})) return t;
  }
  return m + 1;
}

int t_min(int m, int k, int l) {
  SystemConfig{m, k, l, k, 1.0}.validate();
  return std::max(k, (m * (k - l)) / (k + 1));
}

int t_min(const SystemConfig& cfg) {
  cfg.validate();
  return t_min(cfg.m, cfg.k, cfg.l);
}

int empirical_t_min(int m, int k, int l, int trials, Rng& rng) {
  if (trials < 1) throw InvalidInput("empirical_t_min: trials must be >= 1");
  constexpr double kResidualThreshold = 1e-8;
  for (int t = k; t < m; ++t) {
    const SystemConfig cfg{m, k, l, t, 1.0};
    bool all_ok = true;
    for (int i = 0; i < trials && all_ok; ++i) {
      const ChannelMatrix ch = sample_channel(cfg, rng);
      const CombiningModule a = CombiningModule::haar(m, t, l, rng);
      const UnconstrainedSolution sol = solve_unconstrained(ch, a, cfg);
      all_ok = sol.relative_residual < kResidualThreshold;
    }
    if (all_ok) return t;
  }
  return m;
}

}  // namespace waxsim
