#include "waxsim/optim.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <span>

#include "waxsim/kernels.hpp"

namespace waxsim {

namespace {

std::span<const Complex> flat(const ComplexMatrix& m) {
  return {m.data(), static_cast<std::size_t>(m.size())};
}

void check_dims(const BlockDiagonalFilter& w, const CombiningModule& a,
                const ComplexMatrix& f_l) {
  if (w.dim() != a.m() || w.block_size() != a.l() || f_l.rows() != a.m() ||
      f_l.cols() != a.t()) {
    throw InvalidInput("objective: W, A and F_L dimensions disagree");
  }
}

struct State {
  BlockDiagonalFilter w;
  LosslessParams p;
};

State initial_state(const SystemConfig& cfg, InitMode mode, Rng& rng) {
  const int mk = cfg.m - cfg.k;
  if (mode == InitMode::kIdentity) {
    return {BlockDiagonalFilter::identity(cfg.m_p(), cfg.l),
            LosslessParams::identity(cfg.t, mk)};
  }
  std::vector<ComplexMatrix> blocks;
  for (int mi = 0; mi < cfg.m_p(); ++mi) blocks.emplace_back(haar_unitary(cfg.l, rng));
  BlockDiagonalFilter w(std::move(blocks));
  return {std::move(w), LosslessParams::haar(cfg.t, mk, rng)};
}

ComplexMatrix reproject(const ComplexMatrix& u) {
  return u.size() == 0 ? u : procrustes(u);
}

}  // namespace

void OptimOptions::validate() const {
  if (max_iters < 1) throw InvalidInput("OptimOptions: max_iters must be >= 1");
  if (restarts < 1) throw InvalidInput("OptimOptions: restarts must be >= 1");
  if (!(rel_tol > 0.0) || !(lossless_tol > 0.0)) {
    throw InvalidInput("OptimOptions: tolerances must be positive");
  }
  if (reorthonormalize_every < 1) {
    throw InvalidInput("OptimOptions: reorthonormalize_every must be >= 1");
  }
}

double objective_j(const BlockDiagonalFilter& w, const CombiningModule& a,
                   const ComplexMatrix& f_l) {
  check_dims(w, a, f_l);
  const ComplexMatrix wa = w.apply(a.a());
  return kernels::real_inner(flat(wa), flat(f_l));
}

double objective_j_blockwise(const BlockDiagonalFilter& w, const CombiningModule& a,
                             const ComplexMatrix& f_l) {
  check_dims(w, a, f_l);
  double acc = 0.0;
  for (int mi = 0; mi < w.block_count(); ++mi) {
    acc += trace_objective(w.block(mi), w_update_matrix(a, f_l, mi));
  }
  return acc;
}

double distance_direct(const BlockDiagonalFilter& w, const CombiningModule& a,
                       const ComplexMatrix& f_l) {
  check_dims(w, a, f_l);
  const ComplexMatrix diff = w.apply(a.a()) - f_l;
  return kernels::squared_norm(flat(diff));
}

ComplexMatrix w_update_matrix(const CombiningModule& a, const ComplexMatrix& f_l,
                              int block) {
  const int l = a.l();
  return f_l.middleRows(static_cast<Eigen::Index>(block) * l, l) *
         a.row_block(block).adjoint();
}

BlockDiagonalFilter step_w(const CombiningModule& a, const ComplexMatrix& f_l) {
  if (f_l.rows() != a.m() || f_l.cols() != a.t()) {
    throw InvalidInput("step_w: F_L must match A's shape");
  }
  std::vector<ComplexMatrix> blocks;
  blocks.reserve(static_cast<std::size_t>(a.m_p()));
  for (int mi = 0; mi < a.m_p(); ++mi) {
    blocks.emplace_back(procrustes(w_update_matrix(a, f_l, mi)));
  }
  return BlockDiagonalFilter(std::move(blocks));
}

ComplexMatrix q_update_matrix(const BlockDiagonalFilter& w, const CombiningModule& a,
                              const ChannelMatrix& ch, const ComplexMatrix& q0) {
  const int k = ch.k();
  const int t = a.t();
  const ComplexMatrix wa = w.apply(a.a());
  ComplexMatrix b(t, t);
  b.topRows(k).noalias() = ch.u_tilde().adjoint() * wa;
  if (t > k) {
    b.bottomRows(t - k).noalias() =
        (ch.n_h() * q0.leftCols(t - k)).adjoint() * wa;
  }
  return b;
}

ComplexMatrix step_q(const BlockDiagonalFilter& w, const CombiningModule& a,
                     const ChannelMatrix& ch, const ComplexMatrix& q0) {
  return procrustes(q_update_matrix(w, a, ch, q0));
}

ComplexMatrix q0_update_matrix(const BlockDiagonalFilter& w, const CombiningModule& a,
                               const ChannelMatrix& ch, const ComplexMatrix& q) {
  const int k = ch.k();
  const int t = a.t();
  const int mk = ch.m() - k;
  ComplexMatrix b = ComplexMatrix::Zero(mk, mk);
  if (t > k) {
    b.leftCols(t - k).noalias() =
        ch.n_h().adjoint() * w.apply(a.a()) * q.bottomRows(t - k).adjoint();
  }
  return b;
}

ComplexMatrix step_q0(const BlockDiagonalFilter& w, const CombiningModule& a,
                      const ChannelMatrix& ch, const ComplexMatrix& q) {
  const int mk = ch.m() - ch.k();
  if (a.t() == ch.k()) return ComplexMatrix::Identity(mk, mk);
  return procrustes(q0_update_matrix(w, a, ch, q));
}

OptimResult optimize(const ChannelMatrix& ch, const CombiningModule& a,
                     const SystemConfig& cfg, const OptimOptions& opts, Rng& rng) {
  cfg.validate();
  opts.validate();
  if (ch.m() != cfg.m || ch.k() != cfg.k || a.m() != cfg.m || a.t() != cfg.t ||
      a.l() != cfg.l) {
    throw InvalidInput("optimize: channel/combiner dimensions disagree with the config");
  }
  const double t = cfg.t;

  std::optional<OptimResult> best;
  int total_sweeps = 0;
  for (int r = 0; r < opts.restarts; ++r) {
    State s = initial_state(cfg, opts.init, rng);
    OptimResult cur{s.w, s.p, 0.0, {}};
    cur.restart_index = r;
    cur.j_initial = objective_j(s.w, a, assemble_lossless_transform(ch, s.p));
    cur.j_history.reserve(static_cast<std::size_t>(opts.max_iters));

    double prev = cur.j_initial;
    for (int it = 1; it <= opts.max_iters; ++it) {
      s.w = step_w(a, assemble_lossless_transform(ch, s.p));
      s.p.q = step_q(s.w, a, ch, s.p.q0);
      s.p.q0 = step_q0(s.w, a, ch, s.p.q);
      if (it % opts.reorthonormalize_every == 0) {
        std::vector<ComplexMatrix> blocks;
        for (const auto& b : s.w.blocks()) blocks.emplace_back(reproject(b));
        s.w = BlockDiagonalFilter(std::move(blocks));
        s.p.q = reproject(s.p.q);
        s.p.q0 = reproject(s.p.q0);
      }
      const double j = objective_j(s.w, a, assemble_lossless_transform(ch, s.p));
      cur.j_history.push_back(j);
      ++total_sweeps;
      const bool small_step = std::abs(j - prev) < opts.rel_tol * t;
      prev = j;
      if (small_step || t - j < std::numeric_limits<double>::epsilon() * 16 * t) {
        cur.converged = true;
        break;
      }
    }
    cur.w = s.w;
    cur.params = s.p;
    const double j = cur.final_j();
    cur.distance = 2.0 * t - 2.0 * j;
    cur.lossless = t - j < opts.lossless_tol;
    if (!best || j > best->final_j()) best = std::move(cur);
    // No restart can beat a lossless one by more than rounding.
    if (best->lossless) break;
  }
  best->total_sweeps = total_sweeps;
  return std::move(*best);
}

}  // namespace waxsim
