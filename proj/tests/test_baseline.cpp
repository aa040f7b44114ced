#include <doctest.h>

#include "test_util.hpp"
#include "waxsim/baseline.hpp"
#include "waxsim/model.hpp"
#include "waxsim/optim.hpp"

using namespace waxsim;
using waxsim::testing::random_matrix;

namespace {

struct Solved {
  SystemConfig cfg;
  ChannelMatrix ch;
  CombiningModule a;
  UnconstrainedSolution sol;
};

Solved solve_random(int m, int k, int l, int t, Rng& rng) {
  SystemConfig cfg{m, k, l, t, 1.0};
  ChannelMatrix ch = sample_channel(cfg, rng);
  CombiningModule a = CombiningModule::haar(m, t, l, rng);
  UnconstrainedSolution sol = solve_unconstrained(ch, a, cfg);
  return {cfg, std::move(ch), std::move(a), std::move(sol)};
}

double stacked_norm(const UnconstrainedSolution& s) {
  double n2 = s.x.squaredNorm();
  for (const auto& b : s.w_blocks) n2 += b.squaredNorm();
  return std::sqrt(n2);
}

}  // namespace

TEST_CASE("constraint operator applied to a stacked vector matches A X - W H") {
  Rng rng(1);
  const SystemConfig cfg{6, 3, 2, 4, 1.0};
  const ChannelMatrix ch = sample_channel(cfg, rng);
  const CombiningModule a = CombiningModule::haar(6, 4, 2, rng);
  const ComplexMatrix phi = constraint_operator(ch, a);
  CHECK(phi.rows() == 18);
  CHECK(phi.cols() == 12 + 3 * 4);
  const ComplexMatrix x = random_matrix(4, 3, rng);
  std::vector<ComplexMatrix> w;
  Eigen::VectorXcd v(24);
  v.head(12) = Eigen::Map<const Eigen::VectorXcd>(x.data(), 12);
  for (int mi = 0; mi < 3; ++mi) {
    w.push_back(random_matrix(2, 2, rng));
    v.segment(12 + 4 * mi, 4) = Eigen::Map<const Eigen::VectorXcd>(w.back().data(), 4);
  }
  const ComplexMatrix r = a.a() * x - block_diag(w) * ch.h();
  CHECK((phi * v - Eigen::Map<const Eigen::VectorXcd>(r.data(), r.size())).norm() < 1e-12);
}

TEST_CASE("solve_unconstrained: unit norm and residual equals sigma_min") {
  Rng rng(2);
  for (int t : {4, 6, 9}) {
    const Solved s = solve_random(12, 4, 2, t, rng);
    CHECK(stacked_norm(s.sol) == doctest::Approx(1.0).epsilon(1e-12));
    const RealVector sv = waxsim::testing::oracle_singular_values(constraint_operator(s.ch, s.a));
    const Eigen::Index n = constraint_operator(s.ch, s.a).cols();
    const double sigma_min = sv.size() < n ? 0.0 : sv(sv.size() - 1);
    CHECK(std::abs(s.sol.residual - sigma_min) < 1e-9);
  }
}

TEST_CASE("solve_unconstrained: exact decompositions at T = M and at L = K, T = K") {
  Rng rng(3);
  for (int l : {1, 2, 3}) CHECK(solve_random(6, 3, l, 6, rng).sol.residual < 1e-10);
  for (int i = 0; i < 5; ++i) CHECK(solve_random(12, 4, 4, 4, rng).sol.relative_residual < 1e-8);
}

TEST_CASE("unconstrained processing is lossless when the residual vanishes") {
  Rng rng(4);
  int checked = 0;
  for (int i = 0; i < 20; ++i) {
    const Solved s = solve_random(12, 4, 2, 8, rng);
    if (s.sol.relative_residual >= 1e-8 || !blocks_full_rank(s.sol.w_blocks)) continue;
    ++checked;
    const ComplexMatrix g = unconstrained_processing(s.sol, s.a);
    CHECK(capacity_ratio(s.ch, g, 1.0) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(capacity_ratio(s.ch, g, 100.0) == doctest::Approx(1.0).epsilon(1e-6));
  }
  CHECK(checked >= 15);
}

TEST_CASE("the channel-side blocks themselves (G = W A) do not give a lossless filter") {
  Rng rng(5);
  double best = 0.0;
  for (int i = 0; i < 10; ++i) {
    const Solved s = solve_random(12, 4, 2, 8, rng);
    REQUIRE(s.sol.relative_residual < 1e-8);
    const ComplexMatrix g = block_diag(s.sol.w_blocks) * s.a.a();
    best = std::max(best, capacity_ratio(s.ch, g, 100.0));
  }
  CHECK(best < 1.0 - 1e-3);
}

TEST_CASE("unconstrained_processing rejects singular blocks") {
  Rng rng(6);
  Solved s = solve_random(6, 3, 1, 4, rng);
  s.sol.w_blocks[2].setZero();
  CHECK_FALSE(blocks_full_rank(s.sol.w_blocks));
  CHECK_THROWS_AS(unconstrained_processing(s.sol, s.a), DegenerateMatrix);
}

TEST_CASE("project_to_unitary_blocks") {
  Rng rng(7);
  UnconstrainedSolution u;
  u.w_blocks = {haar_unitary(2, rng), haar_unitary(2, rng)};
  const BlockDiagonalFilter same = project_to_unitary_blocks(u);
  for (int i = 0; i < 2; ++i) CHECK((same.block(i) - u.w_blocks[static_cast<std::size_t>(i)]).norm() < 1e-12);

  UnconstrainedSolution g;
  g.w_blocks = {random_matrix(3, 3, rng), random_matrix(3, 3, rng)};
  UnconstrainedSolution g5 = g;
  for (auto& b : g5.w_blocks) b *= 5.0;
  const BlockDiagonalFilter p = project_to_unitary_blocks(g);
  const BlockDiagonalFilter p5 = project_to_unitary_blocks(g5);
  for (int i = 0; i < 2; ++i) CHECK((p.block(i) - p5.block(i)).norm() < 1e-12);

  UnconstrainedSolution sing;
  sing.w_blocks = {ComplexMatrix::Zero(2, 2), haar_unitary(2, rng)};
  ProjectionDiagnostics diag;
  const BlockDiagonalFilter ps = project_to_unitary_blocks(sing, &diag);
  CHECK(diag.singular_blocks == std::vector<int>{0});
  CHECK(unitarity_error(ps.block(0)) < 1e-12);
}

TEST_CASE("projection is the nearest unitary block on solved instances") {
  Rng rng(8);
  for (int i = 0; i < 100; ++i) {
    const Solved s = solve_random(6, 3, 3, 3 + i % 4, rng);
    const BlockDiagonalFilter p = project_to_unitary_blocks(s.sol);
    for (int mi = 0; mi < p.block_count(); ++mi) {
      const ComplexMatrix& w = s.sol.w_blocks[static_cast<std::size_t>(mi)];
      REQUIRE(unitarity_error(p.block(mi)) < 1e-9);
      const double d = (w - p.block(mi)).norm();
      for (int j = 0; j < 1000; ++j) REQUIRE(d <= (w - haar_unitary(3, rng)).norm() + 1e-12);
    }
  }
}

TEST_CASE("baseline filter is the adjoint of the projection") {
  Rng rng(9);
  const Solved s = solve_random(12, 4, 2, 6, rng);
  const BlockDiagonalFilter p = project_to_unitary_blocks(s.sol);
  const BlockDiagonalFilter b = baseline_filter(s.sol);
  for (int mi = 0; mi < p.block_count(); ++mi) {
    CHECK((b.block(mi) - p.block(mi).adjoint()).norm() == 0.0);
  }
  const double r = capacity_ratio(s.ch, b.apply(s.a.a()), 100.0);
  CHECK(r <= 1.0 + 1e-9);
}

TEST_CASE("scaling H leaves a lossless decomposition lossless") {
  Rng rng(10);
  for (int i = 0; i < 10; ++i) {
    const Solved s = solve_random(12, 4, 3, 6, rng);
    REQUIRE(s.sol.relative_residual < 1e-8);
    const double base = capacity_ratio(s.ch, unconstrained_processing(s.sol, s.a), 10.0);
    for (double c : {1e-3, 7.0, 1e3}) {
      const ChannelMatrix scaled(c * s.ch.h());
      const UnconstrainedSolution sol = solve_unconstrained(scaled, s.a, s.cfg);
      CHECK(sol.residual / scaled.h().norm() < 1e-9);
      const double r = capacity_ratio(scaled, unconstrained_processing(sol, s.a), 10.0);
      CHECK(std::abs(r - base) < 1e-9);
    }
  }
}

TEST_CASE("solver residual does not grow with T on average") {
  Rng rng(11);
  double prev = 1e300;
  for (int t = 4; t <= 12; ++t) {
    double sum = 0.0;
    for (int i = 0; i < 100; ++i) sum += solve_random(12, 4, 1, t, rng).sol.relative_residual;
    const double mean = sum / 100.0;
    CHECK(mean <= prev * (1.0 + 0.1) + 1e-12);
    prev = mean;
  }
}

TEST_CASE("random isotropic filter") {
  Rng rng(12);
  const SystemConfig cfg{12, 4, 3, 12, 1.0};
  const BlockDiagonalFilter w = random_isotropic_filter(cfg, rng);
  CHECK(w.block_count() == 4);
  for (const auto& b : w.blocks()) CHECK(unitarity_error(b) < 1e-10);
  const ChannelMatrix ch = sample_channel(cfg, rng);
  const CombiningModule a = CombiningModule::haar(12, 12, 3, rng);
  CHECK(std::abs(capacity_ratio(ch, w.apply(a.a()), 100.0) - 1.0) < 1e-9);
}

TEST_CASE("random filters fall below the proposed method on matched channels") {
  Rng rng(13);
  double proposed = 0.0, random = 0.0;
  const int n = 100;
  OptimOptions opts;
  opts.restarts = 1;
  for (int i = 0; i < n; ++i) {
    const SystemConfig cfg{12, 4, 2, 8, 100.0};
    const ChannelMatrix ch = sample_channel(cfg, rng);
    const CombiningModule a = CombiningModule::haar(12, 8, 2, rng);
    const OptimResult r = optimize(ch, a, cfg, opts, rng);
    proposed += capacity_ratio(ch, r.w.apply(a.a()), cfg.snr);
    random += capacity_ratio(ch, random_isotropic_filter(cfg, rng).apply(a.a()), cfg.snr);
  }
  MESSAGE("proposed " << proposed / n << " random " << random / n);
  CHECK(random / n < proposed / n);
}
