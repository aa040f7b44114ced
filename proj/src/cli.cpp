#include <cstdio>
#include <iomanip>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "waxsim/baseline.hpp"
#include "waxsim/harness.hpp"

namespace waxsim {

namespace {

struct SweepArgs {
  int m = 12;
  int k = 4;
  std::vector<int> l_values{1, 2, 3};
  std::optional<int> t_first;
  std::optional<int> t_last;
  std::vector<double> snr_db{0.0, 20.0};
  int trials = 1000;
  std::uint64_t seed = 1;
  std::vector<std::string> methods{"proposed", "baseline", "unconstrained", "random"};
  bool fix_a = false;
  std::string out = "-";
  std::string format = "csv";
  int workers = 0;
  int max_iters = 500;
  int restarts = 3;
  std::string init = "haar-random";
};

struct TminArgs {
  int m = 12;
  int k = 4;
  int l = 1;
  int trials = 20;
  std::uint64_t seed = 1;
};

struct DecomposeArgs {
  int m = 12;
  int k = 4;
  int l = 2;
  int t = 10;
  double snr_db = 20.0;
  std::uint64_t seed = 1;
  int max_iters = 500;
  int restarts = 3;
  std::string init = "haar-random";
};

InitMode parse_init(const std::string& s) {
  if (s == "identity") return InitMode::kIdentity;
  if (s == "haar-random") return InitMode::kHaarRandom;
  throw InvalidInput("unknown --init '" + s + "' (expected identity or haar-random)");
}

int run_sweep_cmd(const SweepArgs& a, std::ostream& out, std::ostream& err) {
  ExperimentSpec spec;
  spec.m = a.m;
  spec.k = a.k;
  spec.l_values = a.l_values;
  spec.t_first = a.t_first.value_or(a.k);
  spec.t_last = a.t_last.value_or(a.m);
  spec.snr_db_values = a.snr_db;
  spec.trials = a.trials;
  spec.master_seed = a.seed;
  spec.methods.clear();
  for (const auto& name : a.methods) {
    const auto m = parse_method(name);
    if (!m) throw InvalidInput("unknown method '" + name + "'");
    spec.methods.push_back(*m);
  }
  spec.fix_a_across_trials = a.fix_a;
  spec.workers = a.workers;
  spec.optim.max_iters = a.max_iters;
  spec.optim.restarts = a.restarts;
  spec.optim.init = parse_init(a.init);
  spec.validate();

  const OutputFormat fmt = a.format == "json" ? OutputFormat::kJson : OutputFormat::kCsv;
  const SweepResult result = run_sweep(spec);
  emit(result, spec, fmt, a.out, &out);
  if (a.out != "-") err << "wrote " << result.rows.size() << " rows to " << a.out << "\n";
  return 0;
}

int run_tmin_cmd(const TminArgs& a, std::ostream& out) {
  const SystemConfig cfg{a.m, a.k, a.l, a.k, 1.0};
  cfg.validate();
  if (a.trials < 1) throw InvalidInput("--trials must be >= 1");
  Rng rng(mix64(a.seed));
  const int tradeoff = tradeoff_min_t(a.m, a.k, a.l);
  const int formula = t_min(a.m, a.k, a.l);
  const int empirical = empirical_t_min(a.m, a.k, a.l, a.trials, rng);
  out << "M=" << a.m << " K=" << a.k << " L=" << a.l << "\n";
  out << "tradeoff_threshold " << tradeoff
      << "  # smallest T with T > max(M(K-L)/K, K-1)\n";
  out << "t_min_formula " << formula << "  # max(K, floor(M(K-L)/(K+1)))\n";
  out << "empirical_t_min " << empirical << "  # unconstrained residual < 1e-8 on "
      << a.trials << " draws\n";
  return 0;
}

int run_decompose_cmd(const DecomposeArgs& a, std::ostream& out) {
  const SystemConfig cfg{a.m, a.k, a.l, a.t, db_to_linear(a.snr_db)};
  cfg.validate();
  OptimOptions opts;
  opts.max_iters = a.max_iters;
  opts.restarts = a.restarts;
  opts.init = parse_init(a.init);
  opts.validate();

  Rng rng(mix64(a.seed));
  const ChannelMatrix ch = sample_channel(cfg, rng);
  const CombiningModule comb = CombiningModule::haar(cfg.m, cfg.t, cfg.l, rng);
  const OptimResult res = optimize(ch, comb, cfg, opts, rng);

  out << std::setprecision(12);
  out << "M=" << cfg.m << " K=" << cfg.k << " L=" << cfg.l << " T=" << cfg.t
      << " snr_db=" << a.snr_db << " seed=" << a.seed << "\n";
  out << "restart " << res.restart_index << " of " << opts.restarts << ", "
      << res.total_sweeps << " sweeps in total\n";
  out << "sweep J\n";
  out << "0 " << res.j_initial << "\n";
  for (std::size_t i = 0; i < res.j_history.size(); ++i) {
    out << i + 1 << " " << res.j_history[i] << "\n";
  }
  out << "distance_DL " << res.distance << "\n";
  out << "converged " << (res.converged ? "true" : "false") << "\n";
  out << "lossless " << (res.lossless ? "true" : "false") << "\n";

  out << "capacity_ratio proposed " << capacity_ratio(ch, res.w.apply(comb.a()), cfg.snr)
      << "\n";
  const UnconstrainedSolution sol = solve_unconstrained(ch, comb, cfg);
  ProjectionDiagnostics diag;
  const BlockDiagonalFilter base = baseline_filter(sol, &diag);
  out << "capacity_ratio baseline " << capacity_ratio(ch, base.apply(comb.a()), cfg.snr)
      << (diag.singular_blocks.empty() ? "" : " (singular block fallback)") << "\n";
  if (blocks_full_rank(sol.w_blocks)) {
    out << "capacity_ratio unconstrained "
        << capacity_ratio(ch, unconstrained_processing(sol, comb), cfg.snr)
        << "  residual " << sol.residual << "\n";
  } else {
    out << "capacity_ratio unconstrained n/a (singular block)  residual " << sol.residual
        << "\n";
  }
  const BlockDiagonalFilter rnd = random_isotropic_filter(cfg, rng);
  out << "capacity_ratio random " << capacity_ratio(ch, rnd.apply(comb.a()), cfg.snr)
      << "\n";
  return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"waxsim: unitary-constrained WAX decentralized receiver simulator"};
  app.name("waxsim");
  app.require_subcommand(1);

  SweepArgs sweep;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Monte Carlo capacity-ratio sweep");
  sweep_cmd->add_option("--m", sweep.m, "antennas M")->capture_default_str();
  sweep_cmd->add_option("--k", sweep.k, "users K")->capture_default_str();
  sweep_cmd->add_option("--l", sweep.l_values, "block sizes L (comma separated)")
      ->delimiter(',')
      ->capture_default_str();
  sweep_cmd->add_option("--t-min", sweep.t_first, "first T (default K)");
  sweep_cmd->add_option("--t-max", sweep.t_last, "last T (default M)");
  sweep_cmd->add_option("--snr-db", sweep.snr_db, "SNR values in dB (comma separated)")
      ->delimiter(',')
      ->capture_default_str();
  sweep_cmd->add_option("--trials", sweep.trials, "trials per cell")->capture_default_str();
  sweep_cmd->add_option("--seed", sweep.seed, "master seed")->capture_default_str();
  sweep_cmd->add_option("--methods", sweep.methods,
                        "subset of proposed,baseline,unconstrained,random")
      ->delimiter(',')
      ->capture_default_str();
  sweep_cmd->add_flag("--fix-a", sweep.fix_a, "reuse one combining module per cell");
  sweep_cmd->add_option("--out", sweep.out, "output path, - for stdout")->capture_default_str();
  sweep_cmd->add_option("--format", sweep.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  sweep_cmd->add_option("--workers", sweep.workers, "worker threads (0 = auto)")
      ->capture_default_str();
  sweep_cmd->add_option("--max-iters", sweep.max_iters, "sweeps per restart")
      ->capture_default_str();
  sweep_cmd->add_option("--restarts", sweep.restarts, "optimizer restarts")
      ->capture_default_str();
  sweep_cmd->add_option("--init", sweep.init, "identity or haar-random")
      ->capture_default_str();

  TminArgs tmin;
  CLI::App* tmin_cmd =
      app.add_subcommand("tmin", "lossless-T thresholds for the unconstrained framework");
  tmin_cmd->add_option("--m", tmin.m, "antennas M")->capture_default_str();
  tmin_cmd->add_option("--k", tmin.k, "users K")->capture_default_str();
  tmin_cmd->add_option("--l", tmin.l, "block size L")->capture_default_str();
  tmin_cmd->add_option("--trials", tmin.trials, "draws for the empirical threshold")
      ->capture_default_str();
  tmin_cmd->add_option("--seed", tmin.seed, "seed")->capture_default_str();

  DecomposeArgs dec;
  CLI::App* dec_cmd =
      app.add_subcommand("decompose", "optimize a single seeded instance and report it");
  dec_cmd->add_option("--m", dec.m, "antennas M")->capture_default_str();
  dec_cmd->add_option("--k", dec.k, "users K")->capture_default_str();
  dec_cmd->add_option("--l", dec.l, "block size L")->capture_default_str();
  dec_cmd->add_option("--t", dec.t, "streams T")->capture_default_str();
  dec_cmd->add_option("--snr-db", dec.snr_db, "SNR in dB")->capture_default_str();
  dec_cmd->add_option("--seed", dec.seed, "seed")->capture_default_str();
  dec_cmd->add_option("--max-iters", dec.max_iters, "sweeps per restart")
      ->capture_default_str();
  dec_cmd->add_option("--restarts", dec.restarts, "optimizer restarts")
      ->capture_default_str();
  dec_cmd->add_option("--init", dec.init, "identity or haar-random")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    if (sweep_cmd->parsed()) return run_sweep_cmd(sweep, out, err);
    if (tmin_cmd->parsed()) return run_tmin_cmd(tmin, out);
    if (dec_cmd->parsed()) return run_decompose_cmd(dec, out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  err << app.help();
  return 1;
}

}  // namespace waxsim
