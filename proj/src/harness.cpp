#include "waxsim/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include "waxsim/baseline.hpp"

namespace waxsim {

namespace {

// Independent sub-streams of a trial seed.
enum class Stream : std::uint64_t {
  kChannel = 1,
  kCombiner = 2,
  kProposed = 3,
  kRandom = 4,
};

Rng stream_rng(std::uint64_t seed, Stream s) {
  return Rng(mix64(seed ^ (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(s))));
}

std::string fmt12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("WAXSIM_WORKERS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<double> ratios_for(const ExperimentSpec& spec, const ChannelMatrix& ch,
                               const ComplexMatrix& g) {
  std::vector<double> out;
  out.reserve(spec.snr_db_values.size());
  for (double db : spec.snr_db_values) {
    out.push_back(capacity_ratio(ch, g, db_to_linear(db)));
  }
  return out;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = s.find(sep, start);
    out.emplace_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

std::string_view method_name(Method m) {
  switch (m) {
    case Method::kProposed:
      return "proposed";
    case Method::kBaseline:
      return "baseline";
    case Method::kUnconstrained:
      return "unconstrained";
    case Method::kRandom:
      return "random";
  }
  return "?";
}

std::optional<Method> parse_method(std::string_view name) {
  for (Method m : kAllMethods) {
    if (method_name(m) == name) return m;
  }
  return std::nullopt;
}

void ExperimentSpec::validate() const {
  if (trials < 1) throw InvalidInput("ExperimentSpec: trials must be >= 1");
  if (l_values.empty()) throw InvalidInput("ExperimentSpec: no L values");
  if (snr_db_values.empty()) throw InvalidInput("ExperimentSpec: no SNR values");
  if (methods.empty()) throw InvalidInput("ExperimentSpec: no methods");
  if (t_first < k || t_last > m || t_first > t_last) {
    throw InvalidInput("ExperimentSpec: T range must lie within [K, M]");
  }
  for (int l : l_values) {
    SystemConfig{m, k, l, t_first, 1.0}.validate();
  }
  for (double db : snr_db_values) {
    if (!std::isfinite(db)) throw InvalidInput("ExperimentSpec: SNR must be finite");
  }
  optim.validate();
}

bool ExperimentSpec::wants(Method m) const {
  return std::find(methods.begin(), methods.end(), m) != methods.end();
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t trial_index,
                         std::uint64_t cell) {
  return mix64(mix64(mix64(master_seed) ^ trial_index) ^ cell);
}

std::uint64_t cell_index(const ExperimentSpec& spec, int l, int t) {
  return static_cast<std::uint64_t>(l) * static_cast<std::uint64_t>(spec.m + 1) +
         static_cast<std::uint64_t>(t);
}

TrialOutcome run_trial(const ExperimentSpec& spec, int l, int t,
                       std::uint64_t trial_index) {
  const SystemConfig cfg{spec.m, spec.k, l, t, 1.0};
  cfg.validate();
  const std::uint64_t cell = cell_index(spec, l, t);
  const std::uint64_t seed = trial_seed(spec.master_seed, trial_index, cell);

  Rng channel_rng = stream_rng(seed, Stream::kChannel);
  const ChannelMatrix ch = sample_channel(cfg, channel_rng);
  // A fixed combiner is drawn from the cell alone.
  Rng combiner_rng = spec.fix_a_across_trials
                         ? stream_rng(trial_seed(spec.master_seed, ~0ULL, cell),
                                      Stream::kCombiner)
                         : stream_rng(seed, Stream::kCombiner);
  const CombiningModule a = CombiningModule::haar(cfg.m, t, l, combiner_rng);

  TrialOutcome out{l, t, trial_index, {}};
  std::optional<UnconstrainedSolution> unconstrained;
  if (spec.wants(Method::kBaseline) || spec.wants(Method::kUnconstrained)) {
    unconstrained = solve_unconstrained(ch, a, cfg);
  }

  for (Method method : spec.methods) {
    MethodOutcome mo;
    mo.method = method;
    switch (method) {
      case Method::kProposed: {
        Rng rng = stream_rng(seed, Stream::kProposed);
        const OptimResult res = optimize(ch, a, cfg, spec.optim, rng);
        mo.iterations = res.total_sweeps;
        mo.ratios = ratios_for(spec, ch, res.w.apply(a.a()));
        break;
      }
      case Method::kBaseline: {
        ProjectionDiagnostics diag;
        const BlockDiagonalFilter w = baseline_filter(*unconstrained, &diag);
        mo.singular_fallback = !diag.singular_blocks.empty();
        mo.ratios = ratios_for(spec, ch, w.apply(a.a()));
        break;
      }
      case Method::kUnconstrained: {
        if (!blocks_full_rank(unconstrained->w_blocks)) {
          mo.valid = false;
          break;
        }
        try {
          mo.ratios = ratios_for(spec, ch, unconstrained_processing(*unconstrained, a));
        } catch (const DegenerateMatrix&) {
          mo.valid = false;
          mo.ratios.clear();
        }
        break;
      }
      case Method::kRandom: {
        Rng rng = stream_rng(seed, Stream::kRandom);
        const BlockDiagonalFilter w = random_isotropic_filter(cfg, rng);
        mo.ratios = ratios_for(spec, ch, w.apply(a.a()));
        break;
      }
    }
    out.methods.push_back(std::move(mo));
  }
  return out;
}

std::vector<SweepRow> aggregate_cell(const ExperimentSpec& spec, int l, int t,
                                     const std::vector<TrialOutcome>& trials) {
  std::vector<SweepRow> rows;
  for (std::size_t si = 0; si < spec.snr_db_values.size(); ++si) {
    for (std::size_t mi = 0; mi < spec.methods.size(); ++mi) {
      SweepRow row;
      row.method = spec.methods[mi];
      row.l = l;
      row.t = t;
      row.snr_db = spec.snr_db_values[si];
      double sum = 0.0;
      double iters = 0.0;
      int lossless = 0;
      std::vector<double> vals;
      vals.reserve(trials.size());
      for (const TrialOutcome& tr : trials) {
        const MethodOutcome& mo = tr.methods[mi];
        if (!mo.valid) {
          ++row.excluded_trials;
          continue;
        }
        const double r = mo.ratios[si];
        vals.push_back(r);
        sum += r;
        iters += mo.iterations;
        if (r >= kLosslessRatio) ++lossless;
      }
      row.n_trials = static_cast<int>(vals.size());
      if (row.n_trials > 0) {
        const double n = row.n_trials;
        row.mean_ratio = sum / n;
        double ss = 0.0;
        for (double v : vals) ss += (v - row.mean_ratio) * (v - row.mean_ratio);
        row.std_ratio = row.n_trials > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
        row.lossless_fraction = lossless / n;
        row.mean_iters = iters / n;
      }
      rows.push_back(row);
    }
  }
  return rows;
}

SweepResult run_sweep(const ExperimentSpec& spec) {
  spec.validate();
  struct Cell {
    int l;
    int t;
  };
  std::vector<Cell> cells;
  for (int l : spec.l_values) {
    for (int t = spec.t_first; t <= spec.t_last; ++t) cells.push_back({l, t});
  }
  const std::size_t per_cell = static_cast<std::size_t>(spec.trials);
  const std::size_t total = cells.size() * per_cell;
  std::vector<TrialOutcome> outcomes(total);

  // Work items are claimed dynamically but land in fixed slots, so the
  // aggregate does not depend on scheduling.
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= total || failed.load()) return;
      const Cell& c = cells[i / per_cell];
      try {
        outcomes[i] = run_trial(spec, c.l, c.t, i % per_cell);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
        return;
      }
    }
  };
  const int n_workers =
      static_cast<int>(std::min<std::size_t>(resolve_workers(spec.workers), std::max<std::size_t>(total, 1)));
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_workers));
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  SweepResult result;
  for (std::size_t ci = 0; ci < cells.size(); ++ci) {
    const std::vector<TrialOutcome> slice(
        outcomes.begin() + static_cast<std::ptrdiff_t>(ci * per_cell),
        outcomes.begin() + static_cast<std::ptrdiff_t>((ci + 1) * per_cell));
    auto rows = aggregate_cell(spec, cells[ci].l, cells[ci].t, slice);
    result.rows.insert(result.rows.end(), rows.begin(), rows.end());
  }
  return result;
}

std::string to_csv(const SweepResult& result) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const SweepRow& r : result.rows) {
    out += method_name(r.method);
    out += ',' + std::to_string(r.l) + ',' + std::to_string(r.t) + ',' + fmt12(r.snr_db) +
           ',' + fmt12(r.mean_ratio) + ',' + fmt12(r.std_ratio) + ',' +
           std::to_string(r.n_trials) + ',' + fmt12(r.lossless_fraction) + ',' +
           fmt12(r.mean_iters) + '\n';
  }
  return out;
}

std::vector<SweepRow> parse_csv(std::string_view text) {
  std::vector<SweepRow> rows;
  std::vector<std::string> lines = split(text, '\n');
  if (lines.empty() || lines.front() != kCsvHeader) {
    throw InvalidInput("parse_csv: missing or unexpected header");
  }
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const std::vector<std::string> f = split(lines[i], ',');
    if (f.size() != 9) {
      throw InvalidInput("parse_csv: line " + std::to_string(i + 1) + " has " +
                         std::to_string(f.size()) + " fields");
    }
    const auto method = parse_method(f[0]);
    if (!method) throw InvalidInput("parse_csv: unknown method '" + f[0] + "'");
    SweepRow r;
    r.method = *method;
    try {
      r.l = std::stoi(f[1]);
      r.t = std::stoi(f[2]);
      r.snr_db = std::stod(f[3]);
      r.mean_ratio = std::stod(f[4]);
      r.std_ratio = std::stod(f[5]);
      r.n_trials = std::stoi(f[6]);
      r.lossless_fraction = std::stod(f[7]);
      r.mean_iters = std::stod(f[8]);
    } catch (const std::exception&) {
      throw InvalidInput("parse_csv: bad number on line " + std::to_string(i + 1));
    }
    rows.push_back(r);
  }
  return rows;
}

nlohmann::json spec_to_json(const ExperimentSpec& spec) {
  nlohmann::json methods = nlohmann::json::array();
  for (Method m : spec.methods) methods.push_back(std::string(method_name(m)));
  return {
      {"m", spec.m},
      {"k", spec.k},
      {"l_values", spec.l_values},
      {"t_range", {spec.t_first, spec.t_last}},
      {"snr_db_values", spec.snr_db_values},
      {"trials", spec.trials},
      {"master_seed", spec.master_seed},
      {"methods", methods},
      {"fix_a_across_trials", spec.fix_a_across_trials},
      {"optim",
       {{"max_iters", spec.optim.max_iters},
        {"rel_tol", spec.optim.rel_tol},
        {"restarts", spec.optim.restarts},
        {"init", spec.optim.init == InitMode::kIdentity ? "identity" : "haar-random"},
        {"lossless_tol", spec.optim.lossless_tol}}},
  };
}

nlohmann::json to_json(const SweepResult& result, const ExperimentSpec& spec) {
  nlohmann::json rows = nlohmann::json::array();
  for (const SweepRow& r : result.rows) {
    rows.push_back({{"method", std::string(method_name(r.method))},
                    {"L", r.l},
                    {"T", r.t},
                    {"snr_db", r.snr_db},
                    {"mean_ratio", r.mean_ratio},
                    {"std_ratio", r.std_ratio},
                    {"n_trials", r.n_trials},
                    {"lossless_fraction", r.lossless_fraction},
                    {"mean_iters", r.mean_iters},
                    {"excluded_trials", r.excluded_trials}});
  }
  return {{"spec", spec_to_json(spec)}, {"rows", rows}};
}

void emit(const SweepResult& result, const ExperimentSpec& spec, OutputFormat format,
          const std::filesystem::path& path, std::ostream* fallback) {
  const std::string body =
      format == OutputFormat::kCsv ? to_csv(result) : to_json(result, spec).dump(2) + "\n";
  if (path == "-" && fallback != nullptr) {
    *fallback << body;
    fallback->flush();
    if (!*fallback) throw IoError("emit: failed writing to standard output");
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("emit: cannot open '" + path.string() + "' for writing");
  f << body;
  f.close();
  if (!f) throw IoError("emit: failed writing '" + path.string() + "'");
}

}  // namespace waxsim
