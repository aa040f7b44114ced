#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "waxsim/optim.hpp"

namespace waxsim {

enum class Method { kProposed, kBaseline, kUnconstrained, kRandom };

inline constexpr Method kAllMethods[] = {Method::kProposed, Method::kBaseline,
                                         Method::kUnconstrained, Method::kRandom};

std::string_view method_name(Method m);
std::optional<Method> parse_method(std::string_view name);

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Axes and settings of a capacity-ratio sweep.
struct ExperimentSpec {
  int m = 12;
  int k = 4;
  std::vector<int> l_values{1, 2, 3};
  int t_first = 4;  // inclusive
  int t_last = 12;  // inclusive
  std::vector<double> snr_db_values{0.0, 20.0};
  int trials = 1000;
  std::uint64_t master_seed = 1;
  std::vector<Method> methods{std::begin(kAllMethods), std::end(kAllMethods)};
  /// Reuse one combining module per (L, T) cell instead of drawing per trial.
  bool fix_a_across_trials = false;
  OptimOptions optim;
  /// 0 selects WAXSIM_WORKERS from the environment, else the hardware count.
  int workers = 0;

  void validate() const;
  bool wants(Method m) const;
};

/// A trial's processing is judged lossless when its ratio is at least this.
inline constexpr double kLosslessRatio = 1.0 - 1e-6;

struct MethodOutcome {
  Method method = Method::kProposed;
  /// False when the trial is excluded for this method (singular unconstrained
  /// block); ratios are then empty.
  bool valid = true;
  /// Capacity ratio per entry of ExperimentSpec::snr_db_values.
  std::vector<double> ratios;
  int iterations = 0;
  /// The baseline projection hit a rank-deficient block.
  bool singular_fallback = false;
};

struct TrialOutcome {
  int l = 0;
  int t = 0;
  std::uint64_t trial_index = 0;
  std::vector<MethodOutcome> methods;
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Seed of one trial: mix64(mix64(mix64(master) ^ trial) ^ cell).
std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t trial_index,
                         std::uint64_t cell_index);

/// Identifier of the (L, T) cell, independent of the sweep's axis ordering.
std::uint64_t cell_index(const ExperimentSpec& spec, int l, int t);

/// One channel draw evaluated with every requested method. H and A are shared
/// between methods; each method draws its own randomness from a separate
/// stream so results do not depend on which other methods run. The filters
/// do not depend on the SNR, so every SNR of the spec is evaluated here.
TrialOutcome run_trial(const ExperimentSpec& spec, int l, int t,
                       std::uint64_t trial_index);

struct SweepRow {
  Method method = Method::kProposed;
  int l = 0;
  int t = 0;
  double snr_db = 0.0;
  double mean_ratio = 0.0;
  double std_ratio = 0.0;
  int n_trials = 0;
  double lossless_fraction = 0.0;
  double mean_iters = 0.0;
  int excluded_trials = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
};

/// Rows ordered by (L, T, SNR, method) following the spec's axis order.
SweepResult run_sweep(const ExperimentSpec& spec);

/// Aggregates outcomes of a single cell. Exposed for testing.
std::vector<SweepRow> aggregate_cell(const ExperimentSpec& spec, int l, int t,
                                     const std::vector<TrialOutcome>& trials);

enum class OutputFormat { kCsv, kJson };

inline constexpr std::string_view kCsvHeader =
    "method,L,T,snr_db,mean_ratio,std_ratio,n_trials,lossless_fraction,mean_iters";

std::string to_csv(const SweepResult& result);
nlohmann::json to_json(const SweepResult& result, const ExperimentSpec& spec);
nlohmann::json spec_to_json(const ExperimentSpec& spec);

/// Inverse of to_csv. Throws InvalidInput on malformed input.
std::vector<SweepRow> parse_csv(std::string_view text);

/// Writes the result to `path`; "-" means `fallback` (stdout in the CLI).
/// Throws IoError carrying the path on failure.
void emit(const SweepResult& result, const ExperimentSpec& spec, OutputFormat format,
          const std::filesystem::path& path, std::ostream* fallback = nullptr);

/// Command-line entry point. Returns 0 on success, 1 on invalid arguments,
/// 2 on I/O failure.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace waxsim
