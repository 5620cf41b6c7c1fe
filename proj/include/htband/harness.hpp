#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "htband/distributions.hpp"
#include "htband/engine.hpp"
#include "htband/policies.hpp"
#include "htband/verification.hpp"

namespace htband {

/// Bad configuration. `field` names the offending key (dotted path); line and
/// column are 1-based and 0 when unknown.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message, int line = 0,
              int column = 0);

  const std::string& field() const noexcept { return field_; }
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  std::string field_;
  int line_;
  int column_;
};

/// A lower-bound construction by name, or explicit atom lists.
struct InstanceSpec {
  /// One of the lower-bound kind names, or "explicit".
  std::string kind = "assumption-lb";
  LowerBoundParams lower_bound;
  /// Class of an explicit instance.
  HeavyTailParams params;
  std::vector<std::vector<Atom>> arms;

  BanditInstance build() const;
};

struct ExperimentConfig {
  std::string name;
  InstanceSpec instance;
  PolicySpec policy;
  /// Sorted, distinct; even for paired policies.
  std::vector<std::size_t> horizons;
  std::size_t replications = 1;
  std::uint64_t master_seed = 0;
  /// Explicit pull counts; empty means the geometric grid.
  std::vector<std::size_t> checkpoints;
  std::string output_dir = "results";
  /// 0 means one worker per hardware thread.
  std::size_t parallelism = 0;
  /// Non-fatal adjustments made while parsing (e.g. odd horizons).
  std::vector<std::string> warnings;
};

/// Strict YAML parsing: unknown keys are rejected, defaults filled in, and
/// the instance is built once to validate it.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Environment variable that overrides `output_dir`.
inline constexpr const char* kOutputDirEnv = "HTBAND_OUTPUT_DIR";

struct SummaryRow {
  std::string experiment;
  std::size_t horizon = 0;
  std::string policy;
  double mean_regret = 0.0;
  double stderr_regret = 0.0;
  double min_regret = 0.0;
  double max_regret = 0.0;
  double bound_id = 0.0;
  double bound_wc = 0.0;
};

struct ExperimentSummary {
  std::vector<SummaryRow> rows;
  /// Indexed by replication.
  std::vector<RegretTrace> traces;
  std::filesystem::path trace_path;
  std::filesystem::path summary_path;
};

struct RunOptions {
  std::optional<std::size_t> parallelism;
  bool write_files = true;
};

/// Runs `count` replications with seeds derive_seed(master_seed, r) on a
/// worker pool. The result is independent of `parallelism` (0 = auto).
std::vector<RegretTrace> run_replications(const BanditInstance& instance,
                                          const PolicySpec& policy,
                                          std::size_t horizon,
                                          const std::vector<std::size_t>& checkpoints,
                                          std::uint64_t master_seed,
                                          std::size_t count,
                                          std::size_t parallelism);

/// Runs every replication once up to the largest horizon (all policies are
/// anytime), then summarises each horizon. Writes <name>.trace.csv and
/// <name>.summary.csv under output_dir unless disabled.
ExperimentSummary run_experiment(const ExperimentConfig& cfg,
                                 const RunOptions& options = {});

/// Shortest-round-trip-safe decimal: 17 significant digits, "inf"/"nan".
std::string format_double(double x);

std::string trace_csv(const std::string& experiment,
                      const std::vector<RegretTrace>& traces);
std::string summary_csv(const std::vector<SummaryRow>& rows);

std::string coverage_csv_header();
std::string coverage_csv_row(const CoverageReport& report);

std::size_t resolve_parallelism(std::size_t requested);

}  // namespace htband
