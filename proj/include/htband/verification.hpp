#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "htband/distributions.hpp"
#include "htband/estimator.hpp"

namespace htband {

/// One-sided coverage check: violations must not exceed the nominal rate by
/// more than `slack_sigmas` binomial standard deviations.
struct CoverageReport {
  std::string suite;
  std::size_t trials = 0;
  /// Trials without a threshold root; excluded from the denominator.
  std::size_t skipped = 0;
  std::size_t violations = 0;
  /// violations / (trials - skipped); NaN when nothing was evaluated.
  double empirical_rate = 0.0;
  double nominal_rate = 0.0;
  double slack_sigmas = 3.0;
  bool pass = false;

  std::size_t evaluated() const noexcept { return trials - skipped; }
};

/// Fills empirical_rate and pass from the counts. With zero evaluated trials
/// the report fails.
CoverageReport finalize_report(CoverageReport report);

/// Frequency of M_hat > (u s / ((sqrt c - sqrt 2)^2 log(1/delta)))^{1/(1+eps)}
/// over `trials` independent books of s samples. Nominal rate 2 delta.
CoverageReport check_threshold_bound(const RewardDistribution& dist,
                                     const HeavyTailParams& params,
                                     std::size_t s, double delta, double c,
                                     std::size_t trials, std::uint64_t seed);

/// Split-sample protocol with s total samples: s/2 feed the trimmed mean,
/// the other s/2 the threshold (c = (1 + sqrt 2)^2). Counts
/// |mu_hat - mu| > 8 u^{1/(1+eps)} (log(1/delta)/s)^{eps/(1+eps)}.
/// Nominal rate 4 delta; needs even s >= 4 and delta in (0, 1/4).
CoverageReport check_concentration(const RewardDistribution& dist,
                                   const HeavyTailParams& params,
                                   std::size_t s, double delta,
                                   std::size_t trials, std::uint64_t seed);

/// One-sided empirical UCB: counts mu > mu_hat + sqrt(2 V L/s) + 10 M L/s
/// with M from an independent book of s samples. Nominal rate 2 delta.
/// Throws std::domain_error if dist violates truncated non-positivity.
CoverageReport check_ucb_validity(const RewardDistribution& dist,
                                  std::size_t s, double delta,
                                  std::size_t trials, std::uint64_t seed,
                                  double c = kDefaultThresholdC);

/// Bracketing bisection on the direct residual. Requires
/// residual(lo) > 0 > residual(hi); stops once hi - lo <= tol * lo.
double bisection_oracle(std::span<const double> samples, double target,
                        double lo, double hi, double tol);

/// Randomised solver workload: sizes 2..500, zeros, repeated magnitudes,
/// magnitudes spanning 1e-6..1e6, and a target uniform in (0, #nonzero).
struct RootCase {
  std::vector<double> samples;
  double target = 0.0;
};

std::vector<RootCase> make_root_corpus(std::size_t count, std::uint64_t seed);

/// Bracket [lo, hi] guaranteed to contain the root of a valid case.
std::pair<double, double> root_bracket(const RootCase& c);

struct SolverBenchResult {
  /// Exact root: |residual| <= 1e-9 and agreement with bisection to 1e-9.
  CoverageReport exactness;
  /// Doubling output / exact root within [1, 2].
  CoverageReport doubling;
  /// Threshold homogeneity, monotone residual and no-root detection.
  CoverageReport properties;
};

SolverBenchResult run_solver_bench(std::span<const RootCase> corpus,
                                   std::uint64_t seed);

}  // namespace htband

namespace htband {

/// Reference parameter sets used by the `concentration` subcommand and the
/// acceptance suite.
/// threshold-bound: u-adaptive nu_2 (eps=1, u=1, Delta=0.5), s=500, delta=0.05.
CoverageReport run_default_threshold_bound(std::size_t trials,
                                           std::uint64_t seed);
/// concentration: u-adaptive nu_2 (eps=0.5, u=1, Delta=0.5), s=400,
/// delta=0.05.
CoverageReport run_default_concentration(std::size_t trials,
                                         std::uint64_t seed);
/// ucb-validity: rho_Delta (eps=1, u=1, Delta=0.3), s=200, delta=0.05.
CoverageReport run_default_ucb_validity(std::size_t trials,
                                        std::uint64_t seed);

}  // namespace htband
