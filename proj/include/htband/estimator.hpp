#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <optional>

#include "htband/distributions.hpp"

namespace htband {

/// (1 + sqrt 2)^2 = 3 + 2 sqrt 2.
inline constexpr double kDefaultThresholdC = 5.8284271247461900976;

enum class SolverKind { ExactSegmentScan, Doubling };

std::string_view to_string(SolverKind kind);
std::optional<SolverKind> parse_solver_kind(std::string_view name);

struct ThresholdConfig {
  double c = kDefaultThresholdC;
  /// Starting guess of the doubling solver.
  double eta = 1e-16;
  SolverKind solver = SolverKind::ExactSegmentScan;

  /// Requires c > 2 and eta > 0.
  void validate() const;
};

/// Outcome of solving sum_j min{x_j^2, M^2}/M^2 = target for M > 0.
struct ThresholdSolve {
  double m_hat = 0.0;
  /// Residual at m_hat; NaN when no root exists.
  double residual = 0.0;
  bool exists = false;
  std::size_t n_nonzero = 0;
  double target = 0.0;
  /// Doublings performed (doubling solver only).
  std::size_t iterations = 0;
};

struct TrimmedEstimate {
  double mean_hat = 0.0;
  double variance_hat = 0.0;
  double threshold = 0.0;
  std::size_t n = 0;
};

/// (1/s) sum_j x_j 1{|x_j| <= m}. Throws std::domain_error on empty input.
double trimmed_mean(std::span<const double> samples, double m);

/// Sample variance (divisor s - 1) of the trimmed values x_j 1{|x_j| <= m}.
/// Throws std::domain_error for fewer than two samples.
double trimmed_variance(std::span<const double> samples, double m);

TrimmedEstimate trimmed_estimate(std::span<const double> samples, double m);

/// (1/s) sum_j min{x_j^2, m^2}/m^2 - target/s. Throws for m <= 0.
double residual(std::span<const double> samples, double m, double target);

/// c log(1/delta). Throws unless delta lies in (0,1).
double threshold_target(double delta, double c);

/// Root of the threshold equation with confidence delta.
///
/// A root exists (and is unique) iff 0 < c log(1/delta) < #{x_j != 0};
/// otherwise the result has exists = false and the caller decides.
ThresholdSolve solve_threshold(std::span<const double> samples, double delta,
                               const ThresholdConfig& cfg);

/// Same as solve_threshold with the target c log(1/delta) given directly.
ThresholdSolve solve_threshold_for_target(std::span<const double> samples,
                                          double target,
                                          const ThresholdConfig& cfg);

/// Threshold that knows the class: (u s / log(1/delta))^{1/(1+eps)}.
double nonadaptive_threshold(const HeavyTailParams& params, std::size_t s,
                             double delta);

/// sqrt(2 V L / s) + 10 M L / s with L = log_inv_delta. Needs est.n >= 2.
double ucb_width_empirical(const TrimmedEstimate& est, double log_inv_delta);

struct ConcentrationWidths {
  /// 8 u^{1/(1+eps)} (log(1/delta)/s)^{eps/(1+eps)}: empirical threshold.
  double adaptive = 0.0;
  /// 4 u^{1/(1+eps)} (log(1/delta)/s)^{eps/(1+eps)}: class-aware threshold.
  double nonadaptive = 0.0;
};

ConcentrationWidths conc_width_oracle(const HeavyTailParams& params,
                                      std::size_t s, double delta);

}  // namespace htband
