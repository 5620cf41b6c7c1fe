#include "htband/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace htband {

std::string_view to_string(SolverKind kind) {
  return kind == SolverKind::Doubling ? "doubling" : "exact-segment-scan";
}

std::optional<SolverKind> parse_solver_kind(std::string_view name) {
  if (name == "exact-segment-scan") {
    return SolverKind::ExactSegmentScan;
  }
  if (name == "doubling") {
    return SolverKind::Doubling;
  }
  return std::nullopt;
}

void ThresholdConfig::validate() const {
  if (!(c > 2.0)) {
    throw std::domain_error("threshold c must be > 2");
  }
  if (!(eta > 0.0)) {
    throw std::domain_error("eta must be > 0");
  }
}

double trimmed_mean(std::span<const double> samples, double m) {
  if (samples.empty()) {
    throw std::domain_error("trimmed_mean needs at least one sample");
  }
  double sum = 0.0;
  for (double x : samples) {
    if (std::abs(x) <= m) {
      sum += x;
    }
  }
  return sum / static_cast<double>(samples.size());
}

double trimmed_variance(std::span<const double> samples, double m) {
  if (samples.size() < 2) {
    throw std::domain_error("trimmed_variance needs at least two samples");
  }
  const double mu = trimmed_mean(samples, m);
  double sum = 0.0;
  for (double x : samples) {
    const double y = std::abs(x) <= m ? x : 0.0;
    sum += (y - mu) * (y - mu);
  }
  return sum / static_cast<double>(samples.size() - 1);
}

TrimmedEstimate trimmed_estimate(std::span<const double> samples, double m) {
  return {trimmed_mean(samples, m), trimmed_variance(samples, m), m,
          samples.size()};
}

double residual(std::span<const double> samples, double m, double target) {
  if (!(m > 0.0)) {
    throw std::domain_error("residual needs M > 0");
  }
  const double m2 = m * m;
  double sum = 0.0;
  for (double x : samples) {
    const double x2 = x * x;
    sum += x2 >= m2 ? 1.0 : x2 / m2;
  }
  const auto s = static_cast<double>(samples.size());
  return sum / s - target / s;
}

double threshold_target(double delta, double c) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::domain_error("delta must lie in (0,1)");
  }
  return c * std::log(1.0 / delta);
}

namespace {

double exact_segment_root(std::vector<double> magnitudes, double target) {
  std::sort(magnitudes.begin(), magnitudes.end());
  const auto n = static_cast<double>(magnitudes.size());
  // On (a_k, a_{k+1}] the equation reads (n - k) + S_k / M^2 = target.
  // k is the number of magnitudes where the left side still exceeds target.
  std::size_t k = 0;
  double squares = 0.0;
  while (k < magnitudes.size()) {
    const double a = magnitudes[k];
    const double g = (n - static_cast<double>(k)) + squares / (a * a);
    if (!(g > target)) {
      break;
    }
    std::size_t end = k;
    while (end < magnitudes.size() && magnitudes[end] == a) {
      squares += a * a;
      ++end;
    }
    k = end;
  }
  return std::sqrt(squares / (target - (n - static_cast<double>(k))));
}

}  // namespace

ThresholdSolve solve_threshold_for_target(std::span<const double> samples,
                                          double target,
                                          const ThresholdConfig& cfg) {
  if (samples.empty()) {
    throw std::domain_error("solve_threshold needs at least one sample");
  }
  ThresholdSolve out;
  out.target = target;
  std::vector<double> magnitudes;
  magnitudes.reserve(samples.size());
  for (double x : samples) {
    if (x != 0.0) {
      magnitudes.push_back(std::abs(x));
    }
  }
  out.n_nonzero = magnitudes.size();
  out.exists =
      target > 0.0 && target < static_cast<double>(magnitudes.size());
  if (!out.exists) {
    out.residual = std::numeric_limits<double>::quiet_NaN();
    return out;
  }

  if (cfg.solver == SolverKind::ExactSegmentScan) {
    out.m_hat = exact_segment_root(std::move(magnitudes), target);
    out.residual = residual(samples, out.m_hat, target);
    return out;
  }

  double x = cfg.eta;
  double y = residual(samples, x, target);
  while (y > 0.0 && std::isfinite(x)) {
    x *= 2.0;
    y = residual(samples, x, target);
    ++out.iterations;
  }
  out.m_hat = x;
  out.residual = y;
  return out;
}

ThresholdSolve solve_threshold(std::span<const double> samples, double delta,
                               const ThresholdConfig& cfg) {
  return solve_threshold_for_target(samples, threshold_target(delta, cfg.c),
                                    cfg);
}

double nonadaptive_threshold(const HeavyTailParams& params, std::size_t s,
                             double delta) {
  params.validate();
  if (s < 1) {
    throw std::domain_error("nonadaptive_threshold needs s >= 1");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::domain_error("delta must lie in (0,1)");
  }
  const double log_inv = std::log(1.0 / delta);
  return std::pow(params.u * static_cast<double>(s) / log_inv,
                  1.0 / (1.0 + params.epsilon));
}

double ucb_width_empirical(const TrimmedEstimate& est, double log_inv_delta) {
  const auto s = static_cast<double>(est.n);
  return std::sqrt(2.0 * est.variance_hat * log_inv_delta / s) +
         10.0 * est.threshold * log_inv_delta / s;
}

ConcentrationWidths conc_width_oracle(const HeavyTailParams& params,
                                      std::size_t s, double delta) {
  params.validate();
  if (s < 1) {
    throw std::domain_error("conc_width_oracle needs s >= 1");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::domain_error("delta must lie in (0,1)");
  }
  const double eps = params.epsilon;
  const double base =
      std::pow(params.u, 1.0 / (1.0 + eps)) *
      std::pow(std::log(1.0 / delta) / static_cast<double>(s), eps / (1.0 + eps));
  return {8.0 * base, 4.0 * base};
}

}  // namespace htband
