#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "htband/distributions.hpp"
#include "htband/estimator.hpp"
#include "htband/magnitude_index.hpp"
#include "htband/rng.hpp"

namespace htband {

/// Samples of one arm, kept both in arrival order and in a magnitude index.
class SampleBook {
 public:
  void add(double x);
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  const MagnitudeIndex& index() const noexcept { return index_; }

  /// Trimmed mean and variance at threshold m, via prefix aggregates.
  /// Needs size() >= 2.
  TrimmedEstimate trimmed(double m) const;
  /// Threshold root for `target`; doubling uses cfg.eta as its start.
  ThresholdSolve solve(double target, const ThresholdConfig& cfg) const;

 private:
  std::vector<double> values_;
  MagnitudeIndex index_;
};

/// What the last AdaR-UCB round computed for an arm.
struct ArmSnapshot {
  std::size_t round = 0;
  ThresholdSolve threshold;
  TrimmedEstimate estimate;
};

/// Per-arm state of AdaR-UCB: two independent sample books. `book_x` feeds
/// the trimmed mean and variance, `book_x_prime` feeds the threshold.
class ArmState {
 public:
  /// Appends one sample to each book.
  void record(double x, double x_prime);

  std::size_t pulls() const noexcept { return book_x_.size(); }
  std::size_t nonzero_count() const noexcept { return nonzero_; }
  const SampleBook& book_x() const noexcept { return book_x_; }
  const SampleBook& book_x_prime() const noexcept { return book_x_prime_; }
  const std::optional<ArmSnapshot>& cached() const noexcept { return cached_; }
  void set_cached(ArmSnapshot snap) { cached_ = std::move(snap); }

 private:
  SampleBook book_x_;
  SampleBook book_x_prime_;
  std::size_t nonzero_ = 0;
  std::optional<ArmSnapshot> cached_;
};

struct PolicyDecision {
  std::size_t arm = 0;
  /// Optimistic index per arm; +inf for forced exploration.
  std::vector<double> indices;
  /// True when the selected arm's index was forced to +inf.
  bool forced = false;
};

/// Lowest index attaining the maximum.
std::size_t argmax_lowest(std::span<const double> indices);

struct AdaRucbConfig {
  ThresholdConfig threshold;
  /// Forced exploration while nonzero_count <= guard_c log(tau^3).
  double guard_c = kDefaultThresholdC;

  /// Requires a valid threshold config and guard_c >= threshold.c, which
  /// makes every attempted solve satisfy the existence condition.
  void validate() const;
};

/// One AdaR-UCB round: computes every arm's index at round tau (>= 1) and
/// picks the argmax. Writes each computed estimate into the arm's cache.
PolicyDecision adarucb_round(std::span<ArmState> states, std::size_t tau,
                             const AdaRucbConfig& cfg);

void adarucb_update(std::span<ArmState> states, std::size_t arm,
                    std::pair<double, double> rewards);

using DeltaSchedule = std::function<double(std::size_t)>;

/// delta_t = t^{-2}.
double default_robust_delta(std::size_t t);

/// Robust-UCB with the class-aware trimmed mean. Index of an arm with N
/// samples: trimmed mean at (u N / log(1/delta_t))^{1/(1+eps)} plus
/// 4 u^{1/(1+eps)} (log(1/delta_t)/N)^{eps/(1+eps)}. t is the 1-based index
/// of the pull being decided.
PolicyDecision robustucb_tm_round(std::span<const SampleBook> books,
                                  std::size_t t, const HeavyTailParams& params,
                                  const DeltaSchedule& schedule);

PolicyDecision uniform_round(std::size_t num_arms, Rng& rng);

/// A bandit policy driven by the engine: decide, then observe
/// samples_per_decision() rewards of the chosen arm.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::string_view name() const noexcept = 0;
  virtual std::size_t num_arms() const noexcept = 0;
  virtual std::size_t samples_per_decision() const noexcept { return 1; }
  virtual PolicyDecision decide(Rng& rng) = 0;
  virtual void observe(std::size_t arm, std::span<const double> rewards) = 0;
};

/// AdaR-UCB. Deliberately has no access to (epsilon, u).
class AdaRucbPolicy final : public Policy {
 public:
  AdaRucbPolicy(std::size_t num_arms, AdaRucbConfig cfg = {});

  std::string_view name() const noexcept override { return "adarucb"; }
  std::size_t num_arms() const noexcept override { return states_.size(); }
  std::size_t samples_per_decision() const noexcept override { return 2; }
  PolicyDecision decide(Rng& rng) override;
  void observe(std::size_t arm, std::span<const double> rewards) override;

  std::size_t round() const noexcept { return tau_; }
  std::span<const ArmState> states() const noexcept { return states_; }

 private:
  std::vector<ArmState> states_;
  AdaRucbConfig cfg_;
  std::size_t tau_ = 1;
};

class RobustUcbTmPolicy final : public Policy {
 public:
  RobustUcbTmPolicy(std::size_t num_arms, HeavyTailParams params,
                    DeltaSchedule schedule = default_robust_delta);

  std::string_view name() const noexcept override { return "robustucb-tm"; }
  std::size_t num_arms() const noexcept override { return books_.size(); }
  PolicyDecision decide(Rng& rng) override;
  void observe(std::size_t arm, std::span<const double> rewards) override;

 private:
  std::vector<SampleBook> books_;
  HeavyTailParams params_;
  DeltaSchedule schedule_;
  std::size_t t_ = 1;
};

class UniformPolicy final : public Policy {
 public:
  explicit UniformPolicy(std::size_t num_arms);

  std::string_view name() const noexcept override { return "uniform"; }
  std::size_t num_arms() const noexcept override { return num_arms_; }
  PolicyDecision decide(Rng& rng) override;
  void observe(std::size_t, std::span<const double>) override {}

 private:
  std::size_t num_arms_;
};

/// Policy chosen by name plus its parameters.
struct PolicySpec {
  std::string name = "adarucb";
  AdaRucbConfig adarucb;
};

/// Builds the named policy. Only "robustucb-tm" reads the instance's class
/// parameters. Unknown names throw std::invalid_argument.
std::unique_ptr<Policy> make_policy(const PolicySpec& spec,
                                    const BanditInstance& instance);

}  // namespace htband
