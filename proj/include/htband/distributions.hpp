#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "htband/rng.hpp"

namespace htband {

/// Moment order and bound of the heavy-tailed class: E|X|^{1+epsilon} <= u.
struct HeavyTailParams {
  double epsilon = 1.0;
  double u = 1.0;

  /// Throws std::domain_error unless 0 < epsilon <= 1 and u >= 0.
  void validate() const;
};

struct Atom {
  double value = 0.0;
  double mass = 0.0;
};

enum class DistributionKind { DiracMixture, NegativeDiracMixture, PointMass };

std::string_view to_string(DistributionKind kind);

/// A finite mixture of Dirac atoms.
///
/// All moment queries are closed-form sums over the atoms. The object is
/// immutable once built; `sample` draws from a caller-owned stream, so a
/// single distribution can be shared by concurrent replications.
///
/// Continuous families would plug in here as further kinds; only atom
/// mixtures are provided, which keeps truncated non-positivity decidable.
class RewardDistribution {
 public:
  /// Masses must be nonnegative and sum to 1 within 1e-12.
  explicit RewardDistribution(std::vector<Atom> atoms, std::string label = {});

  static RewardDistribution point_mass(double at);

  DistributionKind kind() const noexcept { return kind_; }
  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  const std::string& label() const noexcept { return label_; }

  double mean() const noexcept;
  double variance() const noexcept;
  /// E|X|^alpha.
  double moment(double alpha) const;
  /// P(X != 0).
  double nonzero_mass() const noexcept;

  /// True iff E[X 1{|X| > M}] <= 0 for every M >= 0. The tail sum is
  /// piecewise constant in M, so it is evaluated at M = 0 and at every
  /// distinct atom magnitude.
  bool satisfies_truncated_nonpositivity() const;

  /// Inverse-CDF draw over the cumulative masses.
  double sample(Rng& rng) const noexcept;

 private:
  std::vector<Atom> atoms_;
  std::vector<double> cumulative_;
  DistributionKind kind_;
  std::string label_;
};

/// rho_y: mass y^{1+1/eps} u^{-1/eps} at -u^{1/eps} Delta^{-1/eps}, rest at 0.
/// Requires 0 < y <= Delta < u^{1/(1+eps)}.
RewardDistribution make_rho(double y, double gap_scale,
                            const HeavyTailParams& params);

/// Arms plus the class they are claimed to belong to.
class BanditInstance {
 public:
  /// Validates params and checks E|X|^{1+eps} <= u + 1e-9 for every arm.
  BanditInstance(std::vector<RewardDistribution> arms, HeavyTailParams params,
                 std::string label = {});

  std::size_t size() const noexcept { return arms_.size(); }
  const std::vector<RewardDistribution>& arms() const noexcept { return arms_; }
  const RewardDistribution& arm(std::size_t i) const { return arms_.at(i); }
  const HeavyTailParams& params() const noexcept { return params_; }
  const std::vector<double>& means() const noexcept { return means_; }
  /// mu* - mu_i; exactly 0 for the optimal arm.
  const std::vector<double>& gaps() const noexcept { return gaps_; }
  /// Lowest index attaining the largest mean.
  std::size_t optimal_arm() const noexcept { return optimal_; }
  double max_gap() const noexcept;
  const std::string& label() const noexcept { return label_; }

 private:
  std::vector<RewardDistribution> arms_;
  HeavyTailParams params_;
  std::vector<double> means_;
  std::vector<double> gaps_;
  std::size_t optimal_ = 0;
  std::string label_;
};

enum class LowerBoundKind {
  UAdaptiveBase,
  UAdaptiveAlt,
  EpsAdaptiveBase,
  EpsAdaptiveAlt,
  AssumptionLb,
};

std::string_view to_string(LowerBoundKind kind);
/// Parses "u-adaptive-base", "u-adaptive-alt", "eps-adaptive-base",
/// "eps-adaptive-alt" or "assumption-lb".
std::optional<LowerBoundKind> parse_lower_bound_kind(std::string_view name);

struct LowerBoundParams {
  double epsilon = 1.0;
  double u = 1.0;
  /// Construction parameter Delta of the proofs (not always the gap).
  double gap_scale = 0.1;
  /// u' of the u-adaptive alternative instance; must be >= u.
  double u_alt = 2.0;
  /// eps' of the eps-adaptive alternative instance; must lie in (0, eps).
  double epsilon_alt = 1.0 / 3.0;
  /// Number of arms for assumption-lb.
  std::size_t num_arms = 2;
  /// assumption-lb only: arm turned into rho_{(1/3)^{eps/(1+eps)} Delta},
  /// giving the alternative instance. Must lie in [1, num_arms).
  std::optional<std::size_t> alt_arm;
};

/// Builds the two-instance constructions used by the lower bounds. Out of
/// range parameters throw std::domain_error.
BanditInstance make_lb_instance(LowerBoundKind which,
                                const LowerBoundParams& params);

}  // namespace htband
