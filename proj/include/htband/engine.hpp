#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "htband/distributions.hpp"
#include "htband/policies.hpp"

namespace htband {

struct Checkpoint {
  std::size_t t = 0;
  double regret = 0.0;
};

/// Cumulative pseudo-regret sum_{s <= t} gap(I_s) at selected pull counts.
struct RegretTrace {
  std::vector<Checkpoint> checkpoints;
  double final_regret = 0.0;
  std::vector<std::size_t> pulls_per_arm;
  std::uint64_t seed = 0;

  /// Regret at checkpoint t; throws std::out_of_range if t was not recorded.
  double regret_at(std::size_t t) const;
};

struct Replication {
  BanditInstance instance;
  PolicySpec policy;
  std::size_t horizon = 0;
  std::uint64_t seed = 0;
  /// Sorted, distinct, within [1, horizon].
  std::vector<std::size_t> checkpoints;
};

/// {2^k <= horizon} together with the horizon itself.
std::vector<std::size_t> geometric_checkpoints(std::size_t horizon);

/// Runs exactly `horizon` reward draws. Rewards come from the stream
/// derive_seed(seed, 0) and policy randomness from derive_seed(seed, 1), so
/// the trace is a pure function of the replication. A paired policy with an
/// odd horizon throws std::domain_error.
RegretTrace run_replication(const Replication& rep);

/// Instance-dependent AdaR-UCB bound:
///   sum_{gap_i > 0} [(120 (u/gap_i)^{1/eps} + 24 gap_i / P_i(X != 0))
///                    log(T/2) + 20 gap_i].
/// +inf when a suboptimal arm never yields a nonzero reward.
double theorem_bound_instance_dependent(const BanditInstance& instance,
                                        double horizon);

/// Worst-case AdaR-UCB bound:
///   46 (K log(T/2))^{eps/(1+eps)} (u T)^{1/(1+eps)}
///   + sum_{gap_i > 0} (24 gap_i / P_i(X != 0) log(T/2) + 20 gap_i).
double theorem_bound_worst_case(const BanditInstance& instance, double horizon);

}  // namespace htband
