#include "htband/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace htband {

double RegretTrace::regret_at(std::size_t t) const {
  const auto it = std::lower_bound(
      checkpoints.begin(), checkpoints.end(), t,
      [](const Checkpoint& c, std::size_t v) { return c.t < v; });
  if (it == checkpoints.end() || it->t != t) {
    throw std::out_of_range("no checkpoint at t = " + std::to_string(t));
  }
  return it->regret;
}

std::vector<std::size_t> geometric_checkpoints(std::size_t horizon) {
  std::vector<std::size_t> out;
  for (std::size_t t = 1; t <= horizon && t != 0; t *= 2) {
    out.push_back(t);
    if (t > horizon / 2) {
      break;
    }
  }
  if (out.empty() || out.back() != horizon) {
    out.push_back(horizon);
  }
  return out;
}

RegretTrace run_replication(const Replication& rep) {
  const auto& instance = rep.instance;
  auto policy = make_policy(rep.policy, instance);
  const std::size_t batch = policy->samples_per_decision();
  if (rep.horizon % batch != 0) {
    throw std::domain_error("horizon must be a multiple of " +
                            std::to_string(batch) + " for policy " +
                            rep.policy.name);
  }
  for (std::size_t i = 0; i < rep.checkpoints.size(); ++i) {
    const auto c = rep.checkpoints[i];
    if (c < 1 || c > rep.horizon ||
        (i > 0 && c <= rep.checkpoints[i - 1])) {
      throw std::domain_error(
          "checkpoints must be increasing and lie in [1, horizon]");
    }
  }

  Rng env(derive_seed(rep.seed, 0));
  Rng policy_rng(derive_seed(rep.seed, 1));

  RegretTrace trace;
  trace.seed = rep.seed;
  trace.pulls_per_arm.assign(instance.size(), 0);
  trace.checkpoints.reserve(rep.checkpoints.size());

  const auto& gaps = instance.gaps();
  std::vector<double> rewards(batch);
  std::size_t next = 0;
  std::size_t t = 0;
  auto regret = [&] {
    double r = 0.0;
    for (std::size_t i = 0; i < gaps.size(); ++i) {
      r += gaps[i] * static_cast<double>(trace.pulls_per_arm[i]);
    }
    return r;
  };
  while (t < rep.horizon) {
    const auto decision = policy->decide(policy_rng);
    const auto& dist = instance.arm(decision.arm);
    for (std::size_t j = 0; j < batch; ++j) {
      rewards[j] = dist.sample(env);
      ++t;
      ++trace.pulls_per_arm[decision.arm];
      if (next < rep.checkpoints.size() && rep.checkpoints[next] == t) {
        trace.checkpoints.push_back({t, regret()});
        ++next;
      }
    }
    policy->observe(decision.arm, rewards);
  }
  trace.final_regret = regret();
  return trace;
}

namespace {

double forced_term(const BanditInstance& instance, double log_half) {
  double sum = 0.0;
  for (std::size_t i = 0; i < instance.size(); ++i) {
    const double gap = instance.gaps()[i];
    if (!(gap > 0.0)) {
      continue;
    }
    const double p = instance.arm(i).nonzero_mass();
    if (!(p > 0.0)) {
      return std::numeric_limits<double>::infinity();
    }
    sum += 24.0 * gap / p * log_half + 20.0 * gap;
  }
  return sum;
}

}  // namespace

double theorem_bound_instance_dependent(const BanditInstance& instance,
                                        double horizon) {
  const double eps = instance.params().epsilon;
  const double u = instance.params().u;
  const double log_half = std::log(horizon / 2.0);
  double sum = 0.0;
  for (std::size_t i = 0; i < instance.size(); ++i) {
    const double gap = instance.gaps()[i];
    if (gap > 0.0) {
      sum += 120.0 * std::pow(u / gap, 1.0 / eps) * log_half;
    }
  }
  return sum + forced_term(instance, log_half);
}

double theorem_bound_worst_case(const BanditInstance& instance,
                                double horizon) {
  const double eps = instance.params().epsilon;
  const double u = instance.params().u;
  const double log_half = std::log(horizon / 2.0);
  const auto k = static_cast<double>(instance.size());
  const double leading = 46.0 * std::pow(k * log_half, eps / (1.0 + eps)) *
                         std::pow(u * horizon, 1.0 / (1.0 + eps));
  return leading + forced_term(instance, log_half);
}

}  // namespace htband
