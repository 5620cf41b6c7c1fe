#include "htband/policies.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace htband {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

PolicyDecision decide_from(std::vector<double> indices) {
  PolicyDecision d;
  d.arm = argmax_lowest(indices);
  d.forced = std::isinf(indices[d.arm]) && indices[d.arm] > 0.0;
  d.indices = std::move(indices);
  return d;
}

}  // namespace

void SampleBook::add(double x) {
  values_.push_back(x);
  index_.insert(x);
}

TrimmedEstimate SampleBook::trimmed(double m) const {
  if (values_.size() < 2) {
    throw std::domain_error("trimmed estimate needs at least two samples");
  }
  const auto kept = index_.below(m, true);
  const auto s = static_cast<double>(values_.size());
  const double mean = kept.sum / s;
  const double var = (kept.sum_sq - s * mean * mean) / (s - 1.0);
  return {mean, var > 0.0 ? var : 0.0, m, values_.size()};
}

ThresholdSolve SampleBook::solve(double target,
                                 const ThresholdConfig& cfg) const {
  ThresholdSolve out;
  out.target = target;
  out.n_nonzero = index_.nonzero_count();
  out.exists = target > 0.0 && target < static_cast<double>(out.n_nonzero);
  if (!out.exists) {
    out.residual = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  const auto s = static_cast<double>(values_.size());
  if (cfg.solver == SolverKind::ExactSegmentScan) {
    out.m_hat = index_.solve_root(target);
    out.residual = (index_.clipped_ratio_sum(out.m_hat) - target) / s;
    return out;
  }
  double x = cfg.eta;
  double y = index_.clipped_ratio_sum(x) - target;
  while (y > 0.0 && std::isfinite(x)) {
    x *= 2.0;
    y = index_.clipped_ratio_sum(x) - target;
    ++out.iterations;
  }
  out.m_hat = x;
  out.residual = y / s;
  return out;
}

void ArmState::record(double x, double x_prime) {
  book_x_.add(x);
  book_x_prime_.add(x_prime);
  if (x_prime != 0.0) {
    ++nonzero_;
  }
  cached_.reset();
}

std::size_t argmax_lowest(std::span<const double> indices) {
  if (indices.empty()) {
    throw std::domain_error("argmax of an empty index set");
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < indices.size(); ++i) {
    if (indices[i] > indices[best]) {
      best = i;
    }
  }
  return best;
}

void AdaRucbConfig::validate() const {
  threshold.validate();
  if (!(guard_c >= threshold.c)) {
    throw std::domain_error("guard_c must be >= threshold c");
  }
}

PolicyDecision adarucb_round(std::span<ArmState> states, std::size_t tau,
                             const AdaRucbConfig& cfg) {
  if (tau < 1) {
    throw std::domain_error("round counter starts at 1");
  }
  const double log_term = 3.0 * std::log(static_cast<double>(tau));
  const double target = cfg.threshold.c * log_term;
  std::vector<double> indices(states.size(), kInf);
  for (std::size_t i = 0; i < states.size(); ++i) {
    auto& arm = states[i];
    if (arm.pulls() == 0 ||
        static_cast<double>(arm.nonzero_count()) <= cfg.guard_c * log_term) {
      continue;
    }
    const auto solve = arm.book_x_prime().solve(target, cfg.threshold);
    if (!solve.exists) {
      throw std::logic_error(
          "threshold root missing although the exploration guard passed");
    }
    const auto est = arm.book_x().trimmed(solve.m_hat);
    indices[i] = est.mean_hat + ucb_width_empirical(est, log_term);
    arm.set_cached({tau, solve, est});
  }
  return decide_from(std::move(indices));
}

void adarucb_update(std::span<ArmState> states, std::size_t arm,
                    std::pair<double, double> rewards) {
  if (arm >= states.size()) {
    throw std::out_of_range("arm index out of range");
  }
  states[arm].record(rewards.first, rewards.second);
}

double default_robust_delta(std::size_t t) {
  const auto x = static_cast<double>(t);
  return 1.0 / (x * x);
}

PolicyDecision robustucb_tm_round(std::span<const SampleBook> books,
                                  std::size_t t, const HeavyTailParams& params,
                                  const DeltaSchedule& schedule) {
  std::vector<double> indices(books.size(), kInf);
  const double eps = params.epsilon;
  const double scale = std::pow(params.u, 1.0 / (1.0 + eps));
  double log_inv = 0.0;
  for (std::size_t i = 0; i < books.size(); ++i) {
    if (books[i].size() == 0) {
      continue;
    }
    if (log_inv == 0.0) {
      log_inv = std::log(1.0 / schedule(t));
      if (!(log_inv > 0.0)) {
        throw std::domain_error("confidence schedule must stay in (0,1)");
      }
    }
    const auto n = static_cast<double>(books[i].size());
    const double m = std::pow(params.u * n / log_inv, 1.0 / (1.0 + eps));
    const double mean = books[i].index().below(m, true).sum / n;
    indices[i] = mean + 4.0 * scale * std::pow(log_inv / n, eps / (1.0 + eps));
  }
  return decide_from(std::move(indices));
}

PolicyDecision uniform_round(std::size_t num_arms, Rng& rng) {
  if (num_arms == 0) {
    throw std::domain_error("uniform policy needs at least one arm");
  }
  PolicyDecision d;
  d.arm = static_cast<std::size_t>(rng.below(num_arms));
  d.indices.assign(num_arms, 0.0);
  d.indices[d.arm] = 1.0;
  return d;
}

AdaRucbPolicy::AdaRucbPolicy(std::size_t num_arms, AdaRucbConfig cfg)
    : states_(num_arms), cfg_(cfg) {
  if (num_arms == 0) {
    throw std::domain_error("policy needs at least one arm");
  }
  cfg_.validate();
}

PolicyDecision AdaRucbPolicy::decide(Rng&) {
  return adarucb_round(states_, tau_, cfg_);
}

void AdaRucbPolicy::observe(std::size_t arm, std::span<const double> rewards) {
  if (rewards.size() != 2) {
    throw std::invalid_argument("AdaR-UCB observes reward pairs");
  }
  adarucb_update(states_, arm, {rewards[0], rewards[1]});
  ++tau_;
}

RobustUcbTmPolicy::RobustUcbTmPolicy(std::size_t num_arms,
                                     HeavyTailParams params,
                                     DeltaSchedule schedule)
    : books_(num_arms), params_(params), schedule_(std::move(schedule)) {
  if (num_arms == 0) {
    throw std::domain_error("policy needs at least one arm");
  }
  params_.validate();
  if (!(params_.u > 0.0)) {
    throw std::domain_error("robustucb-tm needs u > 0");
  }
}

PolicyDecision RobustUcbTmPolicy::decide(Rng&) {
  return robustucb_tm_round(books_, t_, params_, schedule_);
}

void RobustUcbTmPolicy::observe(std::size_t arm,
                                std::span<const double> rewards) {
  for (double r : rewards) {
    books_.at(arm).add(r);
    ++t_;
  }
}

UniformPolicy::UniformPolicy(std::size_t num_arms) : num_arms_(num_arms) {
  if (num_arms == 0) {
    throw std::domain_error("policy needs at least one arm");
  }
}

PolicyDecision UniformPolicy::decide(Rng& rng) {
  return uniform_round(num_arms_, rng);
}

std::unique_ptr<Policy> make_policy(const PolicySpec& spec,
                                    const BanditInstance& instance) {
  if (spec.name == "adarucb") {
    return std::make_unique<AdaRucbPolicy>(instance.size(), spec.adarucb);
  }
  if (spec.name == "robustucb-tm") {
    return std::make_unique<RobustUcbTmPolicy>(instance.size(),
                                               instance.params());
  }
  if (spec.name == "uniform") {
    return std::make_unique<UniformPolicy>(instance.size());
  }
  throw std::invalid_argument("unknown policy '" + spec.name + "'");
}

}  // namespace htband
