#include "htband/verification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "htband/rng.hpp"

namespace htband {

namespace {

void require_trials(std::size_t trials) {
  if (trials == 0) {
    throw std::domain_error("coverage check needs at least one trial");
  }
}

void draw(const RewardDistribution& dist, Rng& rng, std::vector<double>& out) {
  for (auto& x : out) {
    x = dist.sample(rng);
  }
}

double open_unit(Rng& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

bool within_rel(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::abs(b);
}

}  // namespace

CoverageReport finalize_report(CoverageReport r) {
  const std::size_t n = r.evaluated();
  if (n == 0) {
    r.empirical_rate = std::numeric_limits<double>::quiet_NaN();
    r.pass = false;
    return r;
  }
  r.empirical_rate =
      static_cast<double>(r.violations) / static_cast<double>(n);
  const double sigma = std::sqrt(r.nominal_rate * (1.0 - r.nominal_rate) /
                                 static_cast<double>(n));
  r.pass = r.empirical_rate <= r.nominal_rate + r.slack_sigmas * sigma;
  return r;
}

CoverageReport check_threshold_bound(const RewardDistribution& dist,
                                     const HeavyTailParams& params,
                                     std::size_t s, double delta, double c,
                                     std::size_t trials, std::uint64_t seed) {
  require_trials(trials);
  params.validate();
  if (!(c > 2.0)) {
    throw std::domain_error("threshold bound needs c > 2");
  }
  if (!(delta > 0.0 && delta < 0.5)) {
    throw std::domain_error("threshold bound needs delta in (0, 1/2)");
  }
  if (s < 1) {
    throw std::domain_error("threshold bound needs s >= 1");
  }
  const double log_inv = std::log(1.0 / delta);
  const double gap = std::sqrt(c) - std::sqrt(2.0);
  const double bound =
      std::pow(params.u * static_cast<double>(s) / (gap * gap * log_inv),
               1.0 / (1.0 + params.epsilon));
  ThresholdConfig cfg;
  cfg.c = c;

  CoverageReport r;
  r.suite = "threshold-bound";
  r.trials = trials;
  r.nominal_rate = 2.0 * delta;
  std::vector<double> book(s);
  for (std::size_t k = 0; k < trials; ++k) {
    Rng rng(derive_seed(seed, k));
    draw(dist, rng, book);
    const auto solve = solve_threshold(book, delta, cfg);
    if (!solve.exists) {
      ++r.skipped;
    } else if (solve.m_hat > bound) {
      ++r.violations;
    }
  }
  return finalize_report(r);
}

CoverageReport check_concentration(const RewardDistribution& dist,
                                   const HeavyTailParams& params,
                                   std::size_t s, double delta,
                                   std::size_t trials, std::uint64_t seed) {
  require_trials(trials);
  params.validate();
  if (s < 4 || s % 2 != 0) {
    throw std::domain_error("concentration check needs even s >= 4");
  }
  if (!(delta > 0.0 && delta < 0.25)) {
    throw std::domain_error("concentration check needs delta in (0, 1/4)");
  }
  const double width = conc_width_oracle(params, s, delta).adaptive;
  const double mu = dist.mean();
  const ThresholdConfig cfg;

  CoverageReport r;
  r.suite = "concentration";
  r.trials = trials;
  r.nominal_rate = 4.0 * delta;
  std::vector<double> mean_half(s / 2);
  std::vector<double> threshold_half(s / 2);
  for (std::size_t k = 0; k < trials; ++k) {
    Rng rng(derive_seed(seed, k));
    draw(dist, rng, mean_half);
    draw(dist, rng, threshold_half);
    const auto solve = solve_threshold(threshold_half, delta, cfg);
    if (!solve.exists) {
      ++r.skipped;
      continue;
    }
    if (std::abs(trimmed_mean(mean_half, solve.m_hat) - mu) > width) {
      ++r.violations;
    }
  }
  return finalize_report(r);
}

CoverageReport check_ucb_validity(const RewardDistribution& dist,
                                  std::size_t s, double delta,
                                  std::size_t trials, std::uint64_t seed,
                                  double c) {
  require_trials(trials);
  if (!dist.satisfies_truncated_nonpositivity()) {
    throw std::domain_error(
        "UCB validity needs a distribution with truncated non-positivity");
  }
  if (s < 2) {
    throw std::domain_error("UCB validity needs s >= 2");
  }
  if (!(delta > 0.0 && delta < 0.5)) {
    throw std::domain_error("UCB validity needs delta in (0, 1/2)");
  }
  ThresholdConfig cfg;
  cfg.c = c;
  cfg.validate();
  const double log_inv = std::log(1.0 / delta);
  const double mu = dist.mean();

  CoverageReport r;
  r.suite = "ucb-validity";
  r.trials = trials;
  r.nominal_rate = 2.0 * delta;
  std::vector<double> book_x(s);
  std::vector<double> book_x_prime(s);
  for (std::size_t k = 0; k < trials; ++k) {
    Rng rng(derive_seed(seed, k));
    draw(dist, rng, book_x);
    draw(dist, rng, book_x_prime);
    const auto solve = solve_threshold(book_x_prime, delta, cfg);
    if (!solve.exists) {
      ++r.skipped;
      continue;
    }
    const auto est = trimmed_estimate(book_x, solve.m_hat);
    if (mu - est.mean_hat > ucb_width_empirical(est, log_inv)) {
      ++r.violations;
    }
  }
  return finalize_report(r);
}

double bisection_oracle(std::span<const double> samples, double target,
                        double lo, double hi, double tol) {
  if (!(lo > 0.0 && hi > lo)) {
    throw std::domain_error("bisection needs 0 < lo < hi");
  }
  if (!(residual(samples, lo, target) > 0.0) ||
      !(residual(samples, hi, target) < 0.0)) {
    throw std::domain_error("bisection bracket does not straddle the root");
  }
  for (int iter = 0; iter < 4096 && hi - lo > tol * lo; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) {
      break;
    }
    if (residual(samples, mid, target) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::vector<RootCase> make_root_corpus(std::size_t count, std::uint64_t seed) {
  std::vector<RootCase> corpus;
  corpus.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    Rng rng(derive_seed(seed, k));
    RootCase c;
    const std::size_t size = 2 + static_cast<std::size_t>(rng.below(499));
    c.samples.reserve(size);
    std::size_t nonzero = 0;
    for (std::size_t j = 0; j < size; ++j) {
      const double kind = rng.uniform01();
      const double sign = rng.below(2) == 0 ? 1.0 : -1.0;
      double x = 0.0;
      if (kind < 0.15) {
        x = 0.0;
      } else if (kind < 0.35 && j > 0) {
        x = sign * std::abs(c.samples[rng.below(j)]);
      } else {
        x = sign * std::pow(10.0, -6.0 + 12.0 * rng.uniform01());
      }
      if (x != 0.0) {
        ++nonzero;
      }
      c.samples.push_back(x);
    }
    if (nonzero == 0) {
      c.samples.front() = 1.0;
      nonzero = 1;
    }
    c.target = static_cast<double>(nonzero) * open_unit(rng);
    corpus.push_back(std::move(c));
  }
  return corpus;
}

std::pair<double, double> root_bracket(const RootCase& c) {
  double smallest = std::numeric_limits<double>::infinity();
  double largest = 0.0;
  double squares = 0.0;
  for (double x : c.samples) {
    if (x != 0.0) {
      smallest = std::min(smallest, std::abs(x));
      largest = std::max(largest, std::abs(x));
      squares += x * x;
    }
  }
  return {0.5 * smallest, 2.0 * std::max(largest, std::sqrt(squares / c.target))};
}

SolverBenchResult run_solver_bench(std::span<const RootCase> corpus,
                                   std::uint64_t seed) {
  constexpr double kResidualTol = 1e-9;
  constexpr double kRootRel = 1e-9;
  constexpr double kScaleRel = 1e-12;

  SolverBenchResult out;
  out.exactness.suite = "root-exactness";
  out.doubling.suite = "doubling-ratio";
  out.properties.suite = "threshold-properties";
  for (auto* r : {&out.exactness, &out.doubling, &out.properties}) {
    r->trials = corpus.size();
    r->nominal_rate = 0.0;
  }

  const ThresholdConfig exact_cfg;
  ThresholdConfig doubling_cfg;
  doubling_cfg.solver = SolverKind::Doubling;

  for (std::size_t k = 0; k < corpus.size(); ++k) {
    const auto& c = corpus[k];
    const auto exact = solve_threshold_for_target(c.samples, c.target, exact_cfg);
    if (!exact.exists) {
      ++out.exactness.violations;
      ++out.doubling.violations;
      ++out.properties.violations;
      continue;
    }

    const auto [lo, hi] = root_bracket(c);
    const double oracle = bisection_oracle(c.samples, c.target, lo, hi, 1e-14);
    if (!(std::abs(exact.residual) <= kResidualTol) ||
        !within_rel(exact.m_hat, oracle, kRootRel)) {
      ++out.exactness.violations;
    }

    if (doubling_cfg.eta <= exact.m_hat) {
      const auto doubled =
          solve_threshold_for_target(c.samples, c.target, doubling_cfg);
      const double ratio = doubled.m_hat / exact.m_hat;
      if (!(ratio >= 1.0 - kRootRel && ratio <= 2.0 * (1.0 + kRootRel))) {
        ++out.doubling.violations;
      }
    } else {
      ++out.doubling.skipped;
    }

    bool ok = true;
    Rng rng(derive_seed(seed, k));
    const double alpha = std::exp(-5.0 + 10.0 * rng.uniform01());
    std::vector<double> scaled(c.samples);
    for (auto& x : scaled) {
      x *= alpha;
    }
    const auto scaled_root =
        solve_threshold_for_target(scaled, c.target, exact_cfg);
    ok = ok && scaled_root.exists &&
         within_rel(scaled_root.m_hat, alpha * exact.m_hat, kScaleRel);

    const double grid_lo = std::log(lo / 10.0);
    const double grid_hi = std::log(hi * 10.0);
    double previous = std::numeric_limits<double>::infinity();
    for (int g = 0; g < 100; ++g) {
      const double m = std::exp(grid_lo + (grid_hi - grid_lo) * g / 99.0);
      const double value = residual(c.samples, m, c.target);
      ok = ok && value <= previous;
      previous = value;
    }

    const auto n = static_cast<double>(exact.n_nonzero);
    for (double t : {0.0, -1.0, n, n + 0.5, 0.5 * c.target, c.target}) {
      const bool expected = t > 0.0 && t < n;
      ok = ok &&
           solve_threshold_for_target(c.samples, t, exact_cfg).exists == expected;
    }
    if (!ok) {
      ++out.properties.violations;
    }
  }
  out.exactness = finalize_report(out.exactness);
  out.doubling = finalize_report(out.doubling);
  out.properties = finalize_report(out.properties);
  return out;
}

}  // namespace htband

namespace htband {

namespace {

RewardDistribution u_adaptive_second_arm(double eps, double u, double gap) {
  LowerBoundParams p;
  p.epsilon = eps;
  p.u = u;
  p.gap_scale = gap;
  return make_lb_instance(LowerBoundKind::UAdaptiveBase, p).arm(1);
}

}  // namespace

CoverageReport run_default_threshold_bound(std::size_t trials,
                                           std::uint64_t seed) {
  const HeavyTailParams params{1.0, 1.0};
  return check_threshold_bound(u_adaptive_second_arm(1.0, 1.0, 0.5), params,
                               500, 0.05, kDefaultThresholdC, trials, seed);
}

CoverageReport run_default_concentration(std::size_t trials,
                                         std::uint64_t seed) {
  const HeavyTailParams params{0.5, 1.0};
  return check_concentration(u_adaptive_second_arm(0.5, 1.0, 0.5), params, 400,
                             0.05, trials, seed);
}

CoverageReport run_default_ucb_validity(std::size_t trials,
                                        std::uint64_t seed) {
  const HeavyTailParams params{1.0, 1.0};
  return check_ucb_validity(make_rho(0.3, 0.3, params), 200, 0.05, trials,
                            seed);
}

}  // namespace htband
