#include "htband/estimator.hpp"
#include "htband/rng.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

namespace htband {
namespace {

const double kInvE = std::exp(-1.0);

double delta_for_target(double target, double c = kDefaultThresholdC) {
  return std::exp(-target / c);
}

// Independent root finder: plain bisection on g(M) = target.
double bisect_root(const std::vector<double>& xs, double target) {
  auto g = [&](double m) {
    double s = 0.0;
    for (double x : xs) {
      s += std::min(x * x, m * m) / (m * m);
    }
    return s - target;
  };
  double lo = 1e-300;
  double hi = 1.0;
  while (g(hi) > 0) {
    hi *= 2;
  }
  for (int i = 0; i < 4000 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) > 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

TEST(TrimmedMean, Examples) {
  EXPECT_DOUBLE_EQ(trimmed_mean(std::vector<double>{1, 2, 3}, 10), 2.0);
  EXPECT_DOUBLE_EQ(trimmed_mean(std::vector<double>{1, 2, 100}, 10), 1.0);
  EXPECT_DOUBLE_EQ(trimmed_mean(std::vector<double>{-5, 5}, 4), 0.0);
  EXPECT_THROW(trimmed_mean(std::vector<double>{}, 1), std::domain_error);
}

TEST(TrimmedMean, BoundaryIsKept) {
  EXPECT_DOUBLE_EQ(trimmed_mean(std::vector<double>{-2, 2, 3}, 2), 0.0);
  EXPECT_DOUBLE_EQ(trimmed_mean(std::vector<double>{4}, 4), 4.0);
}

TEST(TrimmedVariance, Examples) {
  EXPECT_DOUBLE_EQ(trimmed_variance(std::vector<double>{1, 2, 3}, 10), 1.0);
  EXPECT_DOUBLE_EQ(trimmed_variance(std::vector<double>{1, 2, 100}, 10), 1.0);
  EXPECT_DOUBLE_EQ(trimmed_variance(std::vector<double>{3, 3}, 10), 0.0);
  EXPECT_THROW(trimmed_variance(std::vector<double>{1}, 1), std::domain_error);
}

TEST(Residual, Examples) {
  const std::vector<double> ones{1, 1, 1, 1};
  EXPECT_DOUBLE_EQ(residual(ones, 1.0, 2.0), 0.5);
  EXPECT_NEAR(residual(ones, std::sqrt(2.0), 2.0), 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(residual(std::vector<double>{0, 0, 0}, 1.0, 1.0), -1.0 / 3.0);
  EXPECT_THROW(residual(ones, 0.0, 1.0), std::domain_error);
}

TEST(SolveThreshold, Examples) {
  ThresholdConfig cfg;
  const std::vector<double> ones{1, 1, 1, 1};
  auto r = solve_threshold(ones, delta_for_target(2.0), cfg);
  ASSERT_TRUE(r.exists);
  EXPECT_NEAR(r.m_hat, std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(r.residual, 0.0, 1e-12);
  EXPECT_EQ(r.n_nonzero, 4u);

  r = solve_threshold_for_target(std::vector<double>{2, 0, 0, 0}, 0.5, cfg);
  ASSERT_TRUE(r.exists);
  EXPECT_NEAR(r.m_hat, 2.0 * std::sqrt(2.0), 1e-12);

  r = solve_threshold(std::vector<double>{0, 0, 0}, 0.5, cfg);
  EXPECT_FALSE(r.exists);
  EXPECT_TRUE(std::isnan(r.residual));
}

TEST(SolveThreshold, ExistenceBoundary) {
  ThresholdConfig cfg;
  const std::vector<double> xs{1, -2, 3};
  EXPECT_FALSE(solve_threshold_for_target(xs, 3.0, cfg).exists);
  EXPECT_TRUE(solve_threshold_for_target(xs, 2.999, cfg).exists);
  EXPECT_FALSE(solve_threshold_for_target(xs, 0.0, cfg).exists);
}

TEST(SolveThreshold, DoublingStaysWithinFactorTwo) {
  ThresholdConfig cfg;
  cfg.solver = SolverKind::Doubling;
  const std::vector<double> ones{1, 1, 1, 1};
  const auto r = solve_threshold_for_target(ones, 2.0, cfg);
  ASSERT_TRUE(r.exists);
  const double ratio = r.m_hat / std::sqrt(2.0);
  EXPECT_GE(ratio, 1.0);
  EXPECT_LE(ratio, 2.0);
  EXPECT_GT(r.iterations, 0u);
  EXPECT_LE(r.residual, 0.0);
}

TEST(SolveThreshold, SolverNames) {
  for (auto k : {SolverKind::ExactSegmentScan, SolverKind::Doubling}) {
    EXPECT_EQ(parse_solver_kind(to_string(k)), k);
  }
  EXPECT_FALSE(parse_solver_kind("newton"));
}

TEST(ThresholdTarget, Domain) {
  EXPECT_NEAR(threshold_target(kInvE, 2.0), 2.0, 1e-15);
  EXPECT_THROW(threshold_target(0.0, 2.0), std::domain_error);
  EXPECT_THROW(threshold_target(1.0, 2.0), std::domain_error);
}

TEST(NonadaptiveThreshold, Examples) {
  EXPECT_NEAR(nonadaptive_threshold({1.0, 1.0}, 100, kInvE), 10.0, 1e-12);
  EXPECT_NEAR(nonadaptive_threshold({1.0, 4.0}, 25, kInvE), 10.0, 1e-12);
  EXPECT_NEAR(nonadaptive_threshold({0.5, 1.0}, 8, kInvE), 4.0, 1e-12);
  EXPECT_THROW(nonadaptive_threshold({1.0, 1.0}, 10, 1.0), std::domain_error);
}

TEST(UcbWidth, Examples) {
  TrimmedEstimate e{0.0, 4.0, 2.0, 100};
  EXPECT_NEAR(ucb_width_empirical(e, 3.0), std::sqrt(0.24) + 0.6, 1e-12);
  EXPECT_NEAR(ucb_width_empirical(e, 3.0), 1.089898, 1e-6);
  TrimmedEstimate z{0.0, 0.0, 1.0, 10};
  EXPECT_EQ(ucb_width_empirical(z, 0.0), 0.0);
  TrimmedEstimate big{0.0, 1.0, 1.0, 1000000};
  EXPECT_NEAR(ucb_width_empirical(big, 3.0), std::sqrt(6e-6) + 3e-5, 1e-15);
}

TEST(ConcWidth, Examples) {
  auto w = conc_width_oracle({1.0, 1.0}, 100, kInvE);
  EXPECT_NEAR(w.adaptive, 0.8, 1e-12);
  EXPECT_NEAR(w.nonadaptive, 0.4, 1e-12);
  w = conc_width_oracle({1.0, 1.0}, 400, kInvE);
  EXPECT_NEAR(w.adaptive, 0.4, 1e-12);
  EXPECT_NEAR(w.nonadaptive, 0.2, 1e-12);
}

TEST(TrimmedEstimate, MatchesSeparateCalls) {
  const std::vector<double> xs{0.5, -3, 2, 7, 0, -1};
  const auto e = trimmed_estimate(xs, 3.0);
  EXPECT_EQ(e.n, xs.size());
  EXPECT_EQ(e.threshold, 3.0);
  EXPECT_DOUBLE_EQ(e.mean_hat, trimmed_mean(xs, 3.0));
  EXPECT_NEAR(e.variance_hat, trimmed_variance(xs, 3.0), 1e-14);
}

class EstimatorProperty : public ::testing::Test {
 protected:
  std::vector<double> random_samples(std::size_t n) {
    std::vector<double> xs;
    for (std::size_t i = 0; i < n; ++i) {
      const double u = rng_.uniform01();
      if (u < 0.2) {
        xs.push_back(0.0);
      } else if (u < 0.4 && !xs.empty()) {
        xs.push_back(-xs[rng_.below(xs.size())]);
      } else {
        const double mag = std::pow(10.0, -4.0 + 8.0 * rng_.uniform01());
        xs.push_back(rng_.uniform01() < 0.5 ? mag : -mag);
      }
    }
    return xs;
  }
  Rng rng_{31337};
};

TEST_F(EstimatorProperty, ScalingAlphaScalesThreshold) {
  ThresholdConfig cfg;
  for (int rep = 0; rep < 200; ++rep) {
    auto xs = random_samples(2 + rng_.below(200));
    std::size_t nz = 0;
    for (double x : xs) {
      nz += x != 0.0;
    }
    if (nz == 0) {
      continue;
    }
    const double target = nz * (0.01 + 0.98 * rng_.uniform01());
    const auto base = solve_threshold_for_target(xs, target, cfg);
    ASSERT_TRUE(base.exists);
    const double alpha = std::exp(-5.0 + 10.0 * rng_.uniform01());
    std::vector<double> scaled;
    for (double x : xs) {
      scaled.push_back(alpha * x);
    }
    const auto s = solve_threshold_for_target(scaled, target, cfg);
    ASSERT_TRUE(s.exists);
    EXPECT_NEAR(s.m_hat / (alpha * base.m_hat), 1.0, 1e-12);
    EXPECT_NEAR(trimmed_mean(scaled, s.m_hat) / alpha,
                trimmed_mean(xs, base.m_hat),
                1e-9 * (1.0 + std::fabs(base.m_hat)));
  }
}

TEST_F(EstimatorProperty, ScalingExampleSqrtTwo) {
  ThresholdConfig cfg;
  const std::vector<double> xs{2, 2, 2, 2};
  const auto r = solve_threshold_for_target(xs, 2.0, cfg);
  EXPECT_NEAR(r.m_hat, 2.0 * std::sqrt(2.0), 1e-12);
}

TEST_F(EstimatorProperty, ExactRootAgreesWithBisection) {
  ThresholdConfig exact;
  ThresholdConfig dbl;
  dbl.solver = SolverKind::Doubling;
  for (int rep = 0; rep < 300; ++rep) {
    auto xs = random_samples(1 + rng_.below(150));
    std::size_t nz = 0;
    for (double x : xs) {
      nz += x != 0.0;
    }
    if (nz == 0) {
      EXPECT_FALSE(solve_threshold_for_target(xs, 0.5, exact).exists);
      continue;
    }
    const double target = nz * (0.001 + 0.998 * rng_.uniform01());
    const auto r = solve_threshold_for_target(xs, target, exact);
    ASSERT_TRUE(r.exists);
    const double b = bisect_root(xs, target);
    EXPECT_NEAR(r.m_hat / b, 1.0, 1e-9);
    EXPECT_NEAR(r.residual, 0.0, 1e-9);

    const auto d = solve_threshold_for_target(xs, target, dbl);
    ASSERT_TRUE(d.exists);
    EXPECT_GE(d.m_hat / r.m_hat, 1.0 - 1e-9);
    EXPECT_LE(d.m_hat / r.m_hat, 2.0 * (1.0 + 1e-9));
  }
}

TEST_F(EstimatorProperty, ResidualMonotoneAndFlatNearZero) {
  for (int rep = 0; rep < 100; ++rep) {
    auto xs = random_samples(1 + rng_.below(100));
    double min_nz = INFINITY;
    for (double x : xs) {
      if (x != 0.0) {
        min_nz = std::min(min_nz, std::fabs(x));
      }
    }
    const double target = 1.0;
    double prev = INFINITY;
    for (int i = 0; i <= 100; ++i) {
      const double m = std::pow(10.0, -6.0 + 12.0 * i / 100.0);
      const double r = residual(xs, m, target);
      EXPECT_LE(r, prev + 1e-12);
      prev = r;
      if (m <= min_nz) {
        double nz = 0;
        for (double x : xs) {
          nz += x != 0.0;
        }
        EXPECT_NEAR(r, (nz - target) / xs.size(), 1e-12);
      }
    }
    EXPECT_NEAR(residual(xs, 1e100, target), -target / xs.size(), 1e-12);
  }
}

}  // namespace
}  // namespace htband
