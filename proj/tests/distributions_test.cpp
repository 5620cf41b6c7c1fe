#include "htband/distributions.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace htband {
namespace {

LowerBoundParams lb(double eps, double u, double gap) {
  LowerBoundParams p;
  p.epsilon = eps;
  p.u = u;
  p.gap_scale = gap;
  return p;
}

TEST(HeavyTailParams, Validation) {
  EXPECT_NO_THROW((HeavyTailParams{1.0, 0.0}.validate()));
  EXPECT_NO_THROW((HeavyTailParams{0.01, 3.0}.validate()));
  EXPECT_THROW((HeavyTailParams{0.0, 1.0}.validate()), std::domain_error);
  EXPECT_THROW((HeavyTailParams{1.5, 1.0}.validate()), std::domain_error);
  EXPECT_THROW((HeavyTailParams{0.5, -1.0}.validate()), std::domain_error);
}

TEST(RewardDistribution, RejectsBadMasses) {
  EXPECT_THROW(RewardDistribution({{0.0, 0.5}, {1.0, 0.4}}), std::domain_error);
  EXPECT_THROW(RewardDistribution({{0.0, 1.2}, {1.0, -0.2}}), std::domain_error);
  EXPECT_THROW(RewardDistribution(std::vector<Atom>{}), std::domain_error);
}

TEST(RewardDistribution, PointMassAtZero) {
  const auto d = RewardDistribution::point_mass(0.0);
  EXPECT_EQ(d.kind(), DistributionKind::PointMass);
  EXPECT_EQ(d.moment(1.5), 0.0);
  EXPECT_EQ(d.mean(), 0.0);
  EXPECT_EQ(d.nonzero_mass(), 0.0);
  EXPECT_TRUE(d.satisfies_truncated_nonpositivity());
}

TEST(RewardDistribution, MomentIsClosedForm) {
  const RewardDistribution d({{-2.0, 0.25}, {0.0, 0.5}, {3.0, 0.25}});
  EXPECT_DOUBLE_EQ(d.moment(2.0), 0.25 * 4 + 0.25 * 9);
  EXPECT_DOUBLE_EQ(d.moment(1.0), 0.25 * 2 + 0.25 * 3);
  EXPECT_DOUBLE_EQ(d.mean(), 0.25);
  EXPECT_DOUBLE_EQ(d.nonzero_mass(), 0.5);
  EXPECT_THROW(d.moment(0.0), std::domain_error);
}

TEST(TruncatedNonPositivity, Cases) {
  EXPECT_TRUE(RewardDistribution({{-1.0, 0.3}, {-5.0, 0.2}, {0.0, 0.5}})
                  .satisfies_truncated_nonpositivity());
  // Positive tail beyond the large negative atom.
  EXPECT_FALSE(RewardDistribution({{-1.0, 0.5}, {2.0, 0.5}})
                   .satisfies_truncated_nonpositivity());
  // Tail above 1 is -5*0.5 <= 0, tail at 0 is 1*0.5 - 2.5 <= 0.
  EXPECT_TRUE(RewardDistribution({{1.0, 0.5}, {-5.0, 0.5}})
                  .satisfies_truncated_nonpositivity());
  // Symmetric pair cancels exactly at every threshold.
  EXPECT_TRUE(RewardDistribution({{-2.0, 0.5}, {2.0, 0.5}})
                  .satisfies_truncated_nonpositivity());
  // Tail above 1 is -0.3 but the full sum 0.9 - 0.3 is positive.
  EXPECT_FALSE(RewardDistribution({{1.0, 0.9}, {-3.0, 0.1}})
                   .satisfies_truncated_nonpositivity());
}

TEST(LowerBoundInstances, UAdaptiveBase) {
  const auto inst = make_lb_instance(LowerBoundKind::UAdaptiveBase, lb(1, 1, 0.5));
  ASSERT_EQ(inst.size(), 2u);
  EXPECT_EQ(inst.means()[0], 0.0);
  EXPECT_NEAR(inst.means()[1], 0.5, 1e-12);
  EXPECT_EQ(inst.optimal_arm(), 1u);
  // 0.75 delta_0 + 0.25 delta_2
  const auto& atoms = inst.arm(1).atoms();
  EXPECT_NEAR(atoms[0].mass, 0.75, 1e-12);
  EXPECT_NEAR(atoms[1].value, 2.0, 1e-12);
  EXPECT_NEAR(inst.arm(1).nonzero_mass(), 0.25, 1e-12);
  EXPECT_FALSE(inst.arm(1).satisfies_truncated_nonpositivity());
}

TEST(LowerBoundInstances, UAdaptiveMomentEqualsU) {
  const auto inst =
      make_lb_instance(LowerBoundKind::UAdaptiveBase, lb(0.5, 1.0, 0.5));
  EXPECT_NEAR(inst.arm(1).moment(1.5), 1.0, 1e-12);
  EXPECT_NEAR(inst.arm(1).mean(), 0.5, 1e-12);
}

TEST(LowerBoundInstances, UAdaptiveAlt) {
  auto p = lb(0.5, 1.0, 0.2);
  p.u_alt = 4.0;
  const auto inst = make_lb_instance(LowerBoundKind::UAdaptiveAlt, p);
  EXPECT_NEAR(inst.means()[0], 0.4, 1e-12);
  EXPECT_NEAR(inst.means()[1], 0.2, 1e-12);
  EXPECT_EQ(inst.optimal_arm(), 0u);
  EXPECT_NEAR(inst.arm(0).moment(1.5), 4.0, 1e-12);
  EXPECT_NEAR(inst.arm(1).moment(1.5), 1.0, 1e-12);
  EXPECT_EQ(inst.params().u, 4.0);
  p.u_alt = 0.5;
  EXPECT_THROW(make_lb_instance(LowerBoundKind::UAdaptiveAlt, p),
               std::domain_error);
}

TEST(LowerBoundInstances, EpsAdaptiveBase) {
  const auto inst =
      make_lb_instance(LowerBoundKind::EpsAdaptiveBase, lb(0.5, 1.0, 0.25));
  // gamma = 0.25, nonzero mass gamma^1.5 - Delta gamma = 0.0625 at 4.
  const auto& atoms = inst.arm(1).atoms();
  EXPECT_NEAR(atoms[1].value, 4.0, 1e-12);
  EXPECT_NEAR(atoms[1].mass, 0.0625, 1e-12);
  EXPECT_NEAR(inst.means()[1], 0.25, 1e-12);
  EXPECT_EQ(inst.optimal_arm(), 1u);
  // E|X|^alpha = 2^{(1-alpha)/eps} Delta^{(1+eps-alpha)/eps}
  for (double alpha : {1.0, 1.2, 1.5}) {
    EXPECT_NEAR(inst.arm(1).moment(alpha),
                std::pow(2.0, (1 - alpha) / 0.5) *
                    std::pow(0.25, (1.5 - alpha) / 0.5),
                1e-12);
  }
}

TEST(LowerBoundInstances, EpsAdaptiveAlt) {
  auto p = lb(1.0, 1.0, 0.2);
  p.epsilon_alt = 1.0 / 3.0;
  const auto inst = make_lb_instance(LowerBoundKind::EpsAdaptiveAlt, p);
  EXPECT_NEAR(inst.means()[0], 0.4, 1e-12);
  EXPECT_NEAR(inst.means()[1], 0.2, 1e-12);
  EXPECT_EQ(inst.optimal_arm(), 0u);
  EXPECT_DOUBLE_EQ(inst.params().epsilon, 1.0 / 3.0);
  // (2 Delta)^{(1+eps'-alpha)/eps'}
  EXPECT_NEAR(inst.arm(0).moment(4.0 / 3.0), 1.0, 1e-12);
  EXPECT_NEAR(inst.arm(0).moment(1.2),
              std::pow(0.4, (4.0 / 3.0 - 1.2) * 3.0), 1e-12);
  p.epsilon_alt = 1.0;
  EXPECT_THROW(make_lb_instance(LowerBoundKind::EpsAdaptiveAlt, p),
               std::domain_error);
}

TEST(LowerBoundInstances, Rho) {
  const HeavyTailParams hp{1.0, 1.0};
  const auto rho = make_rho(0.3, 0.3, hp);
  EXPECT_NEAR(rho.nonzero_mass(), 0.09, 1e-12);
  EXPECT_NEAR(rho.moment(2.0), 1.0, 1e-12);
  EXPECT_NEAR(rho.mean(), -0.3, 1e-12);
  EXPECT_TRUE(rho.satisfies_truncated_nonpositivity());
  const HeavyTailParams hp2{0.5, 2.0};
  const double y = 0.4;
  const double gap = 0.7;
  const auto r2 = make_rho(y, gap, hp2);
  EXPECT_NEAR(r2.mean(), -std::pow(y, 3.0) * std::pow(gap, -2.0), 1e-12);
  EXPECT_NEAR(r2.moment(1.5), std::pow(y, 3.0) * std::pow(gap, -3.0) * 2.0,
              1e-12);
  EXPECT_THROW(make_rho(0.5, 0.4, hp), std::domain_error);
  EXPECT_THROW(make_rho(0.3, 1.0, hp), std::domain_error);
}

TEST(LowerBoundInstances, AssumptionLb) {
  auto p = lb(1.0, 1.0, 0.3);
  p.num_arms = 2;
  const auto inst = make_lb_instance(LowerBoundKind::AssumptionLb, p);
  EXPECT_NEAR(inst.means()[0], -0.2, 1e-12);
  EXPECT_NEAR(inst.means()[1], -0.3, 1e-12);
  EXPECT_EQ(inst.optimal_arm(), 0u);
  EXPECT_NEAR(inst.gaps()[1], 0.1, 1e-12);
  EXPECT_EQ(inst.gaps()[0], 0.0);
  for (const auto& arm : inst.arms()) {
    EXPECT_TRUE(arm.satisfies_truncated_nonpositivity());
    EXPECT_EQ(arm.kind(), DistributionKind::NegativeDiracMixture);
  }
}

TEST(LowerBoundInstances, AssumptionLbAlternativeArm) {
  auto p = lb(0.5, 2.0, 0.6);
  p.num_arms = 4;
  p.alt_arm = 2;
  const auto inst = make_lb_instance(LowerBoundKind::AssumptionLb, p);
  EXPECT_NEAR(inst.means()[0], -2.0 * 0.6 / 3.0, 1e-12);
  EXPECT_NEAR(inst.means()[1], -0.6, 1e-12);
  EXPECT_NEAR(inst.means()[2], -0.6 / 3.0, 1e-12);
  EXPECT_EQ(inst.optimal_arm(), 2u);
  p.alt_arm = 4;
  EXPECT_THROW(make_lb_instance(LowerBoundKind::AssumptionLb, p),
               std::domain_error);
}

TEST(LowerBoundInstances, DomainErrors) {
  EXPECT_THROW(make_lb_instance(LowerBoundKind::UAdaptiveBase, lb(1, 1, 1.0)),
               std::domain_error);
  EXPECT_THROW(make_lb_instance(LowerBoundKind::EpsAdaptiveBase, lb(1, 1, 0.6)),
               std::domain_error);
  EXPECT_THROW(make_lb_instance(LowerBoundKind::AssumptionLb, lb(1, 1, 0.0)),
               std::domain_error);
  auto p = lb(1, 1, 0.3);
  p.num_arms = 1;
  EXPECT_THROW(make_lb_instance(LowerBoundKind::AssumptionLb, p),
               std::domain_error);
}

TEST(LowerBoundInstances, KindNames) {
  for (auto k : {LowerBoundKind::UAdaptiveBase, LowerBoundKind::UAdaptiveAlt,
                 LowerBoundKind::EpsAdaptiveBase, LowerBoundKind::EpsAdaptiveAlt,
                 LowerBoundKind::AssumptionLb}) {
    EXPECT_EQ(parse_lower_bound_kind(to_string(k)), k);
  }
  EXPECT_FALSE(parse_lower_bound_kind("pareto"));
}

TEST(BanditInstance, RejectsMomentViolation) {
  std::vector<RewardDistribution> arms{RewardDistribution({{0.0, 0.5}, {2.0, 0.5}})};
  EXPECT_THROW(BanditInstance(arms, HeavyTailParams{1.0, 1.0}), std::domain_error);
  EXPECT_NO_THROW(BanditInstance(arms, HeavyTailParams{1.0, 2.0}));
}

TEST(BanditInstance, TiesPickLowestOptimalArm) {
  const BanditInstance inst({RewardDistribution::point_mass(0.5),
                             RewardDistribution::point_mass(0.5),
                             RewardDistribution::point_mass(0.1)},
                            HeavyTailParams{1.0, 1.0});
  EXPECT_EQ(inst.optimal_arm(), 0u);
  EXPECT_EQ(inst.gaps()[1], 0.0);
  EXPECT_DOUBLE_EQ(inst.gaps()[2], 0.4);
}

// Every construction: masses sum to 1 and the class moment bound holds.
TEST(LowerBoundInstances, PropertyMassAndMomentBound) {
  Rng rng(17);
  for (int trial = 0; trial < 300; ++trial) {
    LowerBoundParams p;
    p.epsilon = 0.05 + 0.95 * rng.uniform01();
    p.u = 0.1 + 10.0 * rng.uniform01();
    p.u_alt = p.u * (1.0 + 4.0 * rng.uniform01());
    p.epsilon_alt = p.epsilon * (0.05 + 0.9 * rng.uniform01());
    p.num_arms = 2 + rng.below(5);
    const double limit = std::pow(p.u, 1.0 / (1.0 + p.epsilon));
    for (auto kind :
         {LowerBoundKind::UAdaptiveBase, LowerBoundKind::UAdaptiveAlt,
          LowerBoundKind::EpsAdaptiveBase, LowerBoundKind::EpsAdaptiveAlt,
          LowerBoundKind::AssumptionLb}) {
      double hi = limit;
      if (kind == LowerBoundKind::UAdaptiveAlt) {
        hi = std::min(limit, 0.5 * std::pow(p.u_alt, 1.0 / (1.0 + p.epsilon)));
      } else if (kind == LowerBoundKind::EpsAdaptiveBase ||
                 kind == LowerBoundKind::EpsAdaptiveAlt) {
        hi = 0.5;
      }
      p.gap_scale = hi * (0.01 + 0.98 * rng.uniform01());
      const auto inst = make_lb_instance(kind, p);
      const double order = 1.0 + inst.params().epsilon;
      for (const auto& arm : inst.arms()) {
        double total = 0.0;
        for (const auto& a : arm.atoms()) {
          EXPECT_GE(a.mass, 0.0);
          total += a.mass;
        }
        EXPECT_NEAR(total, 1.0, 1e-12);
        EXPECT_LE(arm.moment(order), inst.params().u + 1e-9);
      }
      if (kind == LowerBoundKind::AssumptionLb) {
        for (const auto& arm : inst.arms()) {
          EXPECT_TRUE(arm.satisfies_truncated_nonpositivity());
        }
        EXPECT_EQ(inst.optimal_arm(), 0u);
      } else if (kind == LowerBoundKind::UAdaptiveBase ||
                 kind == LowerBoundKind::EpsAdaptiveBase) {
        EXPECT_EQ(inst.optimal_arm(), 1u);
      } else {
        EXPECT_EQ(inst.optimal_arm(), 0u);
      }
    }
  }
}

// Empirical mean of 10^6 draws within 5 standard errors of the exact mean.
TEST(RewardDistribution, MonteCarloMeanConsistency) {
  auto p = lb(1.0, 1.0, 0.3);
  p.num_arms = 2;
  std::vector<RewardDistribution> dists{
      make_lb_instance(LowerBoundKind::UAdaptiveBase, lb(1.0, 1.0, 0.5)).arm(1),
      make_lb_instance(LowerBoundKind::EpsAdaptiveBase, lb(0.5, 1.0, 0.25)).arm(1),
      make_lb_instance(LowerBoundKind::AssumptionLb, p).arm(0),
      RewardDistribution({{-3.0, 0.2}, {0.5, 0.3}, {1.0, 0.5}}),
  };
  Rng rng(2024);
  const int n = 1000000;
  for (const auto& d : dists) {
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      sum += d.sample(rng);
    }
    const double se = std::sqrt(d.variance() / n);
    EXPECT_NEAR(sum / n, d.mean(), 5.0 * se) << d.label();
  }
}

TEST(RewardDistribution, SamplingSkipsZeroMassAtoms) {
  const RewardDistribution d({{7.0, 0.0}, {1.0, 1.0}, {9.0, 0.0}});
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    EXPECT_EQ(d.sample(rng), 1.0);
  }
}

}  // namespace
}  // namespace htband
