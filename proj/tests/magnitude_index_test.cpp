#include "htband/magnitude_index.hpp"
#include "htband/rng.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

namespace htband {
namespace {

MagnitudeAggregate brute_below(const std::vector<double>& xs, double m,
                               bool inclusive) {
  MagnitudeAggregate a;
  for (double x : xs) {
    const double ax = std::fabs(x);
    if (inclusive ? ax <= m : ax < m) {
      ++a.count;
      a.sum += x;
      a.sum_sq += x * x;
    }
  }
  return a;
}

double brute_g(const std::vector<double>& xs, double m) {
  double g = 0.0;
  for (double x : xs) {
    g += std::min(x * x, m * m) / (m * m);
  }
  return g;
}

double draw(Rng& rng, const std::vector<double>& pool) {
  const double u = rng.uniform01();
  if (u < 0.15) {
    return 0.0;
  }
  if (u < 0.35 && !pool.empty()) {
    const double v = pool[rng.below(pool.size())];
    return rng.uniform01() < 0.5 ? v : -v;
  }
  const double mag = std::pow(10.0, -3.0 + 6.0 * rng.uniform01());
  return rng.uniform01() < 0.5 ? mag : -mag;
}

TEST(MagnitudeIndex, Empty) {
  MagnitudeIndex idx;
  EXPECT_EQ(idx.size(), 0u);
  EXPECT_EQ(idx.total().count, 0u);
  EXPECT_EQ(idx.below(1.0, true).count, 0u);
  EXPECT_EQ(idx.clipped_ratio_sum(1.0), 0.0);
}

TEST(MagnitudeIndex, SmallExample) {
  MagnitudeIndex idx;
  for (double x : {2.0, 0.0, 0.0, 0.0}) {
    idx.insert(x);
  }
  EXPECT_EQ(idx.zero_count(), 3u);
  EXPECT_EQ(idx.nonzero_count(), 1u);
  EXPECT_NEAR(idx.solve_root(0.5), 2.0 * std::sqrt(2.0), 1e-15);
  EXPECT_DOUBLE_EQ(idx.clipped_ratio_sum(1.0), 1.0);
  EXPECT_DOUBLE_EQ(idx.clipped_ratio_sum(4.0), 0.25);
}

TEST(MagnitudeIndex, TiedMagnitudesWithOppositeSigns) {
  MagnitudeIndex idx;
  for (double x : {1.0, -1.0, 1.0, -1.0}) {
    idx.insert(x);
  }
  EXPECT_EQ(idx.below(1.0, true).count, 4u);
  EXPECT_EQ(idx.below(1.0, false).count, 0u);
  EXPECT_DOUBLE_EQ(idx.below(1.0, true).sum, 0.0);
  EXPECT_NEAR(idx.solve_root(2.0), std::sqrt(2.0), 1e-15);
}

TEST(MagnitudeIndex, MatchesBruteForce) {
  Rng rng(77);
  for (int rep = 0; rep < 40; ++rep) {
    MagnitudeIndex idx;
    std::vector<double> xs;
    const int n = 1 + static_cast<int>(rng.below(400));
    for (int i = 0; i < n; ++i) {
      const double x = draw(rng, xs);
      xs.push_back(x);
      idx.insert(x);
    }
    ASSERT_EQ(idx.size(), xs.size());
    const auto tot = idx.total();
    const auto bt = brute_below(xs, INFINITY, true);
    EXPECT_EQ(tot.count, bt.count);
    EXPECT_NEAR(tot.sum, bt.sum, 1e-9 * (1 + bt.sum_sq));
    EXPECT_NEAR(tot.sum_sq, bt.sum_sq, 1e-12 * bt.sum_sq);

    for (int q = 0; q < 30; ++q) {
      // Query both at sample magnitudes and at arbitrary points.
      const double m = q % 2 == 0 ? std::fabs(xs[rng.below(xs.size())])
                                  : std::pow(10.0, -4.0 + 8.0 * rng.uniform01());
      for (bool inclusive : {false, true}) {
        const auto a = idx.below(m, inclusive);
        const auto b = brute_below(xs, m, inclusive);
        EXPECT_EQ(a.count, b.count);
        EXPECT_NEAR(a.sum, b.sum, 1e-9 * (1 + b.sum_sq));
        EXPECT_NEAR(a.sum_sq, b.sum_sq, 1e-12 * (1 + b.sum_sq));
      }
      if (m > 0) {
        const double g = brute_g(xs, m);
        EXPECT_NEAR(idx.clipped_ratio_sum(m), g, 1e-10 * (1 + g));
      }
    }

    const std::size_t nz = idx.nonzero_count();
    if (nz >= 1) {
      const double target = nz * (0.01 + 0.98 * rng.uniform01());
      const double root = idx.solve_root(target);
      ASSERT_GT(root, 0.0);
      EXPECT_NEAR(brute_g(xs, root), target, 1e-9 * target);
    }
  }
}

}  // namespace
}  // namespace htband
