#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace htband {

/// Running totals over a subset of stored samples.
struct MagnitudeAggregate {
  std::size_t count = 0;
  double sum = 0.0;     // sum of signed values
  double sum_sq = 0.0;  // sum of squares
};

/// Insert-only multiset of reals ordered by magnitude, with prefix
/// aggregates.
///
/// Backed by a treap over distinct magnitudes; each node carries the
/// aggregate of its subtree, so inserts, prefix queries and the threshold
/// root descent are all O(log d) for d distinct magnitudes. Priorities come
/// from a fixed SplitMix64 stream, so the tree shape (and hence the summation
/// order) is a deterministic function of the insertion sequence.
class MagnitudeIndex {
 public:
  void insert(double x);

  std::size_t size() const noexcept;
  std::size_t zero_count() const noexcept { return zeros_; }
  std::size_t nonzero_count() const noexcept { return size() - zeros_; }
  MagnitudeAggregate total() const noexcept;

  /// Aggregate of samples with |x| < m, or |x| <= m when `inclusive`.
  MagnitudeAggregate below(double m, bool inclusive) const noexcept;

  /// sum_j min{x_j^2, m^2}/m^2, i.e. s * residual + target. Requires m > 0.
  double clipped_ratio_sum(double m) const noexcept;

  /// Unique positive root of clipped_ratio_sum(m) = target. Caller must
  /// ensure 0 < target < nonzero_count().
  double solve_root(double target) const noexcept;

 private:
  struct Node {
    double key = 0.0;  // |x|
    MagnitudeAggregate own;
    MagnitudeAggregate subtree;
    std::uint64_t priority = 0;
    std::int32_t left = -1;
    std::int32_t right = -1;
  };

  std::int32_t insert_at(std::int32_t node, double key, double x);
  std::int32_t rotate_right(std::int32_t node);
  std::int32_t rotate_left(std::int32_t node);
  void pull(std::int32_t node);
  const MagnitudeAggregate& agg(std::int32_t node) const noexcept;

  std::vector<Node> nodes_;
  std::int32_t root_ = -1;
  std::size_t zeros_ = 0;
  std::uint64_t priority_state_ = 0x243f6a8885a308d3ULL;
};

}  // namespace htband
