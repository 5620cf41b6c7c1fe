#include "htband/magnitude_index.hpp"

#include <cmath>

#include "htband/rng.hpp"

namespace htband {

namespace {

const MagnitudeAggregate kEmpty{};

void add_into(MagnitudeAggregate& into, const MagnitudeAggregate& from) {
  into.count += from.count;
  into.sum += from.sum;
  into.sum_sq += from.sum_sq;
}

}  // namespace

const MagnitudeAggregate& MagnitudeIndex::agg(std::int32_t node) const noexcept {
  return node < 0 ? kEmpty : nodes_[static_cast<std::size_t>(node)].subtree;
}

void MagnitudeIndex::pull(std::int32_t node) {
  auto& n = nodes_[static_cast<std::size_t>(node)];
  MagnitudeAggregate s = agg(n.left);
  add_into(s, n.own);
  add_into(s, agg(n.right));
  n.subtree = s;
}

std::int32_t MagnitudeIndex::rotate_right(std::int32_t node) {
  auto& n = nodes_[static_cast<std::size_t>(node)];
  const std::int32_t l = n.left;
  n.left = nodes_[static_cast<std::size_t>(l)].right;
  nodes_[static_cast<std::size_t>(l)].right = node;
  pull(node);
  pull(l);
  return l;
}

std::int32_t MagnitudeIndex::rotate_left(std::int32_t node) {
  auto& n = nodes_[static_cast<std::size_t>(node)];
  const std::int32_t r = n.right;
  n.right = nodes_[static_cast<std::size_t>(r)].left;
  nodes_[static_cast<std::size_t>(r)].left = node;
  pull(node);
  pull(r);
  return r;
}

std::int32_t MagnitudeIndex::insert_at(std::int32_t node, double key,
                                       double x) {
  if (node < 0) {
    priority_state_ += kGoldenGamma;
    Node fresh;
    fresh.key = key;
    fresh.own = {1, x, x * x};
    fresh.subtree = fresh.own;
    fresh.priority = mix64(priority_state_);
    nodes_.push_back(fresh);
    return static_cast<std::int32_t>(nodes_.size() - 1);
  }
  const double here = nodes_[static_cast<std::size_t>(node)].key;
  if (key == here) {
    auto& own = nodes_[static_cast<std::size_t>(node)].own;
    own.count += 1;
    own.sum += x;
    own.sum_sq += x * x;
  } else if (key < here) {
    const std::int32_t child =
        insert_at(nodes_[static_cast<std::size_t>(node)].left, key, x);
    nodes_[static_cast<std::size_t>(node)].left = child;
    if (nodes_[static_cast<std::size_t>(child)].priority >
        nodes_[static_cast<std::size_t>(node)].priority) {
      return rotate_right(node);
    }
  } else {
    const std::int32_t child =
        insert_at(nodes_[static_cast<std::size_t>(node)].right, key, x);
    nodes_[static_cast<std::size_t>(node)].right = child;
    if (nodes_[static_cast<std::size_t>(child)].priority >
        nodes_[static_cast<std::size_t>(node)].priority) {
      return rotate_left(node);
    }
  }
  pull(node);
  return node;
}

void MagnitudeIndex::insert(double x) {
  if (x == 0.0) {
    ++zeros_;
    x = 0.0;  // fold -0.0
  }
  root_ = insert_at(root_, std::abs(x), x);
}

std::size_t MagnitudeIndex::size() const noexcept { return agg(root_).count; }

MagnitudeAggregate MagnitudeIndex::total() const noexcept { return agg(root_); }

MagnitudeAggregate MagnitudeIndex::below(double m,
                                         bool inclusive) const noexcept {
  MagnitudeAggregate acc;
  std::int32_t node = root_;
  while (node >= 0) {
    const auto& n = nodes_[static_cast<std::size_t>(node)];
    const bool take = inclusive ? n.key <= m : n.key < m;
    if (take) {
      add_into(acc, agg(n.left));
      add_into(acc, n.own);
      node = n.right;
    } else {
      node = n.left;
    }
  }
  return acc;
}

double MagnitudeIndex::clipped_ratio_sum(double m) const noexcept {
  const auto under = below(m, false);
  const auto n = static_cast<double>(size() - under.count);
  return n + under.sum_sq / (m * m);
}

double MagnitudeIndex::solve_root(double target) const noexcept {
  // Magnitudes a with g(a) > target lie strictly below the root, where
  // g(a) = #{|x| >= a} + sum_{|x| < a} x^2 / a^2 is nonincreasing. The
  // descent accumulates exactly that prefix.
  const auto total_count = static_cast<double>(size());
  std::size_t k = 0;
  double squares = 0.0;
  std::int32_t node = root_;
  while (node >= 0) {
    const auto& n = nodes_[static_cast<std::size_t>(node)];
    const auto& l = agg(n.left);
    const std::size_t k_here = k + l.count;
    const double sq_here = squares + l.sum_sq;
    const bool under_root =
        n.key == 0.0 ||
        (total_count - static_cast<double>(k_here)) + sq_here / (n.key * n.key) >
            target;
    if (under_root) {
      k = k_here + n.own.count;
      squares = sq_here + n.own.sum_sq;
      node = n.right;
    } else {
      node = n.left;
    }
  }
  const double above = total_count - static_cast<double>(k);
  return std::sqrt(squares / (target - above));
}

}  // namespace htband
