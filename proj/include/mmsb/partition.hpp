#pragma once

#include <array>

#include "mmsb/types.hpp"

namespace mmsb {

// The five disjoint node blocks the estimator works with: X whitens, Y
// supplies the 3-star heads, A/B/C are the leaf blocks.
struct Partition5 {
  NodeSet A, B, C, X, Y;
  int n = 0;

  const NodeSet& block(int i) const;  // 0..4 -> A,B,C,X,Y
  void validate() const;              // disjoint, in range, nonempty
};

inline constexpr std::array<double, 5> kEqualFifths = {0.2, 0.2, 0.2, 0.2,
                                                       0.2};

// Uniformly random disjoint blocks with |block_i| ~ fractions[i] * n.
// When the fractions sum to ~1 the remainder nodes are dealt round-robin so
// the blocks cover [n]. Requires every block to get at least k nodes.
Partition5 partition_nodes(int n, int k, Rng& rng,
                           const std::array<double, 5>& fractions =
                               kEqualFifths);

}  // namespace mmsb
