#include "mmsb/partition.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mmsb {

const NodeSet& Partition5::block(int i) const {
  switch (i) {
    case 0: return A;
    case 1: return B;
    case 2: return C;
    case 3: return X;
    case 4: return Y;
  }
  fail(ErrorCode::DimensionMismatch, "block index must be 0..4");
}

void Partition5::validate() const {
  std::vector<char> seen(n, 0);
  for (int b = 0; b < 5; ++b) {
    const NodeSet& s = block(b);
    if (s.empty()) fail(ErrorCode::EmptyPartition, "empty block");
    for (int v : s) {
      if (v < 0 || v >= n)
        fail(ErrorCode::DimensionMismatch, "partition node out of range");
      if (seen[v]) fail(ErrorCode::OverlappingSets, "blocks overlap");
      seen[v] = 1;
    }
    if (!std::is_sorted(s.begin(), s.end()))
      fail(ErrorCode::DimensionMismatch, "blocks must be sorted");
  }
}

Partition5 partition_nodes(int n, int k, Rng& rng,
                           const std::array<double, 5>& fractions) {
  if (k < 1) fail(ErrorCode::DimensionMismatch, "k must be positive");
  double fsum = 0.0;
  for (double f : fractions) {
    if (!(f > 0.0)) fail(ErrorCode::EmptyPartition, "fractions must be > 0");
    fsum += f;
  }
  if (fsum > 1.0 + 1e-9)
    fail(ErrorCode::DimensionMismatch, "fractions sum exceeds 1");

  std::array<int, 5> sizes;
  int assigned = 0;
  for (int b = 0; b < 5; ++b) {
    sizes[b] = static_cast<int>(std::floor(fractions[b] * n));
    assigned += sizes[b];
  }
  if (fsum >= 1.0 - 1e-9) {
    // Deal the flooring remainder so the blocks cover every node.
    int extra = n - assigned;
    for (int b = 0; extra > 0; b = (b + 1) % 5, --extra) ++sizes[b];
    assigned = n;
  }
  for (int b = 0; b < 5; ++b)
    if (sizes[b] < k)
      fail(ErrorCode::TooFewNodes,
           "block of " + std::to_string(sizes[b]) + " nodes < k = " +
               std::to_string(k) + " (need n >= 5k)");

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);

  Partition5 part;
  part.n = n;
  int at = 0;
  NodeSet* blocks[5] = {&part.A, &part.B, &part.C, &part.X, &part.Y};
  for (int b = 0; b < 5; ++b) {
    blocks[b]->assign(order.begin() + at, order.begin() + at + sizes[b]);
    std::sort(blocks[b]->begin(), blocks[b]->end());
    at += sizes[b];
  }
  part.validate();
  return part;
}

}  // namespace mmsb
