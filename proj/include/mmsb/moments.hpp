#pragma once

#include "mmsb/partition.hpp"
#include "mmsb/tensor.hpp"
#include "mmsb/types.hpp"

namespace mmsb {

// Column means of the block G[X, A]: mu_a = |X|^{-1} sum_{x in X} G(x, a).
VectorXd edge_mean(const Graph& g, const NodeSet& X, const NodeSet& A);

// sqrt(a0+1) G[X,A] - (sqrt(a0+1) - 1) 1 mu^T. Reduces to G[X,A] at a0 = 0.
struct ModifiedAdjacency {
  MatrixXd m;  // |X| x |A|
  double alpha0 = 0.0;
  NodeSet source;  // X
  NodeSet target;  // A
};

ModifiedAdjacency modified_adjacency(const Graph& g, const NodeSet& X,
                                     const NodeSet& A, double alpha0);

// Averaged 3-star counts: |X|^{-1} sum_{i in X} G[i,A] ⊗ G[i,B] ⊗ G[i,C].
// Materializes |A| x |B| x |C|, so it is capped (test/oracle scale only).
Tensor3 raw_threestar(const Graph& g, const NodeSet& X, const NodeSet& A,
                      const NodeSet& B, const NodeSet& C,
                      std::size_t cap = 1000000);

// Third-moment tensor, already projected to k x k x k through the whitener
// (and symmetrizer-adjusted whiteners for the B/C legs), accumulated one
// head node at a time so the full n^3 tensor never exists. Heads are
// part.Y; centering means are taken over Y as well. Normalized so its
// expectation is sum_i ahat_i F_i^{⊗3}; at alpha0 = 0 this is exactly the
// projected raw 3-star average. Output is symmetrized (all 6 permutations
// averaged).
Tensor3 whitened_threestar(const Graph& g, const Partition5& part,
                           double alpha0, const MatrixXd& W_A,
                           const MatrixXd& WB_RAB, const MatrixXd& WC_RAC);

}  // namespace mmsb
