#pragma once

// Independent reference implementations for the test suite. Everything here
// recomputes quantities from definitions with naive loops or closed forms,
// deliberately avoiding the library's optimized kernels, so agreement is
// meaningful.

#include "mmsb/moments.hpp"
#include "mmsb/partition.hpp"
#include "mmsb/sampling.hpp"
#include "mmsb/tensor.hpp"
#include "mmsb/types.hpp"

namespace oracle {

using mmsb::Graph;
using mmsb::MatrixXd;
using mmsb::NodeSet;
using mmsb::Rng;
using mmsb::Tensor3;
using mmsb::VectorXd;

// F_S = Pi_S^T P^T: row s holds the edge probabilities from a pure-community
// head to node s. pi_S is k x |S|.
MatrixXd exact_F(const MatrixXd& pi_S, const MatrixXd& P);

// Closed-form Dirichlet second moment E[pi pi^T] from concentrations.
MatrixXd dirichlet_moment_matrix(const VectorXd& alpha);

// Diag(ahat^{-1/2}) (sqrt(a0+1) Pi_X - (sqrt(a0+1)-1) ahat 1^T), the
// rescaled membership block whose second moment is |X| I in expectation.
MatrixXd psi_matrix(const MatrixXd& pi_X, const VectorXd& ahat,
                    double alpha0);

// E[G | Pi] = Pi^T P Pi with a zeroed diagonal.
MatrixXd expected_graph(const MatrixXd& pi, const MatrixXd& P);

// Thin orthonormal-column matrix from a seeded Gaussian via QR.
MatrixXd random_orthonormal(int rows, int cols, Rng& rng);

// Population-exact modified adjacency surrogate: sqrt(|X|) Q Diag(ahat^{1/2})
// F_S^T, i.e. the conditional expectation with the membership block replaced
// by one whose empirical second moment is exactly the population value.
MatrixXd exact_modified_adjacency(const MatrixXd& Q, const VectorXd& ahat,
                                  const MatrixXd& F_S);

// Scalar quadruple loop over (head, a, b, c) with per-edge lookups.
Tensor3 threestar_bruteforce(const Graph& g, const NodeSet& X,
                             const NodeSet& A, const NodeSet& B,
                             const NodeSet& C);

// Naive six-index multilinear map, out = T(V1, V2, V3).
Tensor3 multilinear_transform(const Tensor3& T, const MatrixXd& V1,
                              const MatrixXd& V2, const MatrixXd& V3);

// sum_i w_i c1_i ⊗ c2_i ⊗ c3_i over matrix columns, naive loops.
Tensor3 rank_one_sum(const VectorXd& w, const MatrixXd& c1,
                     const MatrixXd& c2, const MatrixXd& c3);

struct FullSvd {
  MatrixXd U;
  VectorXd S;
  MatrixXd V;
};
FullSvd full_svd(const MatrixXd& M);

// A complete exact-moment scenario: sampled model and memberships plus the
// population-exact modified adjacencies for every leaf block, sharing one
// orthonormal surrogate factor as the algebra requires.
struct ExactMoments {
  mmsb::MmsbModel model;
  MatrixXd pi;  // k x n true memberships
  mmsb::Partition5 part;
  VectorXd ahat;
  MatrixXd Q;  // |X| x k shared surrogate factor
  MatrixXd FA, FB, FC, FY;
  mmsb::ModifiedAdjacency gmodA, gmodB, gmodC, gmodY;
};

// Random full-rank P (retry until sigma_k/sigma_1 > 0.05), memberships from
// the model's own regime (one-hot at alpha0 = 0, Dirichlet otherwise).
ExactMoments build_exact_moments(int k, int n, double alpha0, Rng& rng);

}  // namespace oracle
