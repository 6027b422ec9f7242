#pragma once

#include "mmsb/partition.hpp"
#include "mmsb/tensor_power.hpp"
#include "mmsb/whitening.hpp"

namespace mmsb {

struct MemberEstimate {
  MatrixXd pi;          // k x |targets|, thresholded at tau
  VectorXd alpha_hat;   // lambda^{-2}
};

// Pi-tilde = Diag(lambda)^{-1} Phi^T W^T G[targets, A]^T, thresholded at
// tau (entries < tau become exactly 0). A is the whitener's target block.
// Eigenvalues below 1e-8 raise NonPositiveEigenvalue.
MemberEstimate estimate_members(const EigenPairs& eigen, const Whitener& w,
                                const Graph& g, const NodeSet& targets,
                                double tau);

// 0.5 in the block-model limit; c_tau * (k sqrt(a0) / sqrt(n)) * sqrt(p)/(p-q)
// otherwise. DegenerateSeparation when p <= q in the latter branch.
double default_tau(int k, double alpha0, int n, double p, double q,
                   double c_tau = 1.0);

struct Alignment {
  std::vector<int> perm;  // perm[r] = row of the second estimate matching r
  double total_score = 0.0;
  bool ambiguous = false;  // a greedy pick tied within 1e-9
};

// Greedy max-|correlation| matching of rows, restricted to the columns in
// `common` (both estimates full width). Ties break toward the lowest index.
Alignment align_estimates(const MatrixXd& pi_first, const MatrixXd& pi_second,
                          const NodeSet& common);

// Q row i = (a0+1) pi_i / ||pi_i||_1 - a0/m, m = piHat's column count (the
// block width; Algorithm-wide usage passes m = n). `n` must equal that
// width. Rows sum to exactly 1. EmptyCommunity when a row has no mass.
MatrixXd build_Q(const MatrixXd& pi_hat, double alpha0, int n);

struct PEstimate {
  MatrixXd raw;      // Q G Q^T as computed
  MatrixXd clamped;  // entries clipped into [0, 1] for reporting
};

PEstimate estimate_P(const MatrixXd& Q, const Graph& g);

// Homophilic support recovery. Blocks rotate through the (C-role, B-role)
// pairing along the fixed cycle [A, B, C, X, Y] (block t with block t+1 mod
// 5), so every node is assigned when its block holds the C role. alpha0=0
// assigns the argmax column of F_C = G[C,B] Q_B^T; otherwise entries pass
// when F_C >= L + (H-L) * 3 xi / 4 with H/L the mean diagonal/off-diagonal
// of that rotation's P estimate. NotHomophilic (H <= L) is reported via
// `warnings`, not thrown.
MatrixXi support_recovery(const Graph& g, const MatrixXd& pi_hat,
                          double alpha0, double xi, const Partition5& part,
                          Warnings* warnings = nullptr);

}  // namespace mmsb
