#pragma once

#include "mmsb/tensor.hpp"

namespace mmsb {

struct PowerPairInfo {
  int best_init = -1;      // initializer that won the sweep
  int refine_iters = 0;    // iterations actually spent in refinement
  double final_delta = 0;  // ||theta_t - theta_{t-1}|| at exit
  int deflated = 0;        // deflation-set size at the accepted vector
};

struct EigenPairs {
  VectorXd lambda;  // k, positive after sign fixing
  MatrixXd phi;     // k x k, unit columns
  std::vector<PowerPairInfo> info;
};

// N = max(30, ceil(c2 (log k + log log(1/gap_ratio)))), gap_ratio in (0,1].
int default_iteration_count(int k, double gap_ratio, double c2 = 10.0);

// Robust tensor power method with adaptive deflation. For each eigenpair,
// every initializer is iterated N times under the update
//   theta <- Tdef(I, theta, theta) / ||.||,
// where Tdef drops the already-extracted components j whose deflation test
// |lambda_j <theta, phi_j>| > xi fires -- re-evaluated at every iteration.
// The best candidate by Tdef(theta,theta,theta) (ties: lowest index) gets N
// more refinement iterations; lambda_i = Tdef(phi_i,...) with phi_i flipped
// to make it positive. Candidates whose power image collapses to zero are
// dropped; NonFiniteIterate fires only when nothing survives or the chosen
// trajectory degenerates.
EigenPairs tensor_eigen(const Tensor3& T, const std::vector<VectorXd>& inits,
                        int N, double xi);

// Cheap top-eigenvalue estimate (no deflation): one power sweep over the
// initializers. Used to auto-scale the deflation threshold.
double top_eigenvalue_estimate(const Tensor3& T,
                               const std::vector<VectorXd>& inits, int N);

// Lower-bound estimate of ||T - sum_i lambda_i phi_i^{x3}||_op via power
// iterations on the residual from `restarts` seeded random starts.
double residual_norm(const Tensor3& T, const EigenPairs& pairs,
                     int restarts = 20, std::uint64_t seed = 0x7e51d0a1ull);

}  // namespace mmsb
