#pragma once

#include "mmsb/moments.hpp"
#include "mmsb/types.hpp"

namespace mmsb {

// Top-k singular triplet of M. U: m x k, D: k (positive, nonincreasing),
// V: n x k. Sign convention: the largest-magnitude entry of each U column
// is made positive (first occurrence on ties), with the matching V column
// flipped alongside.
struct KSvd {
  MatrixXd U;
  VectorXd D;
  MatrixXd V;
};

struct KSvdOptions {
  // Short-side size up to which a dense BDCSVD is used. Above it, a
  // deterministic subspace iteration (fixed start block, converged to `tol`)
  // computes the same top-k triplet without the cubic dense cost.
  int dense_limit = 1024;
  int oversample = 8;
  int max_iter = 300;
  double tol = 1e-13;
};

// Raises RankDeficient when sigma_k / sigma_1 < 1e-10.
KSvd k_rank_svd(const MatrixXd& M, int k, const KSvdOptions& opts = {});

// Whitening transform built from the k-SVD of |X|^{-1/2} Gmod^T:
// W = U D^{-1}, so W^T (second moment of Gmod) W = I on the top-k subspace.
struct Whitener {
  MatrixXd W;  // |A| x k
  MatrixXd U;  // |A| x k
  VectorXd D;  // k
  MatrixXd V;  // |X| x k (kept: the symmetrizer collapses onto it)
  double source_scale = 0.0;  // 1/sqrt(|X|)
  NodeSet source;             // X
  NodeSet target;             // A
};

Whitener compute_whitener(const ModifiedAdjacency& gmod, int k,
                          const KSvdOptions& opts = {});

// R = |X|^{-1} W_B^T (Gmod_B^T)_{k-svd} (Gmod_A)_{k-svd} W_A, the rotation
// carrying the B-leg whitening into the A frame. The explicit truncations
// are algebraically absorbed by the whiteners, so this evaluates
// |X|^{-1} (Gmod_B W_B)^T (Gmod_A W_A).
MatrixXd compute_symmetrizer(const Whitener& wb, const ModifiedAdjacency& gb,
                             const ModifiedAdjacency& ga, const Whitener& wa);

// Same rotation straight from the stored SVD factors: R = V_B^T V_A.
// Identical result without needing the dense modified adjacencies again.
MatrixXd compute_symmetrizer(const Whitener& wb, const Whitener& wa);

}  // namespace mmsb
