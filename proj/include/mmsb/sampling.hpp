#pragma once

#include "mmsb/types.hpp"

namespace mmsb {

// `count` Dirichlet(alpha) draws, one per column, via gamma normalization:
// Y_i ~ Gamma(alpha_i, 1) independent, pi = Y / sum(Y).
MatrixXd sample_dirichlet(const VectorXd& alpha, int count, Rng& rng);

// One-hot community columns with community i picked w.p. alpha_hat_i
// (the alpha0 -> 0 limit of the Dirichlet draw).
MatrixXd sample_block_labels(const VectorXd& alpha_hat, int count, Rng& rng);

// Memberships for a model: Dirichlet when alpha0 > 0, one-hot otherwise.
MembershipMatrix sample_membership(const MmsbModel& model, Rng& rng);

// Bernoulli(pi_u^T P pi_v) adjacency, zero diagonal. Undirected graphs
// sample u < v once and mirror, which requires symmetric P.
Graph sample_graph(const MembershipMatrix& membership, const MatrixXd& P,
                   bool directed, Rng& rng);

}  // namespace mmsb
