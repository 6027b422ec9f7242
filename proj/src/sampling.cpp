#include "mmsb/sampling.hpp"

#include <cmath>

namespace mmsb {

MatrixXd sample_dirichlet(const VectorXd& alpha, int count, Rng& rng) {
  const int k = static_cast<int>(alpha.size());
  if (k < 1) fail(ErrorCode::DimensionMismatch, "alpha must be nonempty");
  for (int i = 0; i < k; ++i)
    if (!(alpha[i] > 0.0))
      fail(ErrorCode::NonPositiveAlpha, "alpha entries must be positive");
  if (count < 0) fail(ErrorCode::DimensionMismatch, "count must be >= 0");

  std::vector<std::gamma_distribution<double>> gammas;
  gammas.reserve(k);
  for (int i = 0; i < k; ++i)
    gammas.emplace_back(alpha[i], 1.0);

  MatrixXd out(k, count);
  for (int j = 0; j < count; ++j) {
    double sum = 0.0;
    for (int i = 0; i < k; ++i) {
      double y = gammas[i](rng);
      out(i, j) = y;
      sum += y;
    }
    // With alpha_i < 1 a whole column of zero draws is possible (underflow
    // near the sparse corner); retry the column rather than divide by zero.
    if (sum <= 0.0) {
      --j;
      continue;
    }
    out.col(j) /= sum;
  }
  return out;
}

MatrixXd sample_block_labels(const VectorXd& alpha_hat, int count, Rng& rng) {
  const int k = static_cast<int>(alpha_hat.size());
  double sum = 0.0;
  for (int i = 0; i < k; ++i) {
    if (!(alpha_hat[i] > 0.0))
      fail(ErrorCode::InvalidPrior, "prior entries must be positive");
    sum += alpha_hat[i];
  }
  if (std::abs(sum - 1.0) > 1e-9)
    fail(ErrorCode::InvalidPrior, "prior must sum to 1");
  if (count < 0) fail(ErrorCode::DimensionMismatch, "count must be >= 0");

  std::discrete_distribution<int> pick(alpha_hat.data(),
                                       alpha_hat.data() + k);
  MatrixXd out = MatrixXd::Zero(k, count);
  for (int j = 0; j < count; ++j) out(pick(rng), j) = 1.0;
  return out;
}

MembershipMatrix sample_membership(const MmsbModel& model, Rng& rng) {
  model.validate();
  MembershipMatrix m;
  if (model.alpha0 > 0.0)
    m.pi = sample_dirichlet(model.alpha, model.n, rng);
  else
    m.pi = sample_block_labels(model.alpha, model.n, rng);
  return m;
}

Graph sample_graph(const MembershipMatrix& membership, const MatrixXd& P,
                   bool directed, Rng& rng) {
  membership.validate(1e-9);
  const int k = membership.communities();
  const int n = membership.nodes();
  if (P.rows() != k || P.cols() != k)
    fail(ErrorCode::DimensionMismatch, "P must be k x k");
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      if (P(i, j) < 0.0 || P(i, j) > 1.0)
        fail(ErrorCode::InvalidProbability, "P entries must lie in [0,1]");
  if (!directed && !P.isApprox(P.transpose(), 1e-12))
    fail(ErrorCode::InvalidProbability, "undirected sampling needs symmetric P");

  // prob(u -> v) = pi_u^T P pi_v = pi_u . (P Pi)_v; precompute P Pi once.
  MatrixXd R = P * membership.pi;  // k x n
  Graph g(n, directed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int u = 0; u < n; ++u) {
    const auto pu = membership.pi.col(u);
    int vstart = directed ? 0 : u + 1;
    for (int v = vstart; v < n; ++v) {
      if (v == u) continue;
      double prob = pu.dot(R.col(v));
      if (unif(rng) < prob) g.set_edge(u, v);
    }
  }
  return g;
}

}  // namespace mmsb
