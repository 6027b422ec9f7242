#include "mmsb/types.hpp"

#include <cmath>
#include <string>

namespace mmsb {

std::vector<int> position_index(const NodeSet& set, int n) {
  std::vector<int> pos(n, -1);
  for (std::size_t i = 0; i < set.size(); ++i) {
    int v = set[i];
    if (v < 0 || v >= n)
      fail(ErrorCode::DimensionMismatch,
           "node id " + std::to_string(v) + " outside [0," +
               std::to_string(n) + ")");
    pos[v] = static_cast<int>(i);
  }
  return pos;
}

Graph::Graph(int n, bool directed) : n_(n), directed_(directed) {
  if (n <= 0) fail(ErrorCode::TooFewNodes, "graph needs at least one node");
  words_ = (n + 63) / 64;
  bits_.assign(static_cast<std::size_t>(n) * words_, 0);
}

void Graph::set_edge(int u, int v, bool value) {
  if (u < 0 || v < 0 || u >= n_ || v >= n_)
    fail(ErrorCode::DimensionMismatch, "edge endpoint out of range");
  if (u == v) fail(ErrorCode::DimensionMismatch, "self loops are not allowed");
  auto put = [&](int a, int b) {
    std::uint64_t& word = bits_[static_cast<std::size_t>(a) * words_ + (b >> 6)];
    std::uint64_t mask = 1ull << (b & 63);
    if (value)
      word |= mask;
    else
      word &= ~mask;
  };
  put(u, v);
  if (!directed_) put(v, u);
}

std::size_t Graph::edge_count() const {
  std::size_t total = 0;
  for (std::uint64_t w : bits_) total += __builtin_popcountll(w);
  return total;
}

double Graph::density() const {
  if (n_ < 2) return 0.0;
  return static_cast<double>(edge_count()) /
         (static_cast<double>(n_) * (n_ - 1));
}

void Graph::validate() const {
  for (int u = 0; u < n_; ++u)
    if (edge(u, u)) fail(ErrorCode::DimensionMismatch, "nonzero diagonal");
  if (!directed_) {
    for (int u = 0; u < n_; ++u)
      for_neighbors(u, [&](int v) {
        if (!edge(v, u))
          fail(ErrorCode::DimensionMismatch,
               "undirected graph with asymmetric adjacency");
      });
  }
}

Graph Graph::from_dense(const MatrixXi& adj, bool directed) {
  if (adj.rows() != adj.cols())
    fail(ErrorCode::DimensionMismatch, "adjacency must be square");
  Graph g(static_cast<int>(adj.rows()), directed);
  for (int u = 0; u < g.nodes(); ++u)
    for (int v = 0; v < g.nodes(); ++v)
      if (u != v && adj(u, v)) g.set_edge(u, v);
  return g;
}

MatrixXd dense_block(const Graph& g, const NodeSet& rows, const NodeSet& cols) {
  std::vector<int> pos = position_index(cols, g.nodes());
  MatrixXd out = MatrixXd::Zero(static_cast<int>(rows.size()),
                                static_cast<int>(cols.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    g.for_neighbors(rows[r], [&](int v) {
      if (pos[v] >= 0) out(static_cast<int>(r), pos[v]) = 1.0;
    });
  }
  return out;
}

void MembershipMatrix::validate(double tol) const {
  for (int j = 0; j < pi.cols(); ++j) {
    double sum = 0.0;
    for (int i = 0; i < pi.rows(); ++i) {
      double v = pi(i, j);
      if (!(v >= 0.0))
        fail(ErrorCode::InvalidPrior,
             "membership entry negative at column " + std::to_string(j));
      sum += v;
    }
    if (std::abs(sum - 1.0) > tol)
      fail(ErrorCode::InvalidPrior,
           "membership column " + std::to_string(j) + " sums to " +
               std::to_string(sum));
  }
}

VectorXd MmsbModel::alpha_hat() const {
  if (alpha0 > 0.0) return alpha / alpha0;
  return alpha;
}

void MmsbModel::validate() const {
  if (k <= 0 || n <= 0) fail(ErrorCode::TooFewNodes, "k and n must be positive");
  if (alpha.size() != k)
    fail(ErrorCode::DimensionMismatch, "alpha length != k");
  if (alpha0 < 0.0) fail(ErrorCode::NonPositiveAlpha, "alpha0 < 0");
  if (alpha0 > 0.0) {
    double sum = 0.0;
    for (int i = 0; i < k; ++i) {
      if (alpha[i] <= 0.0)
        fail(ErrorCode::NonPositiveAlpha, "alpha entries must be positive");
      sum += alpha[i];
    }
    if (std::abs(sum - alpha0) > 1e-9 * std::max(1.0, alpha0))
      fail(ErrorCode::InvalidPrior, "alpha0 != sum(alpha)");
  } else {
    double sum = 0.0;
    for (int i = 0; i < k; ++i) {
      if (alpha[i] <= 0.0)
        fail(ErrorCode::InvalidPrior, "block-model prior must be positive");
      sum += alpha[i];
    }
    if (std::abs(sum - 1.0) > 1e-9)
      fail(ErrorCode::InvalidPrior, "block-model prior must sum to 1");
  }
  if (P.rows() != k || P.cols() != k)
    fail(ErrorCode::DimensionMismatch, "P must be k x k");
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      if (P(i, j) < 0.0 || P(i, j) > 1.0)
        fail(ErrorCode::InvalidProbability, "P entries must lie in [0,1]");
  if (!directed) {
    if (!P.isApprox(P.transpose(), 1e-12))
      fail(ErrorCode::InvalidProbability,
           "undirected model requires symmetric P");
  }
}

std::pair<MatrixXd, VectorXd> make_homogeneous(int k, double p, double q) {
  if (k <= 0) fail(ErrorCode::DimensionMismatch, "k must be positive");
  if (!(q >= 0.0 && q <= p && p <= 1.0))
    fail(ErrorCode::InvalidProbability, "need 0 <= q <= p <= 1");
  MatrixXd P = MatrixXd::Constant(k, k, q);
  P.diagonal().setConstant(p);
  VectorXd prior = VectorXd::Constant(k, 1.0 / k);
  return {P, prior};
}

}  // namespace mmsb
