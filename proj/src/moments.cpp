#include "mmsb/moments.hpp"

#include <cmath>

namespace mmsb {

namespace {

void require_disjoint(const NodeSet& a, const NodeSet& b, const char* what) {
  // Both sorted; linear merge scan.
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] == b[j]) fail(ErrorCode::OverlappingSets, what);
    if (a[i] < b[j])
      ++i;
    else
      ++j;
  }
}

void require_nonempty(const NodeSet& s, const char* what) {
  if (s.empty()) fail(ErrorCode::EmptyPartition, what);
}

// Sum of W rows indexed by u's neighbors inside the target set.
void project_row(const Graph& g, int u, const std::vector<int>& pos,
                 const MatrixXd& W, VectorXd& out) {
  out.setZero();
  g.for_neighbors(u, [&](int v) {
    int p = pos[v];
    if (p >= 0) out += W.row(p).transpose();
  });
}

}  // namespace

VectorXd edge_mean(const Graph& g, const NodeSet& X, const NodeSet& A) {
  require_nonempty(X, "edge_mean: X empty");
  require_nonempty(A, "edge_mean: A empty");
  std::vector<int> pos = position_index(A, g.nodes());
  VectorXd mu = VectorXd::Zero(static_cast<int>(A.size()));
  for (int x : X) {
    if (x < 0 || x >= g.nodes())
      fail(ErrorCode::DimensionMismatch, "edge_mean: node out of range");
    g.for_neighbors(x, [&](int v) {
      if (pos[v] >= 0) mu[pos[v]] += 1.0;
    });
  }
  mu /= static_cast<double>(X.size());
  return mu;
}

ModifiedAdjacency modified_adjacency(const Graph& g, const NodeSet& X,
                                     const NodeSet& A, double alpha0) {
  if (alpha0 < 0.0) fail(ErrorCode::NonPositiveAlpha, "alpha0 < 0");
  require_disjoint(X, A, "modified_adjacency: X and A overlap");
  VectorXd mu = edge_mean(g, X, A);

  const double root = std::sqrt(alpha0 + 1.0);
  ModifiedAdjacency out;
  out.alpha0 = alpha0;
  out.source = X;
  out.target = A;
  out.m = root * dense_block(g, X, A);
  out.m.rowwise() -= ((root - 1.0) * mu).transpose();
  return out;
}

Tensor3 raw_threestar(const Graph& g, const NodeSet& X, const NodeSet& A,
                      const NodeSet& B, const NodeSet& C, std::size_t cap) {
  require_nonempty(X, "raw_threestar: X empty");
  require_nonempty(A, "raw_threestar: A empty");
  require_nonempty(B, "raw_threestar: B empty");
  require_nonempty(C, "raw_threestar: C empty");
  require_disjoint(X, A, "raw_threestar: X/A overlap");
  require_disjoint(X, B, "raw_threestar: X/B overlap");
  require_disjoint(X, C, "raw_threestar: X/C overlap");
  require_disjoint(A, B, "raw_threestar: A/B overlap");
  require_disjoint(A, C, "raw_threestar: A/C overlap");
  require_disjoint(B, C, "raw_threestar: B/C overlap");

  std::size_t cells = A.size() * B.size() * C.size();
  if (cells > cap)
    fail(ErrorCode::CapExceeded,
         "raw_threestar would materialize " + std::to_string(cells) +
             " entries (cap " + std::to_string(cap) + ")");

  std::vector<int> posA = position_index(A, g.nodes());
  std::vector<int> posB = position_index(B, g.nodes());
  std::vector<int> posC = position_index(C, g.nodes());

  Tensor3 T(static_cast<int>(A.size()), static_cast<int>(B.size()),
            static_cast<int>(C.size()));
  const double w = 1.0 / static_cast<double>(X.size());
  std::vector<int> na, nb, nc;
  for (int x : X) {
    na.clear();
    nb.clear();
    nc.clear();
    g.for_neighbors(x, [&](int v) {
      if (posA[v] >= 0) na.push_back(posA[v]);
      if (posB[v] >= 0) nb.push_back(posB[v]);
      if (posC[v] >= 0) nc.push_back(posC[v]);
    });
    for (int a : na)
      for (int b : nb)
        for (int c : nc) T(a, b, c) += w;
  }
  return T;
}

Tensor3 whitened_threestar(const Graph& g, const Partition5& part,
                           double alpha0, const MatrixXd& W_A,
                           const MatrixXd& WB_RAB, const MatrixXd& WC_RAC) {
  if (alpha0 < 0.0) fail(ErrorCode::NonPositiveAlpha, "alpha0 < 0");
  part.validate();
  const int k = static_cast<int>(W_A.cols());
  if (WB_RAB.cols() != k || WC_RAC.cols() != k)
    fail(ErrorCode::DimensionMismatch, "whitener column counts disagree");
  if (W_A.rows() != static_cast<Eigen::Index>(part.A.size()) ||
      WB_RAB.rows() != static_cast<Eigen::Index>(part.B.size()) ||
      WC_RAC.rows() != static_cast<Eigen::Index>(part.C.size()))
    fail(ErrorCode::DimensionMismatch, "whitener rows != leaf block size");

  std::vector<int> posA = position_index(part.A, g.nodes());
  std::vector<int> posB = position_index(part.B, g.nodes());
  std::vector<int> posC = position_index(part.C, g.nodes());

  const double m = static_cast<double>(part.Y.size());
  Tensor3 triple = Tensor3::cube(k);
  MatrixXd mab = MatrixXd::Zero(k, k);
  MatrixXd mac = MatrixXd::Zero(k, k);
  MatrixXd mbc = MatrixXd::Zero(k, k);
  VectorXd suma = VectorXd::Zero(k), sumb = VectorXd::Zero(k),
           sumc = VectorXd::Zero(k);
  VectorXd a(k), b(k), c(k);

  // Heads in ascending id order; fixed accumulation order keeps repeated
  // runs bit-identical.
  for (int y : part.Y) {
    project_row(g, y, posA, W_A, a);
    project_row(g, y, posB, WB_RAB, b);
    project_row(g, y, posC, WC_RAC, c);
    for (int p = 0; p < k; ++p) {
      double ap = a[p];
      for (int q = 0; q < k; ++q) {
        double apq = ap * b[q];
        double* slot = &triple(p, q, 0);
        for (int r = 0; r < k; ++r) slot[r] += apq * c[r];
      }
    }
    mab += a * b.transpose();
    mac += a * c.transpose();
    mbc += b * c.transpose();
    suma += a;
    sumb += b;
    sumc += c;
  }

  const VectorXd abar = suma / m, bbar = sumb / m, cbar = sumc / m;
  // Normalized so E[T] = sum_i ahat_i F_i^{⊗3}: the raw coefficient set
  // (a0+1)(a0+2), -a0(a0+1), +2 a0^2 carries an overall factor of 2 (its
  // centered Dirichlet third moment has diagonal 2*ahat_p), which would halve
  // every recovered membership and double every eigenvalue downstream.
  const double c_triple = 0.5 * (alpha0 + 1.0) * (alpha0 + 2.0);
  const double c_mixed = 0.5 * alpha0 * (alpha0 + 1.0);
  const double c_mean = alpha0 * alpha0;

  Tensor3 T = Tensor3::cube(k);
  for (int p = 0; p < k; ++p)
    for (int q = 0; q < k; ++q)
      for (int r = 0; r < k; ++r)
        T(p, q, r) = c_triple * triple(p, q, r) / m +
                     c_mean * abar[p] * bbar[q] * cbar[r] -
                     c_mixed * (mab(p, q) / m * cbar[r] +
                                mac(p, r) / m * bbar[q] +
                                abar[p] * mbc(q, r) / m);
  return symmetrized(T);
}

}  // namespace mmsb
