#include "mmsb/reconstruction.hpp"

#include <cmath>
#include <limits>

namespace mmsb {

MemberEstimate estimate_members(const EigenPairs& eigen, const Whitener& w,
                                const Graph& g, const NodeSet& targets,
                                double tau) {
  const int k = static_cast<int>(eigen.lambda.size());
  if (eigen.phi.rows() != k || eigen.phi.cols() != k || w.W.cols() != k)
    fail(ErrorCode::DimensionMismatch, "eigenpair/whitener rank mismatch");
  if (!(tau >= 0.0)) fail(ErrorCode::DimensionMismatch, "tau must be >= 0");
  for (int i = 0; i < k; ++i)
    if (!(eigen.lambda[i] >= 1e-8))
      fail(ErrorCode::NonPositiveEigenvalue,
           "lambda_" + std::to_string(i) + " = " +
               std::to_string(eigen.lambda[i]) + " below the 1e-8 floor");

  // Diag(lambda)^{-1} Phi^T W^T, applied to each target's neighborhood row.
  const MatrixXd proj =
      eigen.lambda.cwiseInverse().asDiagonal() * eigen.phi.transpose() *
      w.W.transpose();  // k x |A|
  std::vector<int> pos = position_index(w.target, g.nodes());

  MemberEstimate out;
  out.pi = MatrixXd::Zero(k, static_cast<int>(targets.size()));
  for (std::size_t t = 0; t < targets.size(); ++t) {
    int node = targets[t];
    if (pos[node] >= 0)
      fail(ErrorCode::OverlappingSets,
           "target node lies inside the whitening block A");
    VectorXd col = VectorXd::Zero(k);
    g.for_neighbors(node, [&](int v) {
      if (pos[v] >= 0) col += proj.col(pos[v]);
    });
    for (int i = 0; i < k; ++i)
      out.pi(i, static_cast<int>(t)) = col[i] >= tau ? col[i] : 0.0;
  }
  out.alpha_hat = eigen.lambda.array().square().inverse().matrix();
  return out;
}

double default_tau(int k, double alpha0, int n, double p, double q,
                   double c_tau) {
  if (k < 1 || n < 1) fail(ErrorCode::DimensionMismatch, "k, n must be >= 1");
  if (alpha0 < 0.0) fail(ErrorCode::NonPositiveAlpha, "alpha0 < 0");
  if (alpha0 == 0.0) return 0.5;
  if (!(p >= 0.0 && p <= 1.0 && q >= 0.0 && q <= 1.0))
    fail(ErrorCode::InvalidProbability, "p, q must lie in [0,1]");
  if (p <= q)
    fail(ErrorCode::DegenerateSeparation, "need p > q for the tau rule");
  return c_tau * (k * std::sqrt(alpha0) / std::sqrt(static_cast<double>(n))) *
         (std::sqrt(p) / (p - q));
}

namespace {

double pearson(const VectorXd& x, const VectorXd& y) {
  const double n = static_cast<double>(x.size());
  const double mx = x.mean(), my = y.mean();
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (int i = 0; i < x.size(); ++i) {
    double dx = x[i] - mx, dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  (void)n;
  if (sxx < 1e-30 || syy < 1e-30) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace

Alignment align_estimates(const MatrixXd& pi_first, const MatrixXd& pi_second,
                          const NodeSet& common) {
  const int k = static_cast<int>(pi_first.rows());
  if (pi_second.rows() != k || pi_first.cols() != pi_second.cols())
    fail(ErrorCode::DimensionMismatch, "estimates must have matching shape");
  if (common.empty())
    fail(ErrorCode::EmptyPartition, "alignment needs common nodes");

  const int m = static_cast<int>(common.size());
  MatrixXd a(k, m), b(k, m);
  for (int j = 0; j < m; ++j) {
    a.col(j) = pi_first.col(common[j]);
    b.col(j) = pi_second.col(common[j]);
  }

  MatrixXd score(k, k);
  for (int r = 0; r < k; ++r)
    for (int c = 0; c < k; ++c)
      score(r, c) =
          std::abs(pearson(a.row(r).transpose(), b.row(c).transpose()));

  Alignment out;
  out.perm.assign(k, -1);
  std::vector<char> row_used(k, 0), col_used(k, 0);
  for (int step = 0; step < k; ++step) {
    double best = -1.0;
    int br = -1, bc = -1;
    for (int r = 0; r < k; ++r) {
      if (row_used[r]) continue;
      for (int c = 0; c < k; ++c) {
        if (col_used[c]) continue;
        double s = score(r, c);
        if (s > best) {  // strict: lowest (r, c) wins ties
          best = s;
          br = r;
          bc = c;
        }
      }
    }
    // Only a near-tie that competes for the chosen row or column makes the
    // assignment genuinely ambiguous; ties elsewhere just belong to other
    // steps of the matching.
    for (int r = 0; r < k; ++r)
      if (!row_used[r] && r != br && best - score(r, bc) <= 1e-9)
        out.ambiguous = true;
    for (int c = 0; c < k; ++c)
      if (!col_used[c] && c != bc && best - score(br, c) <= 1e-9)
        out.ambiguous = true;
    out.perm[br] = bc;
    row_used[br] = 1;
    col_used[bc] = 1;
    out.total_score += best;
  }
  return out;
}

MatrixXd build_Q(const MatrixXd& pi_hat, double alpha0, int n) {
  if (alpha0 < 0.0) fail(ErrorCode::NonPositiveAlpha, "alpha0 < 0");
  const int m = static_cast<int>(pi_hat.cols());
  if (n != m)
    fail(ErrorCode::DimensionMismatch,
         "n must equal the estimate's column count");
  MatrixXd Q(pi_hat.rows(), m);
  for (int i = 0; i < pi_hat.rows(); ++i) {
    double l1 = 0.0;
    for (int j = 0; j < m; ++j) {
      if (pi_hat(i, j) < 0.0)
        fail(ErrorCode::InvalidPrior, "build_Q expects nonnegative entries");
      l1 += pi_hat(i, j);
    }
    if (!(l1 > 0.0))
      fail(ErrorCode::EmptyCommunity,
           "community " + std::to_string(i) + " has no mass");
    Q.row(i) = (alpha0 + 1.0) / l1 * pi_hat.row(i);
    Q.row(i).array() -= alpha0 / static_cast<double>(m);
  }
  return Q;
}

PEstimate estimate_P(const MatrixXd& Q, const Graph& g) {
  const int n = g.nodes();
  if (Q.cols() != n)
    fail(ErrorCode::DimensionMismatch, "Q columns must cover all nodes");
  const int k = static_cast<int>(Q.rows());

  MatrixXd GQt = MatrixXd::Zero(n, k);  // (G Q^T)(u, j) over u's neighbors
  for (int u = 0; u < n; ++u) {
    auto row = GQt.row(u);
    g.for_neighbors(u, [&](int v) { row += Q.col(v).transpose(); });
  }
  PEstimate out;
  out.raw = Q * GQt;
  out.clamped = out.raw.cwiseMax(0.0).cwiseMin(1.0);
  return out;
}

MatrixXi support_recovery(const Graph& g, const MatrixXd& pi_hat,
                          double alpha0, double xi, const Partition5& part,
                          Warnings* warnings) {
  const int n = g.nodes();
  const int k = static_cast<int>(pi_hat.rows());
  if (pi_hat.cols() != n)
    fail(ErrorCode::DimensionMismatch, "pi_hat must cover all nodes");
  if (!(xi >= 0.0)) fail(ErrorCode::DimensionMismatch, "xi must be >= 0");
  part.validate();

  MatrixXi S = MatrixXi::Zero(k, n);
  for (int t = 0; t < 5; ++t) {
    const NodeSet& crole = part.block(t);
    const NodeSet& brole = part.block((t + 1) % 5);

    MatrixXd pi_b(k, static_cast<int>(brole.size()));
    for (std::size_t j = 0; j < brole.size(); ++j)
      pi_b.col(static_cast<int>(j)) = pi_hat.col(brole[j]);
    MatrixXd Qb = build_Q(pi_b, alpha0, static_cast<int>(brole.size()));

    std::vector<int> pos_b = position_index(brole, n);
    MatrixXd Fc = MatrixXd::Zero(static_cast<int>(crole.size()), k);
    for (std::size_t x = 0; x < crole.size(); ++x) {
      auto row = Fc.row(static_cast<int>(x));
      g.for_neighbors(crole[x], [&](int v) {
        if (pos_b[v] >= 0) row += Qb.col(pos_b[v]).transpose();
      });
    }

    if (alpha0 == 0.0) {
      for (std::size_t x = 0; x < crole.size(); ++x) {
        int best = 0;
        for (int i = 1; i < k; ++i)
          if (Fc(static_cast<int>(x), i) > Fc(static_cast<int>(x), best))
            best = i;  // strict: ties keep the lowest community
        S(best, crole[x]) = 1;
      }
      continue;
    }

    MatrixXd pi_c(k, static_cast<int>(crole.size()));
    for (std::size_t j = 0; j < crole.size(); ++j)
      pi_c.col(static_cast<int>(j)) = pi_hat.col(crole[j]);
    MatrixXd Qc = build_Q(pi_c, alpha0, static_cast<int>(crole.size()));
    MatrixXd Pt = Qc * Fc;  // k x k

    double H = Pt.diagonal().mean();
    double L = 0.0;
    if (k > 1) {
      double sum = 0.0;
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
          if (i != j) sum += Pt(i, j);
      L = sum / (static_cast<double>(k) * (k - 1));
    }
    if (H <= L && warnings)
      warnings->push_back(
          {WarningCode::NotHomophilic,
           "rotation " + std::to_string(t) + ": mean diagonal " +
               std::to_string(H) + " <= mean off-diagonal " +
               std::to_string(L)});

    const double thresh = L + (H - L) * 0.75 * xi;
    for (std::size_t x = 0; x < crole.size(); ++x)
      for (int i = 0; i < k; ++i)
        if (Fc(static_cast<int>(x), i) >= thresh) S(i, crole[x]) = 1;
  }
  return S;
}

}  // namespace mmsb
