#include "mmsb/whitening.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <cmath>

namespace mmsb {

namespace {

void fix_signs(MatrixXd& U, MatrixXd& V) {
  for (int j = 0; j < U.cols(); ++j) {
    int at = 0;
    double best = 0.0;
    for (int i = 0; i < U.rows(); ++i) {
      double a = std::abs(U(i, j));
      if (a > best) {  // strict: first occurrence wins ties
        best = a;
        at = i;
      }
    }
    if (U(at, j) < 0.0) {
      U.col(j) = -U.col(j);
      V.col(j) = -V.col(j);
    }
  }
}

void check_conditioning(const VectorXd& D, int k) {
  if (!(D[0] > 0.0) || D[k - 1] / D[0] < 1e-10)
    fail(ErrorCode::RankDeficient,
         "sigma_k/sigma_1 = " +
             std::to_string(D[0] > 0.0 ? D[k - 1] / D[0] : 0.0) +
             " below 1e-10");
}

KSvd dense_svd(const MatrixXd& M, int k) {
  Eigen::BDCSVD<MatrixXd> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  KSvd out;
  out.U = svd.matrixU().leftCols(k);
  out.D = svd.singularValues().head(k);
  out.V = svd.matrixV().leftCols(k);
  return out;
}

// Deterministic subspace iteration on the shorter side of M, run to Ritz
// convergence, then a Rayleigh-Ritz finish. Matches the dense path to the
// requested tolerance on matrices with a spectral gap at k (the whitening
// inputs have one by construction; if not, RankDeficient fires anyway).
KSvd subspace_svd(const MatrixXd& M, int k, const KSvdOptions& opts) {
  // Iterate an orthonormal block on the shorter side of A; the other side
  // is reached through products, so A is never copied or transposed.
  const MatrixXd& A = M;
  const int m = static_cast<int>(A.rows());
  const int n = static_cast<int>(A.cols());
  const bool left_small = m <= n;
  const int small_dim = left_small ? m : n;
  const int ell = std::min(small_dim, k + opts.oversample);

  // Fixed-seed start block: reproducible across runs by construction.
  Rng rng(0x5b5face0ull);
  MatrixXd Z(small_dim, ell);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int j = 0; j < ell; ++j)
    for (int i = 0; i < small_dim; ++i) Z(i, j) = gauss(rng);

  auto orth = [](MatrixXd& B) {
    Eigen::HouseholderQR<MatrixXd> qr(B);
    B = qr.householderQ() * MatrixXd::Identity(B.rows(), B.cols());
  };
  orth(Z);

  VectorXd prev = VectorXd::Zero(k);
  MatrixXd W;
  for (int it = 0; it < opts.max_iter; ++it) {
    if (left_small)
      W = A.transpose() * Z;  // n x ell
    else
      W = A * Z;  // m x ell
    // Ritz singular values = singular values of W (Z orthonormal).
    Eigen::BDCSVD<MatrixXd> small(W);
    VectorXd ritz = small.singularValues().head(k);
    double delta = 0.0;
    for (int i = 0; i < k; ++i)
      delta = std::max(delta, std::abs(ritz[i] - prev[i]) /
                                  std::max(ritz[0], 1e-300));
    prev = ritz;
    if (left_small)
      Z = A * W;  // m x ell
    else
      Z = A.transpose() * W;  // n x ell
    orth(Z);
    if (it > 0 && delta < opts.tol) break;
  }

  // Rayleigh-Ritz finish: project, small dense SVD, lift back.
  KSvd out;
  if (left_small) {
    MatrixXd B = A.transpose() * Z;  // n x ell, A ~ Z B^T
    Eigen::BDCSVD<MatrixXd> small(B, Eigen::ComputeThinU | Eigen::ComputeThinV);
    out.U = Z * small.matrixV().leftCols(k);
    out.D = small.singularValues().head(k);
    out.V = small.matrixU().leftCols(k);
  } else {
    MatrixXd B = A * Z;  // m x ell
    Eigen::BDCSVD<MatrixXd> small(B, Eigen::ComputeThinU | Eigen::ComputeThinV);
    out.U = small.matrixU().leftCols(k);
    out.D = small.singularValues().head(k);
    out.V = Z * small.matrixV().leftCols(k);
  }
  return out;
}

}  // namespace

KSvd k_rank_svd(const MatrixXd& M, int k, const KSvdOptions& opts) {
  const int m = static_cast<int>(M.rows());
  const int n = static_cast<int>(M.cols());
  if (k < 1) fail(ErrorCode::DimensionMismatch, "k must be >= 1");
  if (k > std::min(m, n))
    fail(ErrorCode::DimensionMismatch, "k exceeds min(rows, cols)");

  KSvd out;
  if (std::min(m, n) <= opts.dense_limit ||
      k + opts.oversample >= std::min(m, n))
    out = dense_svd(M, k);
  else
    out = subspace_svd(M, k, opts);
  check_conditioning(out.D, k);
  fix_signs(out.U, out.V);
  return out;
}

Whitener compute_whitener(const ModifiedAdjacency& gmod, int k,
                          const KSvdOptions& opts) {
  const int sz_x = static_cast<int>(gmod.m.rows());
  const int sz_a = static_cast<int>(gmod.m.cols());
  if (k < 1 || k > std::min(sz_x, sz_a))
    fail(ErrorCode::DimensionMismatch,
         "whitening needs 1 <= k <= min(|X|, |A|)");
  const double scale = 1.0 / std::sqrt(static_cast<double>(sz_x));
  KSvd svd = k_rank_svd((scale * gmod.m).transpose(), k, opts);
  Whitener w;
  w.U = svd.U;
  w.D = svd.D;
  w.V = svd.V;
  w.W = svd.U * svd.D.cwiseInverse().asDiagonal();
  w.source_scale = scale;
  w.source = gmod.source;
  w.target = gmod.target;
  return w;
}

static void require_shared_source(const Whitener& wb, const Whitener& wa) {
  if (wb.source != wa.source)
    fail(ErrorCode::DimensionMismatch,
         "symmetrizer needs whiteners built from the same X");
  if (wb.W.cols() != wa.W.cols())
    fail(ErrorCode::DimensionMismatch, "symmetrizer rank mismatch");
}

MatrixXd compute_symmetrizer(const Whitener& wb, const ModifiedAdjacency& gb,
                             const ModifiedAdjacency& ga, const Whitener& wa) {
  require_shared_source(wb, wa);
  if (gb.source != wb.source || ga.source != wa.source)
    fail(ErrorCode::DimensionMismatch,
         "modified adjacencies disagree with the whiteners' X");
  if (gb.m.cols() != wb.W.rows() || ga.m.cols() != wa.W.rows())
    fail(ErrorCode::DimensionMismatch, "whitener rows != block columns");
  const double inv_x = 1.0 / static_cast<double>(ga.m.rows());
  return inv_x * (gb.m * wb.W).transpose() * (ga.m * wa.W);
}

MatrixXd compute_symmetrizer(const Whitener& wb, const Whitener& wa) {
  require_shared_source(wb, wa);
  return wb.V.transpose() * wa.V;
}

}  // namespace mmsb
