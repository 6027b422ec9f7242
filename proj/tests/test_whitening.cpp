#include "doctest.h"

#include <cmath>

#include "mmsb/whitening.hpp"
#include "support/oracle.hpp"
#include "support/util.hpp"

using namespace mmsb;
using testutil::throws_code;

namespace {

MatrixXd random_matrix(int r, int c, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  MatrixXd m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = gauss(rng);
  return m;
}

// Low-rank-plus-noise matrix with a clear spectral gap after rank `r`.
MatrixXd gapped_matrix(int rows, int cols, int r, double noise, Rng& rng) {
  MatrixXd L = random_matrix(rows, r, rng);
  MatrixXd R = random_matrix(cols, r, rng);
  return L * R.transpose() + noise * random_matrix(rows, cols, rng);
}

void check_against_full_svd(const MatrixXd& M, int k, const KSvdOptions& opts,
                            double tol) {
  KSvd got = k_rank_svd(M, k, opts);
  oracle::FullSvd ref = oracle::full_svd(M);
  REQUIRE(got.D.size() == k);
  for (int i = 0; i < k; ++i)
    CHECK(got.D[i] == doctest::Approx(ref.S[i]).epsilon(tol));
  // Compare projectors, which are sign- and rotation-free on simple spectra.
  MatrixXd pu_got = got.U * got.U.transpose();
  MatrixXd pu_ref =
      ref.U.leftCols(k) * ref.U.leftCols(k).transpose();
  CHECK((pu_got - pu_ref).cwiseAbs().maxCoeff() < tol);
  MatrixXd pv_got = got.V * got.V.transpose();
  MatrixXd pv_ref =
      ref.V.leftCols(k) * ref.V.leftCols(k).transpose();
  CHECK((pv_got - pv_ref).cwiseAbs().maxCoeff() < tol);
  // Factorization reproduces the rank-k truncation.
  MatrixXd trunc_ref = ref.U.leftCols(k) * ref.S.head(k).asDiagonal() *
                       ref.V.leftCols(k).transpose();
  MatrixXd trunc_got = got.U * got.D.asDiagonal() * got.V.transpose();
  CHECK((trunc_got - trunc_ref).cwiseAbs().maxCoeff() < tol);
}

}  // namespace

TEST_CASE("dense-path k-SVD matches a full SVD") {
  Rng rng(41);
  MatrixXd M = gapped_matrix(40, 25, 3, 0.05, rng);
  check_against_full_svd(M, 3, KSvdOptions{}, 1e-10);
}

TEST_CASE("subspace-path k-SVD matches a full SVD") {
  Rng rng(42);
  KSvdOptions opts;
  opts.dense_limit = 1;  // force the iterative path even on small inputs
  MatrixXd M = gapped_matrix(120, 80, 4, 0.02, rng);
  check_against_full_svd(M, 4, opts, 1e-8);

  // Both paths agree with each other on the same input.
  KSvd dense = k_rank_svd(M, 4, KSvdOptions{});
  KSvd iter = k_rank_svd(M, 4, opts);
  CHECK((dense.U * dense.U.transpose() - iter.U * iter.U.transpose())
            .cwiseAbs()
            .maxCoeff() < 1e-8);
  for (int i = 0; i < 4; ++i)
    CHECK(dense.D[i] == doctest::Approx(iter.D[i]).epsilon(1e-9));
}

TEST_CASE("k-SVD factors are orthonormal with the documented sign rule") {
  Rng rng(43);
  MatrixXd M = gapped_matrix(30, 30, 2, 0.1, rng);
  KSvd svd = k_rank_svd(M, 2);
  CHECK((svd.U.transpose() * svd.U - MatrixXd::Identity(2, 2))
            .cwiseAbs()
            .maxCoeff() < 1e-12);
  CHECK((svd.V.transpose() * svd.V - MatrixXd::Identity(2, 2))
            .cwiseAbs()
            .maxCoeff() < 1e-12);
  CHECK(svd.D[0] >= svd.D[1]);
  CHECK(svd.D[1] > 0.0);
  for (int j = 0; j < 2; ++j) {
    int at = 0;
    svd.U.col(j).cwiseAbs().maxCoeff(&at);
    CHECK(svd.U(at, j) > 0.0);
  }
}

TEST_CASE("rank-deficient inputs are rejected") {
  Rng rng(44);
  MatrixXd L = random_matrix(20, 2, rng);
  MatrixXd M = L * random_matrix(15, 2, rng).transpose();  // exact rank 2
  CHECK(throws_code(ErrorCode::RankDeficient, [&] { k_rank_svd(M, 3); }));
}

TEST_CASE("whitener normalizes the scaled second moment to the identity") {
  Rng rng(45);
  oracle::ExactMoments em = oracle::build_exact_moments(3, 400, 0.8, rng);
  Whitener w = compute_whitener(em.gmodA, 3);
  const double nx = static_cast<double>(em.part.X.size());
  MatrixXd second =
      (em.gmodA.m * w.W).transpose() * (em.gmodA.m * w.W) / nx;
  CHECK((second - MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(w.source_scale == doctest::Approx(1.0 / std::sqrt(nx)));
  CHECK(w.target == em.part.A);
}

TEST_CASE("whitened F columns are orthonormal under the exact moments") {
  // Phi = W^T F Diag(ahat^{1/2}) must have orthonormal columns when the
  // modified adjacency carries the population second moment exactly.
  Rng rng(46);
  for (double a0 : {0.0, 1.0}) {
    oracle::ExactMoments em = oracle::build_exact_moments(3, 500, a0, rng);
    Whitener w = compute_whitener(em.gmodA, 3);
    MatrixXd phi = w.W.transpose() * em.FA *
                   em.ahat.cwiseSqrt().asDiagonal();
    CHECK((phi.transpose() * phi - MatrixXd::Identity(3, 3))
              .cwiseAbs()
              .maxCoeff() < 1e-6);
  }
}

TEST_CASE("two symmetrizer routes agree and the rotation is orthogonal") {
  Rng rng(47);
  oracle::ExactMoments em = oracle::build_exact_moments(3, 500, 0.5, rng);
  Whitener wa = compute_whitener(em.gmodA, 3);
  Whitener wb = compute_whitener(em.gmodB, 3);

  MatrixXd r_fast = compute_symmetrizer(wb, wa);
  MatrixXd r_full = compute_symmetrizer(wb, em.gmodB, em.gmodA, wa);
  CHECK((r_fast - r_full).cwiseAbs().maxCoeff() < 1e-10);

  // Literal definition with explicit rank-k truncations from the oracle SVD.
  const double nx = static_cast<double>(em.part.X.size());
  auto truncate = [&](const MatrixXd& m, int k) {
    oracle::FullSvd s = oracle::full_svd(m);
    return MatrixXd(s.U.leftCols(k) * s.S.head(k).asDiagonal() *
                    s.V.leftCols(k).transpose());
  };
  MatrixXd r_lit = wb.W.transpose() * truncate(em.gmodB.m, 3).transpose() *
                   truncate(em.gmodA.m, 3) * wa.W / nx;
  CHECK((r_fast - r_lit).cwiseAbs().maxCoeff() < 1e-8);

  // Exact shared row space makes the rotation exactly orthogonal.
  CHECK((r_fast.transpose() * r_fast - MatrixXd::Identity(3, 3))
            .cwiseAbs()
            .maxCoeff() < 1e-6);
}

TEST_CASE("symmetrizer carries the B whitener into the A frame") {
  // (W_B R_AB)^T F_B == W_A^T F_A under exact moments: the property that
  // lets one tensor mix three different leaf blocks.
  Rng rng(48);
  for (double a0 : {0.0, 2.0}) {
    oracle::ExactMoments em = oracle::build_exact_moments(2, 400, a0, rng);
    Whitener wa = compute_whitener(em.gmodA, 2);
    Whitener wb = compute_whitener(em.gmodB, 2);
    MatrixXd rab = compute_symmetrizer(wb, wa);
    MatrixXd lhs = (wb.W * rab).transpose() * em.FB;
    MatrixXd rhs = wa.W.transpose() * em.FA;
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("whitener requires enough rows for the requested rank") {
  Rng rng(49);
  Graph g(30, true);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int u = 0; u < 30; ++u)
    for (int v = 0; v < 30; ++v)
      if (u != v && unif(rng) < 0.4) g.set_edge(u, v);
  NodeSet X = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  NodeSet A = {10, 11};
  ModifiedAdjacency mod = modified_adjacency(g, X, A, 0.0);
  CHECK(throws_code(ErrorCode::DimensionMismatch,
                    [&] { compute_whitener(mod, 3); }));
}
