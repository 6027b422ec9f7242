#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mmsb/reconstruction.hpp"
#include "mmsb/sampling.hpp"
#include "support/oracle.hpp"
#include "support/util.hpp"

using namespace mmsb;
using testutil::has_warning;
using testutil::throws_code;

namespace {

std::vector<VectorXd> spectral_inits(const MatrixXd& M, int extra, Rng& rng) {
  std::vector<VectorXd> inits;
  for (int j = 0; j < M.cols(); ++j) inits.push_back(M.col(j).normalized());
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int c = 0; c < extra; ++c) {
    VectorXd v(M.rows());
    for (int i = 0; i < M.rows(); ++i) v[i] = gauss(rng);
    inits.push_back(v.normalized());
  }
  return inits;
}

}  // namespace

TEST_CASE("exact moments reproduce memberships through the whitened chain") {
  Rng rng(501);
  struct Case {
    int k;
    double alpha0;
  };
  for (Case c : {Case{2, 0.0}, Case{3, 0.5}, Case{4, 2.0}}) {
    CAPTURE(c.k);
    CAPTURE(c.alpha0);
    oracle::ExactMoments em = oracle::build_exact_moments(c.k, 600, c.alpha0, rng);
    const int k = c.k;

    Whitener wa = compute_whitener(em.gmodA, k);
    Whitener wb = compute_whitener(em.gmodB, k);
    Whitener wc = compute_whitener(em.gmodC, k);
    MatrixXd rab = compute_symmetrizer(wb, wa);
    MatrixXd rac = compute_symmetrizer(wc, wa);

    MatrixXd MA = wa.W.transpose() * em.FA;
    MatrixXd MB = (wb.W * rab).transpose() * em.FB;
    MatrixXd MC = (wc.W * rac).transpose() * em.FC;
    // All three legs agree in the A frame under exact moments.
    CHECK((MA - MB).cwiseAbs().maxCoeff() < 1e-8);
    CHECK((MA - MC).cwiseAbs().maxCoeff() < 1e-8);

    Tensor3 T = symmetrized(oracle::rank_one_sum(em.ahat, MA, MB, MC));
    auto inits = spectral_inits(MA, 10, rng);
    EigenPairs pairs =
        tensor_eigen(T, inits, 100, 0.01 * em.ahat.cwiseSqrt().cwiseInverse().maxCoeff());

    // Eigenvalues are ahat^{-1/2} up to extraction order.
    VectorXd want = em.ahat.cwiseSqrt().cwiseInverse();
    VectorXd got = pairs.lambda;
    std::sort(want.data(), want.data() + k);
    std::sort(got.data(), got.data() + k);
    CHECK((want - got).cwiseAbs().maxCoeff() < 1e-8);

    // Membership recovery for the nodes outside A via the linear chain
    // Diag(lambda)^{-1} Phi^T W_A^T F_A Pi.
    NodeSet rest;
    for (int b : {1, 2, 3, 4})
      for (int v : em.part.block(b)) rest.push_back(v);
    std::sort(rest.begin(), rest.end());
    MatrixXd pi_rest(k, static_cast<int>(rest.size()));
    for (std::size_t j = 0; j < rest.size(); ++j)
      pi_rest.col(static_cast<int>(j)) = em.pi.col(rest[j]);

    MatrixXd tilde = pairs.lambda.cwiseInverse().asDiagonal() *
                     pairs.phi.transpose() * MA * pi_rest;

    // tilde should equal pi_rest with rows permuted; match rows greedily.
    std::vector<int> taken(k, 0);
    double worst = 0.0;
    for (int r = 0; r < k; ++r) {
      int best = -1;
      double best_err = 1e100;
      for (int s = 0; s < k; ++s) {
        if (taken[s]) continue;
        double err =
            (tilde.row(s) - pi_rest.row(r)).cwiseAbs().maxCoeff();
        if (err < best_err) {
          best_err = err;
          best = s;
        }
      }
      taken[best] = 1;
      worst = std::max(worst, best_err);
    }
    CHECK(worst < 1e-6);

    // lambda^{-2} recovers the community weights.
    VectorXd ah = pairs.lambda.array().square().inverse();
    VectorXd ah_want = em.ahat;
    std::sort(ah.data(), ah.data() + k);
    std::sort(ah_want.data(), ah_want.data() + k);
    CHECK((ah - ah_want).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("estimate_members projects neighborhood rows and thresholds") {
  Rng rng(502);
  const int n = 40, k = 3;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Graph g(n, true);
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v)
      if (u != v && unif(rng) < 0.3) g.set_edge(u, v);

  NodeSet A = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  NodeSet targets = {10, 12, 14, 16};
  Whitener w;
  std::normal_distribution<double> gauss(0.0, 1.0);
  w.W = MatrixXd::NullaryExpr(10, k, [&] { return gauss(rng); });
  w.target = A;

  EigenPairs eigen;
  eigen.lambda = VectorXd::Constant(k, 1.0);
  eigen.lambda << 2.0, 1.5, 1.0;
  eigen.phi = oracle::random_orthonormal(k, k, rng);

  MemberEstimate est = estimate_members(eigen, w, g, targets, 0.0);
  MatrixXd proj = eigen.lambda.cwiseInverse().asDiagonal() *
                  eigen.phi.transpose() * w.W.transpose();
  MatrixXd want = proj * dense_block(g, targets, A).transpose();
  MatrixXd kept = ((want.array() >= 0.0).cast<double>() * want.array()).matrix();
  CHECK((est.pi - kept).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(est.alpha_hat[0] == doctest::Approx(0.25));

  // Raising tau zeroes small entries exactly.
  const double tau = 0.3;
  MemberEstimate cut = estimate_members(eigen, w, g, targets, tau);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < 4; ++j) {
      if (want(i, j) < tau)
        CHECK(cut.pi(i, j) == 0.0);
      else
        CHECK(cut.pi(i, j) == doctest::Approx(want(i, j)));
    }

  NodeSet inside = {3};
  CHECK(throws_code(ErrorCode::OverlappingSets,
                    [&] { estimate_members(eigen, w, g, inside, 0.0); }));
  eigen.lambda[2] = 1e-12;
  CHECK(throws_code(ErrorCode::NonPositiveEigenvalue,
                    [&] { estimate_members(eigen, w, g, targets, 0.0); }));
}

TEST_CASE("default threshold is 0.5 for block models and scales otherwise") {
  CHECK(default_tau(3, 0.0, 1000, 0.6, 0.1) == 0.5);
  // k sqrt(a0)/sqrt(n) * sqrt(p)/(p-q) at k=3, a0=1, n=1e4, p=.6, q=.1.
  CHECK(default_tau(3, 1.0, 10000, 0.6, 0.1) ==
        doctest::Approx(0.0464758).epsilon(1e-5));
  CHECK(default_tau(3, 1.0, 10000, 0.6, 0.1, 2.0) ==
        doctest::Approx(2.0 * 0.0464758).epsilon(1e-5));
  CHECK(throws_code(ErrorCode::DegenerateSeparation,
                    [&] { default_tau(3, 1.0, 1000, 0.1, 0.6); }));
  CHECK(throws_code(ErrorCode::InvalidProbability,
                    [&] { default_tau(3, 1.0, 1000, 1.2, 0.1); }));
}

TEST_CASE("greedy alignment recovers a row permutation") {
  Rng rng(503);
  const int k = 3, n = 60;
  std::normal_distribution<double> gauss(0.0, 1.0);
  MatrixXd first = MatrixXd::NullaryExpr(k, n, [&] { return gauss(rng); });
  first = first.cwiseAbs();
  MatrixXd second(k, n);
  // second row 0 <- first row 1, row 1 <- first row 2, row 2 <- first row 0.
  second.row(0) = first.row(1);
  second.row(1) = first.row(2);
  second.row(2) = first.row(0);
  second.array() += 0.01;  // affine shifts leave correlations intact

  NodeSet common(n);
  std::iota(common.begin(), common.end(), 0);
  Alignment al = align_estimates(first, second, common);
  CHECK(al.perm == std::vector<int>{2, 0, 1});
  CHECK(al.total_score == doctest::Approx(3.0).epsilon(1e-9));
  CHECK_FALSE(al.ambiguous);

  // Anti-correlated rows still match through |corr|.
  second.row(0) = -first.row(1);
  Alignment al2 = align_estimates(first, second, common);
  CHECK(al2.perm == std::vector<int>{2, 0, 1});

  // Duplicated rows tie and set the ambiguity flag.
  MatrixXd dup = first;
  dup.row(2) = dup.row(1);
  Alignment al3 = align_estimates(first, dup, common);
  CHECK(al3.ambiguous);
}

TEST_CASE("build_Q rows sum to one and need positive mass") {
  Rng rng(504);
  VectorXd alpha(3);
  alpha << 0.5, 1.0, 1.5;
  MatrixXd pi = sample_dirichlet(alpha, 200, rng);
  for (double a0 : {0.0, 3.0}) {
    MatrixXd Q = build_Q(pi, a0, 200);
    VectorXd sums = Q.rowwise().sum();
    CHECK((sums - VectorXd::Ones(3)).cwiseAbs().maxCoeff() < 1e-12);
  }
  MatrixXd zero_row = pi;
  zero_row.row(1).setZero();
  CHECK(throws_code(ErrorCode::EmptyCommunity,
                    [&] { build_Q(zero_row, 0.0, 200); }));
  MatrixXd neg = pi;
  neg(0, 0) = -0.1;
  CHECK(throws_code(ErrorCode::InvalidPrior, [&] { build_Q(neg, 0.0, 200); }));
  CHECK(throws_code(ErrorCode::DimensionMismatch,
                    [&] { build_Q(pi, 0.0, 100); }));
}

TEST_CASE("build_Q inverts memberships in expectation") {
  // Block model: Q Pi^T is exactly the identity. Dirichlet: it converges to
  // the identity as the sample grows.
  Rng rng(505);
  VectorXd prior = VectorXd::Constant(3, 1.0 / 3.0);
  MatrixXd hard = sample_block_labels(prior, 900, rng);
  MatrixXd Qh = build_Q(hard, 0.0, 900);
  MatrixXd eye = Qh * hard.transpose();
  CHECK((eye - MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-12);

  VectorXd alpha = VectorXd::Constant(3, 0.4);  // alpha0 = 1.2
  MatrixXd soft = sample_dirichlet(alpha, 50000, rng);
  MatrixXd Qs = build_Q(soft, 1.2, 50000);
  MatrixXd near = Qs * soft.transpose();
  CHECK((near - MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() < 0.05);
}

TEST_CASE("estimate_P recovers block connectivity from true memberships") {
  Rng rng(506);
  const int k = 3, n = 1200;
  auto [P, prior] = make_homogeneous(k, 0.6, 0.1);
  MembershipMatrix pi;
  pi.pi = sample_block_labels(prior, n, rng);
  Graph g = sample_graph(pi, P, true, rng);
  MatrixXd Q = build_Q(pi.pi, 0.0, n);
  PEstimate est = estimate_P(Q, g);
  CHECK((est.clamped - P).cwiseAbs().maxCoeff() < 0.02);
  CHECK(est.clamped.minCoeff() >= 0.0);
  CHECK(est.clamped.maxCoeff() <= 1.0);
  CHECK((est.raw - est.clamped).cwiseAbs().maxCoeff() < 0.02);
}

TEST_CASE("support recovery labels every node in a clean block model") {
  Rng rng(507);
  const int k = 3, n = 1000;
  auto [P, prior] = make_homogeneous(k, 0.7, 0.1);
  MembershipMatrix pi;
  pi.pi = sample_block_labels(prior, n, rng);
  Graph g = sample_graph(pi, P, true, rng);
  Partition5 part = partition_nodes(n, k, rng, kEqualFifths);

  Warnings warnings;
  MatrixXi S = support_recovery(g, pi.pi, 0.0, 0.5, part, &warnings);
  REQUIRE(S.rows() == k);
  REQUIRE(S.cols() == n);
  int wrong = 0;
  for (int v = 0; v < n; ++v)
    for (int i = 0; i < k; ++i)
      if (S(i, v) != (pi.pi(i, v) >= 0.5 ? 1 : 0)) ++wrong;
  CHECK(wrong == 0);
  CHECK_FALSE(has_warning(warnings, WarningCode::NotHomophilic));
}

TEST_CASE("support recovery warns when communities repel") {
  Rng rng(508);
  const int k = 2, n = 800;
  MatrixXd P(k, k);
  P << 0.1, 0.6, 0.6, 0.1;  // off-diagonal dominates
  MmsbModel model;
  model.k = k;
  model.n = n;
  model.alpha0 = 1.0;
  model.alpha = VectorXd::Constant(k, 0.5);
  model.P = P;
  MembershipMatrix pi = sample_membership(model, rng);
  Graph g = sample_graph(pi, P, true, rng);
  Partition5 part = partition_nodes(n, k, rng, kEqualFifths);
  Warnings warnings;
  support_recovery(g, pi.pi, 1.0, 0.5, part, &warnings);
  CHECK(has_warning(warnings, WarningCode::NotHomophilic));
}

TEST_CASE("single-community reconstruction degenerates gracefully") {
  Rng rng(509);
  const int n = 300;
  MatrixXd pi = MatrixXd::Ones(1, n);
  MatrixXd Q = build_Q(pi, 0.0, n);
  CHECK(Q.row(0).sum() == doctest::Approx(1.0));
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Graph g(n, true);
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v)
      if (u != v && unif(rng) < 0.23) g.set_edge(u, v);
  PEstimate est = estimate_P(Q, g);
  CHECK(est.clamped(0, 0) == doctest::Approx(g.density()).epsilon(0.05));
}
