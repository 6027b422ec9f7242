#include "doctest.h"

#include <cmath>

#include "mmsb/tensor.hpp"
#include "support/oracle.hpp"
#include "support/util.hpp"

using namespace mmsb;
using testutil::throws_code;

namespace {

Tensor3 random_tensor(int d0, int d1, int d2, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Tensor3 T(d0, d1, d2);
  for (int i = 0; i < d0; ++i)
    for (int j = 0; j < d1; ++j)
      for (int l = 0; l < d2; ++l) T(i, j, l) = gauss(rng);
  return T;
}

MatrixXd random_matrix(int r, int c, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  MatrixXd m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = gauss(rng);
  return m;
}

}  // namespace

TEST_CASE("tensor indexing and arithmetic behave like a dense array") {
  Tensor3 T(2, 3, 4);
  CHECK(T.size() == 24);
  T(1, 2, 3) = 5.0;
  T(0, 0, 0) = -1.0;
  CHECK(T(1, 2, 3) == 5.0);
  CHECK(T.frobenius_norm() == doctest::Approx(std::sqrt(26.0)));

  Tensor3 S(2, 3, 4);
  S(1, 2, 3) = 1.0;
  T += S;
  CHECK(T(1, 2, 3) == 6.0);
  T -= S;
  T *= 2.0;
  CHECK(T(1, 2, 3) == 10.0);
  CHECK(T.max_abs_diff(T) == 0.0);
  S(0, 1, 2) = 0.5;
  CHECK(T.max_abs_diff(S) == 9.0);  // slot (1,2,3): |10 - 1|
}

TEST_CASE("transform agrees with the naive multilinear map") {
  Rng rng(99);
  Tensor3 T = random_tensor(4, 3, 5, rng);
  MatrixXd V1 = random_matrix(4, 2, rng);
  MatrixXd V2 = random_matrix(3, 3, rng);
  MatrixXd V3 = random_matrix(5, 2, rng);
  Tensor3 fast = T.transform(V1, V2, V3);
  Tensor3 slow = oracle::multilinear_transform(T, V1, V2, V3);
  REQUIRE(fast.dim0() == 2);
  REQUIRE(fast.dim1() == 3);
  REQUIRE(fast.dim2() == 2);
  CHECK(fast.max_abs_diff(slow) < 1e-12);
}

TEST_CASE("transform rejects mismatched leg dimensions") {
  Rng rng(1);
  Tensor3 T = random_tensor(3, 3, 3, rng);
  MatrixXd bad = random_matrix(4, 2, rng);
  MatrixXd ok = random_matrix(3, 2, rng);
  CHECK(throws_code(ErrorCode::DimensionMismatch,
                    [&] { T.transform(bad, ok, ok); }));
}

TEST_CASE("apply_Ivv contracts the last two slots") {
  Rng rng(5);
  Tensor3 T = random_tensor(3, 3, 3, rng);
  VectorXd v(3);
  v << 1.0, -2.0, 0.5;
  v.normalize();
  VectorXd got = apply_Ivv(T, v);
  VectorXd want = VectorXd::Zero(3);
  for (int p = 0; p < 3; ++p)
    for (int q = 0; q < 3; ++q)
      for (int r = 0; r < 3; ++r) want[p] += T(p, q, r) * v[q] * v[r];
  CHECK((got - want).cwiseAbs().maxCoeff() < 1e-13);

  // Full contraction is consistent with the partial one.
  CHECK(apply_vvv(T, v) == doctest::Approx(v.dot(got)).epsilon(1e-12));
}

TEST_CASE("apply_Ivv insists on unit vectors") {
  Rng rng(6);
  Tensor3 T = random_tensor(3, 3, 3, rng);
  VectorXd v = VectorXd::Constant(3, 1.0);  // norm sqrt(3)
  CHECK(throws_code(ErrorCode::NotUnitVector, [&] { apply_Ivv(T, v); }));
  CHECK(throws_code(ErrorCode::DimensionMismatch,
                    [&] { apply_Ivv(T, VectorXd::Ones(4).normalized()); }));
}

TEST_CASE("symmetrized averages the six index permutations") {
  Rng rng(8);
  Tensor3 T = random_tensor(3, 3, 3, rng);
  Tensor3 S = symmetrized(T);
  CHECK(max_symmetry_violation(S) < 1e-15);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int l = 0; l < 3; ++l) {
        double avg = (T(i, j, l) + T(i, l, j) + T(j, i, l) + T(j, l, i) +
                      T(l, i, j) + T(l, j, i)) /
                     6.0;
        CHECK(S(i, j, l) == doctest::Approx(avg).epsilon(1e-12));
      }
  CHECK(max_symmetry_violation(T) > 0.0);  // generic tensor is asymmetric
  // Symmetrizing a symmetric tensor is the identity.
  Tensor3 S2 = symmetrized(S);
  CHECK(S.max_abs_diff(S2) < 1e-15);
}

TEST_CASE("weighted_outer_sum matches the naive rank-one accumulation") {
  Rng rng(21);
  const int k = 4, m = 6;
  VectorXd w = random_matrix(m, 1, rng).col(0);
  MatrixXd c1 = random_matrix(k, m, rng);
  MatrixXd c2 = random_matrix(k, m, rng);
  MatrixXd c3 = random_matrix(k, m, rng);
  Tensor3 fast = weighted_outer_sum(w, c1, c2, c3);
  Tensor3 slow = oracle::rank_one_sum(w, c1, c2, c3);
  CHECK(fast.max_abs_diff(slow) < 1e-13);
}

TEST_CASE("rank-one tensors have the expected contractions") {
  // T = 2 u^{x3} for unit u: apply_Ivv(T, u) = 2u, apply_vvv = 2.
  VectorXd u(3);
  u << 2.0, -1.0, 2.0;
  u /= 3.0;
  VectorXd w = VectorXd::Constant(1, 2.0);
  MatrixXd cols = u;
  Tensor3 T = weighted_outer_sum(w, cols, cols, cols);
  VectorXd iv = apply_Ivv(T, u);
  CHECK((iv - 2.0 * u).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(apply_vvv(T, u) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(T.frobenius_norm() == doctest::Approx(2.0).epsilon(1e-12));
}
