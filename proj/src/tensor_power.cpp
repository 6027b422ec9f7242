#include "mmsb/tensor_power.hpp"

#include <cmath>
#include <limits>

namespace mmsb {

int default_iteration_count(int k, double gap_ratio, double c2) {
  if (k < 1) fail(ErrorCode::DimensionMismatch, "k must be >= 1");
  if (!(gap_ratio > 0.0 && gap_ratio <= 1.0))
    fail(ErrorCode::DimensionMismatch, "gap_ratio must lie in (0, 1]");
  if (!(c2 > 0.0)) fail(ErrorCode::DimensionMismatch, "c2 must be positive");
  double inner = std::log(static_cast<double>(k)) +
                 std::log(std::log(1.0 / gap_ratio));
  if (!std::isfinite(inner)) return 30;  // gap_ratio ~ 1: the floor rules
  return std::max(30, static_cast<int>(std::ceil(c2 * inner)));
}

namespace {

struct Deflator {
  const VectorXd* lambda = nullptr;
  const MatrixXd* phi = nullptr;
  int count = 0;  // extracted so far
  double xi = 0.0;

  // Tdef(I, theta, theta), with the adaptive set evaluated at theta.
  VectorXd apply(const Tensor3& T, const VectorXd& theta, int* removed) const {
    VectorXd out = detail::apply_Ivv_unchecked(T, theta);
    int hits = 0;
    for (int j = 0; j < count; ++j) {
      double dot = phi->col(j).dot(theta);
      if (std::abs((*lambda)[j] * dot) > xi) {
        out -= (*lambda)[j] * dot * dot * phi->col(j);
        ++hits;
      }
    }
    if (removed) *removed = hits;
    return out;
  }

  double value(const Tensor3& T, const VectorXd& theta, int* removed) const {
    double out = detail::apply_vvv_unchecked(T, theta);
    int hits = 0;
    for (int j = 0; j < count; ++j) {
      double dot = phi->col(j).dot(theta);
      if (std::abs((*lambda)[j] * dot) > xi) {
        out -= (*lambda)[j] * dot * dot * dot;
        ++hits;
      }
    }
    if (removed) *removed = hits;
    return out;
  }
};

constexpr double kCollapse = 1e-300;
constexpr double kEarlyExit = 1e-13;

// Runs up to N update steps; returns false when the image collapses.
bool iterate(const Tensor3& T, const Deflator& defl, VectorXd& theta, int N,
             int* iters_done, double* last_delta) {
  double delta = std::numeric_limits<double>::infinity();
  int t = 0;
  for (; t < N; ++t) {
    VectorXd u = defl.apply(T, theta, nullptr);
    double nrm = u.norm();
    if (!std::isfinite(nrm)) fail(ErrorCode::NonFiniteIterate, "power iterate");
    if (nrm < kCollapse) return false;
    u /= nrm;
    delta = (u - theta).norm();
    theta = u;
    if (delta < kEarlyExit) {
      ++t;
      break;
    }
  }
  if (iters_done) *iters_done = t;
  if (last_delta) *last_delta = delta;
  return true;
}

std::vector<VectorXd> checked_inits(const Tensor3& T,
                                    const std::vector<VectorXd>& inits) {
  if (!T.cubic()) fail(ErrorCode::DimensionMismatch, "tensor must be cubic");
  const int k = T.dim0();
  if (static_cast<int>(inits.size()) < k)
    fail(ErrorCode::NoInitializers,
         "need at least k = " + std::to_string(k) + " initializers");
  std::vector<VectorXd> out;
  out.reserve(inits.size());
  for (const VectorXd& v : inits) {
    if (v.size() != k)
      fail(ErrorCode::DimensionMismatch, "initializer length != k");
    double nrm = v.norm();
    if (!(nrm > 0.0) || !std::isfinite(nrm))
      fail(ErrorCode::NoInitializers, "zero or non-finite initializer");
    out.push_back(v / nrm);
  }
  return out;
}

}  // namespace

EigenPairs tensor_eigen(const Tensor3& T, const std::vector<VectorXd>& inits,
                        int N, double xi) {
  if (N < 1) fail(ErrorCode::DimensionMismatch, "N must be >= 1");
  if (!(xi >= 0.0)) fail(ErrorCode::DimensionMismatch, "xi must be >= 0");
  const std::vector<VectorXd> starts = checked_inits(T, inits);
  const int k = T.dim0();

  EigenPairs pairs;
  pairs.lambda = VectorXd::Zero(k);
  pairs.phi = MatrixXd::Zero(k, k);
  pairs.info.resize(k);

  Deflator defl{&pairs.lambda, &pairs.phi, 0, xi};
  for (int i = 0; i < k; ++i) {
    defl.count = i;
    double best_score = -std::numeric_limits<double>::infinity();
    int best_tau = -1;
    VectorXd best_theta;
    for (std::size_t tau = 0; tau < starts.size(); ++tau) {
      VectorXd theta = starts[tau];
      if (!iterate(T, defl, theta, N, nullptr, nullptr)) continue;
      double score = defl.value(T, theta, nullptr);
      if (score > best_score) {  // strict: ties keep the lowest tau
        best_score = score;
        best_tau = static_cast<int>(tau);
        best_theta = theta;
      }
    }
    if (best_tau < 0)
      fail(ErrorCode::NonFiniteIterate,
           "every candidate trajectory collapsed to zero");

    PowerPairInfo& info = pairs.info[i];
    info.best_init = best_tau;
    if (!iterate(T, defl, best_theta, N, &info.refine_iters,
                 &info.final_delta))
      fail(ErrorCode::NonFiniteIterate, "refinement trajectory collapsed");

    double lam = defl.value(T, best_theta, &info.deflated);
    if (lam < 0.0) {  // T(-v)^3 = -T(v)^3: flip to the positive pair
      lam = -lam;
      best_theta = -best_theta;
    }
    pairs.lambda[i] = lam;
    pairs.phi.col(i) = best_theta;
  }
  return pairs;
}

double top_eigenvalue_estimate(const Tensor3& T,
                               const std::vector<VectorXd>& inits, int N) {
  const std::vector<VectorXd> starts = checked_inits(T, inits);
  VectorXd none_lambda;
  MatrixXd none_phi;
  Deflator defl{&none_lambda, &none_phi, 0, 0.0};
  double best = 0.0;
  for (const VectorXd& s : starts) {
    VectorXd theta = s;
    if (!iterate(T, defl, theta, N, nullptr, nullptr)) continue;
    best = std::max(best, std::abs(defl.value(T, theta, nullptr)));
  }
  return best;
}

double residual_norm(const Tensor3& T, const EigenPairs& pairs, int restarts,
                     std::uint64_t seed) {
  if (!T.cubic()) fail(ErrorCode::DimensionMismatch, "tensor must be cubic");
  const int k = T.dim0();
  if (pairs.phi.rows() != k)
    fail(ErrorCode::DimensionMismatch, "eigenpair dimension mismatch");

  Tensor3 R = T;
  for (int i = 0; i < pairs.lambda.size(); ++i) {
    const VectorXd v = pairs.phi.col(i);
    const double lam = pairs.lambda[i];
    for (int p = 0; p < k; ++p)
      for (int q = 0; q < k; ++q)
        for (int r = 0; r < k; ++r) R(p, q, r) -= lam * v[p] * v[q] * v[r];
  }

  Rng rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double best = 0.0;
  for (int s = 0; s < restarts; ++s) {
    VectorXd theta(k);
    for (int i = 0; i < k; ++i) theta[i] = gauss(rng);
    double nrm = theta.norm();
    if (nrm < kCollapse) continue;
    theta /= nrm;
    for (int t = 0; t < 50; ++t) {
      VectorXd u = detail::apply_Ivv_unchecked(R, theta);
      double un = u.norm();
      if (un < kCollapse) break;
      u /= un;
      if ((u - theta).norm() < kEarlyExit) {
        theta = u;
        break;
      }
      theta = u;
    }
    best = std::max(best, std::abs(detail::apply_vvv_unchecked(R, theta)));
  }
  return best;
}

}  // namespace mmsb
