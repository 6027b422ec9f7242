#pragma once

#include <map>
#include <optional>
#include <string>

#include "mmsb/reconstruction.hpp"
#include "mmsb/sampling.hpp"

namespace mmsb {

struct FitConfig {
  int k = 0;
  double alpha0 = 0.0;
  std::uint64_t seed = 0;
  std::array<double, 5> fractions = kEqualFifths;

  int N = -1;               // power iterations; <0 = auto
  int L = -1;               // initializer cap; <0 = auto (min(|Y|, 10k+100))
  double tau = -1.0;        // membership threshold; <0 = auto
  double xi_support = -1.0;  // support significance; <0 = auto (c_xi eps_P)
  double xi_deflate = -1.0;  // deflation threshold; <0 = auto (pilot)

  double c_tau = 1.0;
  double c2 = 10.0;
  double c_xi = 4.0;

  bool compute_support = true;

  void validate() const;
};

struct StageTimes {
  double partition = 0, moments = 0, whitening = 0, tensor = 0, power = 0,
         reconstruction = 0, support = 0, total = 0;
};

struct ModelEstimate {
  MatrixXd pi_hat;     // k x n
  MatrixXd p_hat;      // clamped to [0,1]
  MatrixXd p_hat_raw;  // as computed
  VectorXd alpha_hat;  // lambda^{-2}, primary pass
  EigenPairs eigen;    // primary pass
  double residual = 0.0;

  double tau = 0.0;         // threshold actually applied
  double xi_support = 0.0;  // support threshold actually applied
  double xi_deflate = 0.0;  // deflation threshold actually applied
  int iterations = 0;       // N actually used

  MatrixXi support;  // k x n in {0,1}; empty when not computed
  Partition5 partition;
  Alignment alignment;  // pass-2 rows onto pass-1 rows
  Warnings warnings;
  StageTimes times;
};

// The node partition fit() derives from cfg.seed, exposed so a standalone
// support pass can reproduce it.
Partition5 fit_partition(int n, const FitConfig& cfg);

// The full estimation pass: partition, modified adjacencies and whiteners
// from X, whitened 3-star tensor with heads Y, robust tensor power method,
// membership reconstruction for A^c, the role-swapped pass for Y^c,
// alignment on the common block, then Q/P recovery and (optionally)
// support recovery. Deterministic given (graph, config).
ModelEstimate fit(const Graph& g, const FitConfig& cfg);

// Greedy max-correlation matching of truth rows onto estimate rows over
// all columns; perm[r] = estimate row matched to truth row r.
std::vector<int> align_to_truth(const MatrixXd& pi_hat,
                                const MatrixXd& pi_true);

struct Metrics {
  double err_pi_l1 = 0.0;           // max over aligned rows of ||diff||_1
  double err_pi_l1_per_node = 0.0;  // err_pi_l1 / n
  double err_p = 0.0;               // max |P_hat - P| after alignment
  std::optional<double> support_recall;     // S=1 rate on {Pi >= xi}
  std::optional<double> support_precision;  // S=0 rate on {Pi <= xi/2}
  double tensor_residual = 0.0;
  StageTimes times;
};

// Aligns the estimate to the truth (greedy max correlation over all nodes)
// and reports the error statistics. xi_band defaults to the estimate's
// support threshold.
Metrics evaluate(const ModelEstimate& est, const MembershipMatrix& truth,
                 const MatrixXd& P_true, double xi_band = -1.0);

struct TheoryDiagnostics {
  double rho = 0.0;   // (a0+1)/ahat_min
  double zeta = 0.0;  // sqrt(ahat_max/ahat_min) sqrt(max_i (P ahat)_i)/smin(P)
  double separation_stat = 0.0;  // (p-q)/sqrt(p) under the homogeneous proxy
  struct Condition {
    std::string name;
    bool pass = false;
    double margin = 0.0;  // >= 1 passes
  };
  std::vector<Condition> conditions;
  bool all_pass() const;
};

// Evaluates the identifiability/sample-size conditions for a known model
// against the configuration that would be used to fit it.
TheoryDiagnostics check_assumptions(const MmsbModel& model,
                                    const FitConfig& cfg);

}  // namespace mmsb
