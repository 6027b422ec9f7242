#include "mmsb/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <tuple>
#include <utility>

namespace mmsb {

namespace {

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch())
      .count();
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t x = seed ^ (0x9e3779b97f4a7c15ull * (stream + 1));
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

NodeSet sorted_union(std::initializer_list<const NodeSet*> sets) {
  NodeSet out;
  for (const NodeSet* s : sets) out.insert(out.end(), s->begin(), s->end());
  std::sort(out.begin(), out.end());
  return out;
}

// Whitened neighborhood initializers from the head block, ascending ids.
std::vector<VectorXd> head_initializers(const Graph& g, const Whitener& w,
                                        const NodeSet& heads, int cap, int k,
                                        Warnings* warnings) {
  std::vector<int> pos = position_index(w.target, g.nodes());
  std::vector<VectorXd> inits;
  inits.reserve(cap);
  for (int h : heads) {
    if (static_cast<int>(inits.size()) >= cap) break;
    VectorXd u = VectorXd::Zero(k);
    g.for_neighbors(h, [&](int v) {
      if (pos[v] >= 0) u += w.W.row(pos[v]).transpose();
    });
    double nrm = u.norm();
    if (nrm > 1e-12) inits.push_back(u / nrm);
  }
  if (static_cast<int>(inits.size()) < k) {
    if (warnings)
      warnings->push_back({WarningCode::FewInitializers,
                           "only " + std::to_string(inits.size()) +
                               " usable whitened neighborhoods; adding basis "
                               "vectors"});
    for (int j = 0; j < k; ++j) {
      VectorXd e = VectorXd::Zero(k);
      e[j] = 1.0;
      inits.push_back(e);
    }
  }
  return inits;
}

struct PassResult {
  EigenPairs eigen;
  MatrixXd pi_raw;  // k x |targets|, pre-threshold
  NodeSet targets;
  double xi_deflate = 0.0;
  double residual = 0.0;
};

// One estimation pass: whitened tensor with the given head/leaf roles,
// power method, raw (tau = 0) membership estimate on the A-role complement.
PassResult run_pass(const Graph& g, const Partition5& roles,
                    const FitConfig& cfg, const Whitener& wa,
                    const Whitener& wb, const Whitener& wc, int N,
                    Warnings* warnings, StageTimes* times) {
  const int k = cfg.k;
  double t0 = now_seconds();
  MatrixXd rab = compute_symmetrizer(wb, wa);
  MatrixXd rac = compute_symmetrizer(wc, wa);
  Tensor3 T = whitened_threestar(g, roles, cfg.alpha0, wa.W, wb.W * rab,
                                 wc.W * rac);
  double t1 = now_seconds();
  times->tensor += t1 - t0;

  int cap = cfg.L > 0
                ? cfg.L
                : std::min<int>(static_cast<int>(roles.Y.size()),
                                10 * k + 100);
  std::vector<VectorXd> inits =
      head_initializers(g, wa, roles.Y, cap, k, warnings);

  PassResult out;
  out.xi_deflate = cfg.xi_deflate >= 0.0
                       ? cfg.xi_deflate
                       : 0.01 * top_eigenvalue_estimate(T, inits, N);
  out.eigen = tensor_eigen(T, inits, N, out.xi_deflate);
  out.residual = residual_norm(T, out.eigen);
  double t2 = now_seconds();
  times->power += t2 - t1;

  out.targets = sorted_union({&roles.B, &roles.C, &roles.X, &roles.Y});
  out.pi_raw = estimate_members(out.eigen, wa, g, out.targets, 0.0).pi;
  times->reconstruction += now_seconds() - t2;
  return out;
}

MatrixXd thresholded(const MatrixXd& m, double tau) {
  return ((m.array() >= tau).cast<double>() * m.array()).matrix();
}

// Pilot P estimate from a raw single-pass membership block: negative raw
// entries are clipped (build_Q needs mass, not sign) and only the block's
// own columns are used.
std::pair<double, double> pilot_pq(const Graph& g, const MatrixXd& pi_raw,
                                   const NodeSet& targets, double alpha0) {
  MatrixXd clipped = pi_raw.cwiseMax(0.0);
  MatrixXd Q = build_Q(clipped, alpha0, static_cast<int>(targets.size()));
  // Q G Q^T over the target columns only.
  const int k = static_cast<int>(Q.rows());
  std::vector<int> pos = position_index(targets, g.nodes());
  MatrixXd GQt = MatrixXd::Zero(static_cast<int>(targets.size()), k);
  for (std::size_t u = 0; u < targets.size(); ++u) {
    auto row = GQt.row(static_cast<int>(u));
    g.for_neighbors(targets[u], [&](int v) {
      if (pos[v] >= 0) row += Q.col(pos[v]).transpose();
    });
  }
  MatrixXd P = Q * GQt;
  double p = P.diagonal().mean();
  double q = 0.0;
  if (k > 1) {
    double sum = 0.0;
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j)
        if (i != j) sum += P(i, j);
    q = sum / (static_cast<double>(k) * (k - 1));
  }
  return {p, q};
}

}  // namespace

void FitConfig::validate() const {
  if (k < 1) fail(ErrorCode::DimensionMismatch, "k must be >= 1");
  if (alpha0 < 0.0) fail(ErrorCode::NonPositiveAlpha, "alpha0 < 0");
  for (double f : fractions)
    if (!(f > 0.0)) fail(ErrorCode::EmptyPartition, "fractions must be > 0");
  if (!(c_tau > 0.0 && c2 > 0.0 && c_xi > 0.0))
    fail(ErrorCode::BadConfig, "constants must be positive");
}

Partition5 fit_partition(int n, const FitConfig& cfg) {
  Rng part_rng(mix_seed(cfg.seed, 1));
  return partition_nodes(n, cfg.k, part_rng, cfg.fractions);
}

ModelEstimate fit(const Graph& g, const FitConfig& cfg) {
  cfg.validate();
  const int k = cfg.k;
  const int n = g.nodes();

  ModelEstimate est;
  double t_start = now_seconds();

  double t0 = now_seconds();
  est.partition = fit_partition(n, cfg);
  const Partition5& part = est.partition;
  est.times.partition = now_seconds() - t0;

  const int N =
      cfg.N > 0 ? cfg.N : default_iteration_count(k, 0.25, cfg.c2);
  est.iterations = N;

  // Whiteners for every leaf block, all against X. B/C serve both passes.
  auto whiten_block = [&](const NodeSet& block) {
    double tm = now_seconds();
    ModifiedAdjacency gmod = modified_adjacency(g, part.X, block, cfg.alpha0);
    est.times.moments += now_seconds() - tm;
    tm = now_seconds();
    Whitener w = compute_whitener(gmod, k);
    est.times.whitening += now_seconds() - tm;
    return w;
  };
  Whitener wa = whiten_block(part.A);
  Whitener wb = whiten_block(part.B);
  Whitener wc = whiten_block(part.C);
  Whitener wy = whiten_block(part.Y);

  // Pass 1: heads Y, leaves {A, B, C}; estimates memberships on A^c.
  PassResult pass1 =
      run_pass(g, part, cfg, wa, wb, wc, N, &est.warnings, &est.times);

  // Pass 2: swap the A and Y roles; estimates memberships on Y^c.
  Partition5 swapped = part;
  std::swap(swapped.A, swapped.Y);
  PassResult pass2 =
      run_pass(g, swapped, cfg, wy, wb, wc, N, &est.warnings, &est.times);

  est.eigen = pass1.eigen;
  est.residual = pass1.residual;
  est.xi_deflate = pass1.xi_deflate;
  est.alpha_hat = pass1.eigen.lambda.array().square().inverse().matrix();

  // Threshold resolution (tau needs a p/q picture when alpha0 > 0).
  double t_rec = now_seconds();
  double tau;
  if (cfg.tau >= 0.0) {
    tau = cfg.tau;
  } else if (cfg.alpha0 == 0.0) {
    tau = 0.5;
  } else {
    double p_pilot = 0.0, q_pilot = 0.0;
    try {
      std::tie(p_pilot, q_pilot) =
          pilot_pq(g, pass1.pi_raw, pass1.targets, cfg.alpha0);
    } catch (const Error&) {
      // fall through to the no-separation path below
    }
    if (p_pilot > q_pilot && p_pilot > 0.0 && p_pilot <= 1.0 &&
        q_pilot >= 0.0) {
      tau = default_tau(k, cfg.alpha0, n, p_pilot, q_pilot, cfg.c_tau);
    } else {
      est.warnings.push_back(
          {WarningCode::AssumptionWarning,
           "pilot p <= q (" + std::to_string(p_pilot) + " vs " +
               std::to_string(q_pilot) + "); skipping the threshold"});
      tau = 0.0;
    }
  }
  // Threshold, merge the two passes, and recover Q/P. A threshold that
  // leaves some community with no mass anywhere would make Q undefined, so
  // that case falls back to the unthresholded estimates with a warning.
  auto assemble = [&](double tau_use) {
    MatrixXd pi1 = thresholded(pass1.pi_raw, tau_use);
    MatrixXd pi2 = thresholded(pass2.pi_raw, tau_use);

    MatrixXd full1 = MatrixXd::Zero(k, n);
    for (std::size_t j = 0; j < pass1.targets.size(); ++j)
      full1.col(pass1.targets[j]) = pi1.col(static_cast<int>(j));
    MatrixXd full2 = MatrixXd::Zero(k, n);
    for (std::size_t j = 0; j < pass2.targets.size(); ++j)
      full2.col(pass2.targets[j]) = pi2.col(static_cast<int>(j));

    NodeSet common = sorted_union({&part.B, &part.C, &part.X});
    est.alignment = align_estimates(full1, full2, common);

    est.pi_hat = full1;
    for (int a : part.A)
      for (int r = 0; r < k; ++r)
        est.pi_hat(r, a) = full2(est.alignment.perm[r], a);

    MatrixXd Q = build_Q(est.pi_hat, cfg.alpha0, n);
    PEstimate pe = estimate_P(Q, g);
    est.p_hat_raw = pe.raw;
    est.p_hat = pe.clamped;
  };

  try {
    assemble(tau);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::EmptyCommunity || tau <= 0.0) throw;
    est.warnings.push_back(
        {WarningCode::AssumptionWarning,
         std::string("threshold emptied a community (") + e.what() +
             "); refitting without it"});
    tau = 0.0;
    assemble(tau);
  }
  est.tau = tau;
  if (est.alignment.ambiguous)
    est.warnings.push_back(
        {WarningCode::AmbiguousAlignment,
         "row alignment between the two passes tied within 1e-9"});
  est.times.reconstruction += now_seconds() - t_rec;

  // Support threshold from the plug-in error rate on the final P picture.
  double p_hat_diag = est.p_hat.diagonal().mean();
  est.xi_support =
      cfg.xi_support >= 0.0
          ? cfg.xi_support
          : cfg.c_xi * std::pow(cfg.alpha0 + 1.0, 1.5) * k *
                std::sqrt(std::max(p_hat_diag, 0.0)) /
                std::sqrt(static_cast<double>(n));

  if (cfg.compute_support) {
    double t_sup = now_seconds();
    try {
      est.support = support_recovery(g, est.pi_hat, cfg.alpha0,
                                     est.xi_support, part, &est.warnings);
    } catch (const Error& e) {
      // A degenerate estimate (a community with no mass inside some
      // rotation block) leaves support undefined; report, don't abort.
      est.support = MatrixXi();
      est.warnings.push_back(
          {WarningCode::AssumptionWarning,
           std::string("support recovery skipped: ") + e.what()});
    }
    est.times.support = now_seconds() - t_sup;
  }

  est.times.total = now_seconds() - t_start;
  return est;
}

std::vector<int> align_to_truth(const MatrixXd& pi_hat,
                                const MatrixXd& pi_true) {
  const int k = static_cast<int>(pi_true.rows());
  const int n = static_cast<int>(pi_true.cols());
  if (pi_hat.rows() != k || pi_hat.cols() != n)
    fail(ErrorCode::DimensionMismatch, "estimate/truth shape mismatch");

  MatrixXd score(k, k);
  for (int r = 0; r < k; ++r)
    for (int c = 0; c < k; ++c) {
      VectorXd x = pi_true.row(r).transpose();
      VectorXd y = pi_hat.row(c).transpose();
      const double mx = x.mean(), my = y.mean();
      double sxx = 0, syy = 0, sxy = 0;
      for (int i = 0; i < n; ++i) {
        double dx = x[i] - mx, dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
      }
      score(r, c) =
          (sxx < 1e-30 || syy < 1e-30) ? 0.0 : sxy / std::sqrt(sxx * syy);
    }
  std::vector<int> perm(k, -1);
  std::vector<char> used_r(k, 0), used_c(k, 0);
  for (int step = 0; step < k; ++step) {
    double best = -2.0;
    int br = -1, bc = -1;
    for (int r = 0; r < k; ++r) {
      if (used_r[r]) continue;
      for (int c = 0; c < k; ++c) {
        if (used_c[c]) continue;
        if (score(r, c) > best) {
          best = score(r, c);
          br = r;
          bc = c;
        }
      }
    }
    perm[br] = bc;
    used_r[br] = 1;
    used_c[bc] = 1;
  }
  return perm;
}

Metrics evaluate(const ModelEstimate& est, const MembershipMatrix& truth,
                 const MatrixXd& P_true, double xi_band) {
  const int k = truth.communities();
  const int n = truth.nodes();
  if (P_true.rows() != k || P_true.cols() != k)
    fail(ErrorCode::DimensionMismatch, "P shape mismatch");
  std::vector<int> perm = align_to_truth(est.pi_hat, truth.pi);

  Metrics m;
  for (int r = 0; r < k; ++r) {
    double l1 = (est.pi_hat.row(perm[r]) - truth.pi.row(r)).cwiseAbs().sum();
    m.err_pi_l1 = std::max(m.err_pi_l1, l1);
  }
  m.err_pi_l1_per_node = m.err_pi_l1 / n;

  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      m.err_p = std::max(
          m.err_p, std::abs(est.p_hat(perm[i], perm[j]) - P_true(i, j)));

  if (est.support.size() > 0) {
    double xi = xi_band >= 0.0 ? xi_band : est.xi_support;
    long in_band = 0, hit = 0, out_band = 0, zeroed = 0;
    for (int r = 0; r < k; ++r)
      for (int j = 0; j < n; ++j) {
        double pi_true = truth.pi(r, j);
        int s = est.support(perm[r], j);
        if (pi_true >= xi) {
          ++in_band;
          if (s == 1) ++hit;
        } else if (pi_true <= xi / 2.0) {
          ++out_band;
          if (s == 0) ++zeroed;
        }
      }
    if (in_band > 0)
      m.support_recall = static_cast<double>(hit) / in_band;
    if (out_band > 0)
      m.support_precision = static_cast<double>(zeroed) / out_band;
  }

  m.tensor_residual = est.residual;
  m.times = est.times;
  return m;
}

bool TheoryDiagnostics::all_pass() const {
  for (const Condition& c : conditions)
    if (!c.pass) return false;
  return true;
}

TheoryDiagnostics check_assumptions(const MmsbModel& model,
                                    const FitConfig& cfg) {
  model.validate();
  const int k = model.k;
  const VectorXd ahat = model.alpha_hat();
  const double ahat_min = ahat.minCoeff();
  const double ahat_max = ahat.maxCoeff();

  TheoryDiagnostics d;
  d.rho = (model.alpha0 + 1.0) / ahat_min;

  Eigen::JacobiSVD<MatrixXd> svd(model.P);
  const double smin = svd.singularValues()(k - 1);
  const double max_pa = (model.P * ahat).maxCoeff();
  d.zeta = std::sqrt(ahat_max / ahat_min) * std::sqrt(max_pa) /
           (smin > 0.0 ? smin : 1e-300);

  const double p_proxy = model.P.diagonal().mean();
  double q_proxy = 0.0;
  if (k > 1) {
    double sum = 0.0;
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j)
        if (i != j) sum += model.P(i, j);
    q_proxy = sum / (static_cast<double>(k) * (k - 1));
  }
  d.separation_stat =
      p_proxy > 0.0 ? (p_proxy - q_proxy) / std::sqrt(p_proxy) : 0.0;

  auto add = [&](const std::string& name, double margin) {
    margin = std::min(margin, 1e12);  // keep reports finite
    d.conditions.push_back({name, margin >= 1.0, margin});
  };

  // Sparse-regime Dirichlet: every concentration below 1.
  if (model.alpha0 == 0.0) {
    add("alpha-sparse", std::numeric_limits<double>::infinity());
  } else {
    double amax = (model.alpha0 * ahat).maxCoeff();
    add("alpha-sparse", amax > 0.0 ? 1.0 / amax
                                   : std::numeric_limits<double>::infinity());
  }

  // Sample size against rho^2 log^2 k.
  double logk = std::log(static_cast<double>(k));
  double need = d.rho * d.rho * logk * logk;
  add("sample-size", need > 0.0 ? model.n / need
                                : std::numeric_limits<double>::infinity());

  // Condition-number bound on zeta.
  double bound = model.alpha0 < 1.0
                     ? std::sqrt(static_cast<double>(model.n)) / d.rho
                     : std::sqrt(static_cast<double>(model.n)) /
                           (d.rho * k * ahat_max);
  add("spectral-bound", d.zeta > 0.0
                            ? bound / d.zeta
                            : std::numeric_limits<double>::infinity());

  // Iteration budget.
  double gap = smin / std::max(max_pa, 1e-300);
  gap = std::min(1.0, std::max(gap, 1e-12));
  int n_used = cfg.N > 0 ? cfg.N : default_iteration_count(k, 0.25, cfg.c2);
  int n_need = default_iteration_count(k, gap, cfg.c2);
  add("iteration-budget", static_cast<double>(n_used) / n_need);

  // Threshold scale: used tau within a decade of the recommended value.
  double margin;
  if (model.alpha0 == 0.0) {
    double used = cfg.tau >= 0.0 ? cfg.tau : 0.5;
    margin = std::abs(used - 0.5) < 1e-12 ? 1.0 : 0.0;
  } else if (p_proxy > q_proxy) {
    double rec = default_tau(k, model.alpha0, model.n, p_proxy, q_proxy,
                             cfg.c_tau);
    double used = cfg.tau >= 0.0 ? cfg.tau : rec;
    double ratio = used / rec;
    margin = (ratio >= 0.1 && ratio <= 10.0) ? 1.0 : 0.0;
  } else {
    margin = 0.0;  // no separation: the tau rule has no footing
  }
  add("threshold-scale", margin);

  return d;
}

}  // namespace mmsb
