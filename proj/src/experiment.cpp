#include "mmsb/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "mmsb/io.hpp"

namespace mmsb {

namespace {

std::uint64_t trial_seed(std::uint64_t base, std::uint64_t i) {
  std::uint64_t x = base + 0x9e3779b97f4a7c15ull * (i + 1);
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

double median(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

MmsbModel homogeneous_model(int k, int n, double alpha0, double p, double q) {
  auto [P, prior] = make_homogeneous(k, p, q);
  MmsbModel m;
  m.k = k;
  m.n = n;
  m.alpha0 = alpha0;
  m.alpha = alpha0 > 0.0 ? VectorXd(alpha0 * prior) : prior;
  m.P = P;
  m.validate();
  return m;
}

MmsbModel clique_model(int n, int s) {
  MmsbModel m;
  m.k = 2;
  m.n = n;
  m.alpha0 = 0.0;
  m.alpha = VectorXd(2);
  m.alpha << static_cast<double>(s) / n, 1.0 - static_cast<double>(s) / n;
  m.P = MatrixXd(2, 2);
  m.P << 1.0, 0.5, 0.5, 0.5;
  m.validate();
  return m;
}

void apply_fit_overrides(FitConfig& cfg, const Json& o) {
  if (o.contains("tau")) cfg.tau = o["tau"].get<double>();
  if (o.contains("xi")) cfg.xi_support = o["xi"].get<double>();
  if (o.contains("xiSupport")) cfg.xi_support = o["xiSupport"].get<double>();
  if (o.contains("xiDeflate")) cfg.xi_deflate = o["xiDeflate"].get<double>();
  if (o.contains("N")) cfg.N = o["N"].get<int>();
  if (o.contains("L")) cfg.L = o["L"].get<int>();
  if (o.contains("cTau")) cfg.c_tau = o["cTau"].get<double>();
  if (o.contains("c2")) cfg.c2 = o["c2"].get<double>();
  if (o.contains("cXi")) cfg.c_xi = o["cXi"].get<double>();
  if (o.contains("computeSupport"))
    cfg.compute_support = o["computeSupport"].get<bool>();
}

struct TrialOutcome {
  bool ok = false;
  std::string error;
  ModelEstimate est;
  Metrics metrics;
  MembershipMatrix truth;
  std::uint64_t seed = 0;
};

TrialOutcome run_trial(const MmsbModel& model, FitConfig cfg,
                       std::uint64_t seed) {
  TrialOutcome t;
  t.seed = seed;
  try {
    Rng rng(seed);
    t.truth = sample_membership(model, rng);
    Graph g = sample_graph(t.truth, model.P, model.directed, rng);
    cfg.k = model.k;
    cfg.alpha0 = model.alpha0;
    cfg.seed = seed;
    t.est = fit(g, cfg);
    t.metrics = evaluate(t.est, t.truth, model.P);
    t.ok = true;
  } catch (const Error& e) {
    t.error = e.what();
  }
  return t;
}

Json trial_json(const TrialOutcome& t) {
  Json j{{"seed", t.seed}, {"ok", t.ok}};
  if (!t.ok) {
    j["error"] = t.error;
    return j;
  }
  j["metrics"] = metrics_to_json(t.metrics);
  j["tau"] = t.est.tau;
  j["xiSupport"] = t.est.xi_support;
  j["xiDeflate"] = t.est.xi_deflate;
  j["iterations"] = t.est.iterations;
  j["alphaHat"] = std::vector<double>(
      t.est.alpha_hat.data(), t.est.alpha_hat.data() + t.est.alpha_hat.size());
  j["warnings"] = warnings_to_json(t.est.warnings);
  return j;
}

// Fraction of nodes whose recovered one-hot support matches the true
// community, under the estimate-to-truth row alignment.
double community_accuracy(const ModelEstimate& est,
                          const MembershipMatrix& truth) {
  if (est.support.size() == 0) return 0.0;
  std::vector<int> perm = align_to_truth(est.pi_hat, truth.pi);
  const int k = truth.communities();
  const int n = truth.nodes();
  int good = 0;
  for (int j = 0; j < n; ++j) {
    bool ok = true;
    for (int r = 0; r < k && ok; ++r) {
      int want = truth.pi(r, j) >= 0.5 ? 1 : 0;
      if (est.support(perm[r], j) != want) ok = false;
    }
    good += ok;
  }
  return static_cast<double>(good) / n;
}

int json_int(const Json& o, const char* key, int dflt) {
  return o.contains(key) ? o[key].get<int>() : dflt;
}
double json_num(const Json& o, const char* key, double dflt) {
  return o.contains(key) ? o[key].get<double>() : dflt;
}

}  // namespace

std::vector<std::string> experiment_presets() {
  return {"homogeneous-block", "homogeneous-mmsb", "planted-clique",
          "scaling-sweep"};
}

Json run_experiment(const std::string& preset, const Json& overrides,
                    std::uint64_t seed) {
  const Json& o = overrides.is_null() ? Json::object() : overrides;

  Json report{{"schemaVersion", 1}, {"preset", preset}, {"seed", seed}};

  if (preset == "homogeneous-block" || preset == "homogeneous-mmsb") {
    const bool block = preset == "homogeneous-block";
    int k = json_int(o, "k", 3);
    int n = json_int(o, "n", block ? 1500 : 4000);
    double alpha0 = json_num(o, "alpha0", block ? 0.0 : 1.0);
    double p = json_num(o, "p", 0.6);
    double q = json_num(o, "q", 0.1);
    int seeds = json_int(o, "seedCount", 3);

    MmsbModel model = homogeneous_model(k, n, alpha0, p, q);
    FitConfig cfg;
    apply_fit_overrides(cfg, o);
    cfg.k = k;
    cfg.alpha0 = alpha0;
    report["model"] = {{"k", k}, {"n", n},       {"alpha0", alpha0},
                      {"p", p}, {"q", q},       {"P", "homogeneous"},
                      {"directed", model.directed}};
    report["diagnostics"] = diagnostics_to_json(check_assumptions(model, cfg));

    Json runs = Json::array();
    std::vector<double> err_pi, err_p, accuracy;
    for (int i = 0; i < seeds; ++i) {
      TrialOutcome t = run_trial(model, cfg, trial_seed(seed, i));
      Json tj = trial_json(t);
      if (t.ok) {
        err_pi.push_back(t.metrics.err_pi_l1_per_node);
        err_p.push_back(t.metrics.err_p);
        if (block) {
          double acc = community_accuracy(t.est, t.truth);
          accuracy.push_back(acc);
          tj["communityAccuracy"] = acc;
        }
      }
      runs.push_back(tj);
    }
    report["runs"] = runs;
    Json summary{{"medianErrPiL1PerNode", median(err_pi)},
                 {"medianErrP", median(err_p)},
                 {"completedRuns", err_pi.size()}};
    if (block) {
      summary["medianCommunityAccuracy"] = median(accuracy);
      summary["minCommunityAccuracy"] =
          accuracy.empty() ? std::nan("")
                           : *std::min_element(accuracy.begin(),
                                               accuracy.end());
    }
    report["summary"] = summary;
    return report;
  }

  if (preset == "planted-clique") {
    int n = json_int(o, "n", 2000);
    int s = json_int(o, "s",
                     static_cast<int>(std::ceil(
                         2.0 * std::pow(static_cast<double>(n), 2.0 / 3.0))));
    int seeds = json_int(o, "seedCount", 3);

    MmsbModel model = clique_model(n, s);
    FitConfig cfg;
    apply_fit_overrides(cfg, o);
    cfg.k = 2;
    cfg.alpha0 = 0.0;
    report["model"] = {{"k", 2},
                       {"n", n},
                       {"s", s},
                       {"alpha0", 0.0},
                       {"P", {{1.0, 0.5}, {0.5, 0.5}}},
                       {"directed", model.directed}};
    report["diagnostics"] = diagnostics_to_json(check_assumptions(model, cfg));

    Json runs = Json::array();
    std::vector<double> recalls, precisions;
    for (int i = 0; i < seeds; ++i) {
      TrialOutcome t = run_trial(model, cfg, trial_seed(seed, i));
      Json tj = trial_json(t);
      if (t.ok && t.est.support.size() > 0) {
        // The clique community is the estimated row with the densest
        // within-community connectivity.
        int r_clique =
            t.est.p_hat(0, 0) >= t.est.p_hat(1, 1) ? 0 : 1;
        long clique_nodes = 0, hit = 0, flagged = 0, flagged_true = 0;
        for (int j = 0; j < n; ++j) {
          bool truly = t.truth.pi(0, j) >= 0.5;
          bool called = t.est.support(r_clique, j) == 1;
          if (truly) {
            ++clique_nodes;
            if (called) ++hit;
          }
          if (called) {
            ++flagged;
            if (truly) ++flagged_true;
          }
        }
        double recall = clique_nodes > 0
                            ? static_cast<double>(hit) / clique_nodes
                            : 0.0;
        double precision =
            flagged > 0 ? static_cast<double>(flagged_true) / flagged : 0.0;
        recalls.push_back(recall);
        precisions.push_back(precision);
        tj["cliqueRecall"] = recall;
        tj["cliquePrecision"] = precision;
      }
      runs.push_back(tj);
    }
    report["runs"] = runs;
    report["summary"] = {{"medianCliqueRecall", median(recalls)},
                         {"medianCliquePrecision", median(precisions)},
                         {"completedRuns", recalls.size()}};
    return report;
  }

  if (preset == "scaling-sweep") {
    int k = json_int(o, "k", 3);
    double alpha0 = json_num(o, "alpha0", 1.0);
    double p = json_num(o, "p", 0.6);
    double q = json_num(o, "q", 0.1);
    int seeds = json_int(o, "seedCount", 5);
    std::vector<int> grid;
    if (o.contains("grid"))
      grid = o["grid"].get<std::vector<int>>();
    else
      grid = {4 * k * k, 16 * k * k, 64 * k * k};

    report["model"] = {{"k", k}, {"alpha0", alpha0}, {"p", p}, {"q", q},
                       {"grid", grid}};

    Json runs = Json::array();
    std::vector<double> medians;
    for (std::size_t gi = 0; gi < grid.size(); ++gi) {
      MmsbModel model = homogeneous_model(k, grid[gi], alpha0, p, q);
      FitConfig cfg;
      apply_fit_overrides(cfg, o);
      cfg.k = k;
      cfg.alpha0 = alpha0;
      std::vector<double> errs;
      for (int i = 0; i < seeds; ++i) {
        TrialOutcome t = run_trial(
            model, cfg, trial_seed(seed, gi * 1000 + static_cast<std::uint64_t>(i)));
        Json tj = trial_json(t);
        tj["n"] = grid[gi];
        if (t.ok) errs.push_back(t.metrics.err_pi_l1_per_node);
        runs.push_back(tj);
      }
      medians.push_back(median(errs));
    }
    report["runs"] = runs;

    // Trend over the grid: count decreasing pairs among (0,1), (1,2), (0,2).
    int decreasing = 0, total_pairs = 0;
    auto finite = [](double x) { return std::isfinite(x); };
    std::vector<std::pair<int, int>> pairs;
    for (std::size_t a = 0; a + 1 < medians.size(); ++a)
      pairs.push_back({static_cast<int>(a), static_cast<int>(a + 1)});
    if (medians.size() >= 3)
      pairs.push_back({0, static_cast<int>(medians.size()) - 1});
    for (auto [a, b] : pairs) {
      if (!finite(medians[a]) || !finite(medians[b])) continue;
      ++total_pairs;
      if (medians[b] < medians[a]) ++decreasing;
    }
    report["summary"] = {
        {"medianErrPiL1PerNode", medians},
        {"decreasingPairs", decreasing},
        {"totalPairs", total_pairs},
        {"trendPass", total_pairs >= 2 && decreasing >= 2}};
    return report;
  }

  fail(ErrorCode::UnknownPreset, "unknown preset: " + preset);
}

}  // namespace mmsb
