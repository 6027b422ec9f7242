// Command-line front end: generate / fit / eval / support / check /
// experiment. Exit codes: 0 ok, 1 error, 2 when --strict and the run
// produced warnings (or failed assumption checks).

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "mmsb/experiment.hpp"
#include "mmsb/io.hpp"

namespace {

using mmsb::FitConfig;
using mmsb::Json;

void set_thread_count() {
  int threads = 1;
  if (const char* env = std::getenv("MMSB_NUM_THREADS")) {
    try {
      threads = std::max(1, std::stoi(env));
    } catch (const std::exception&) {
      threads = 1;
    }
  }
  Eigen::setNbThreads(threads);
}

Json maybe_config(const std::string& path) {
  return path.empty() ? Json::object() : mmsb::read_json_file(path);
}

void emit(const Json& j, const std::string& out_path) {
  if (out_path.empty())
    std::cout << j.dump(2) << std::endl;
  else
    mmsb::write_json_file(j, out_path);
}

}  // namespace

int main(int argc, char** argv) {
  set_thread_count();

  CLI::App app{"Moment-based mixed membership community detection"};
  app.require_subcommand(1);
  app.fallthrough();
  bool strict = false;
  app.add_flag("--strict", strict,
               "exit 2 when warnings or failed assumption checks occur");

  std::string config_path, out_path;
  std::uint64_t seed = 0;

  auto add_common = [&](CLI::App* sub, bool config_required) {
    auto* c = sub->add_option("--config", config_path, "JSON settings file");
    if (config_required) c->required();
    sub->add_option("--seed", seed, "RNG seed (overrides the config)");
  };

  // generate
  auto* gen = app.add_subcommand(
      "generate", "sample a model's membership matrix and graph");
  add_common(gen, true);
  std::string gen_out, gen_out_pi;
  gen->add_option("--out", gen_out, "edge list output")->required();
  gen->add_option("--out-pi", gen_out_pi, "membership CSV output");

  // fit
  auto* fitc = app.add_subcommand("fit", "estimate memberships from a graph");
  add_common(fitc, true);
  std::string fit_graph, fit_out_pi, fit_out_support;
  fitc->add_option("--graph", fit_graph, "edge list input")->required();
  fitc->add_option("--out", out_path, "report JSON output");
  fitc->add_option("--out-pi", fit_out_pi, "estimated membership CSV output");
  fitc->add_option("--out-support", fit_out_support, "support CSV output");

  // eval
  auto* evalc = app.add_subcommand("eval", "score an estimate against truth");
  add_common(evalc, false);
  std::string eval_pi, eval_truth_pi, eval_model, eval_report, eval_support;
  evalc->add_option("--pi", eval_pi, "estimated membership CSV")->required();
  evalc->add_option("--truth-pi", eval_truth_pi, "true membership CSV")
      ->required();
  evalc->add_option("--model", eval_model, "true model JSON")->required();
  evalc->add_option("--report", eval_report, "fit report JSON (for P-hat)");
  evalc->add_option("--support", eval_support, "support CSV");
  evalc->add_option("--out", out_path, "metrics JSON output (default stdout)");

  // support
  auto* supc = app.add_subcommand(
      "support", "recover significant-membership sets for an estimate");
  add_common(supc, true);
  std::string sup_graph, sup_pi, sup_out;
  supc->add_option("--graph", sup_graph, "edge list input")->required();
  supc->add_option("--pi", sup_pi, "estimated membership CSV")->required();
  supc->add_option("--out", sup_out, "support CSV output")->required();

  // check
  auto* checkc = app.add_subcommand(
      "check", "evaluate identifiability conditions for a model");
  add_common(checkc, false);
  std::string check_model;
  checkc->add_option("--model", check_model, "model JSON")->required();
  checkc->add_option("--out", out_path, "diagnostics JSON (default stdout)");

  // experiment
  auto* expc = app.add_subcommand("experiment", "run a named preset");
  add_common(expc, false);
  std::string exp_preset;
  expc->add_option("--preset", exp_preset, "preset name")->required();
  expc->add_option("--out", out_path, "report JSON output (default stdout)");

  CLI11_PARSE(app, argc, argv);

  bool warned = false;
  try {
    if (gen->parsed()) {
      Json mj = mmsb::read_json_file(config_path);
      mmsb::MmsbModel model = mmsb::model_from_json(mj);
      if (gen->count("--seed") == 0 && mj.contains("seed"))
        seed = mj["seed"].get<std::uint64_t>();
      mmsb::Rng rng(seed);
      mmsb::MembershipMatrix pi = mmsb::sample_membership(model, rng);
      mmsb::Graph g = mmsb::sample_graph(pi, model.P, model.directed, rng);
      mmsb::write_edge_list(g, gen_out);
      if (!gen_out_pi.empty()) mmsb::write_membership_csv(pi.pi, gen_out_pi);
    } else if (fitc->parsed()) {
      Json cj = mmsb::read_json_file(config_path);
      FitConfig cfg = mmsb::fit_config_from_json(cj);
      if (fitc->count("--seed") > 0) cfg.seed = seed;
      mmsb::Graph g = mmsb::read_edge_list(fit_graph);
      mmsb::ModelEstimate est = mmsb::fit(g, cfg);
      warned = !est.warnings.empty();
      emit(mmsb::fit_report_json(est), out_path);
      if (!fit_out_pi.empty())
        mmsb::write_membership_csv(est.pi_hat, fit_out_pi);
      if (!fit_out_support.empty()) {
        if (est.support.size() == 0)
          mmsb::fail(mmsb::ErrorCode::BadConfig,
                     "support output requested but computeSupport is off");
        mmsb::write_support_csv(est.support, fit_out_support);
      }
    } else if (evalc->parsed()) {
      Json cj = maybe_config(config_path);
      mmsb::MmsbModel model =
          mmsb::model_from_json(mmsb::read_json_file(eval_model));
      mmsb::MembershipMatrix truth{mmsb::read_membership_csv(eval_truth_pi)};

      mmsb::ModelEstimate est;
      est.pi_hat = mmsb::read_membership_csv(eval_pi);
      est.p_hat = mmsb::MatrixXd::Zero(model.k, model.k);
      if (!eval_report.empty()) {
        Json rj = mmsb::read_json_file(eval_report);
        auto p = rj.at("pHat").get<std::vector<std::vector<double>>>();
        for (int r = 0; r < model.k; ++r)
          for (int c = 0; c < model.k; ++c) est.p_hat(r, c) = p[r][c];
        est.xi_support = rj.value("xiSupport", 0.0);
        est.residual = rj.value("tensorResidual", 0.0);
      }
      if (!eval_support.empty())
        est.support = mmsb::read_support_csv(eval_support);
      double xi_band = cj.value("xiBand", -1.0);
      emit(mmsb::metrics_to_json(mmsb::evaluate(est, truth, model.P, xi_band)),
           out_path);
    } else if (supc->parsed()) {
      Json cj = mmsb::read_json_file(config_path);
      FitConfig cfg = mmsb::fit_config_from_json(cj);
      if (supc->count("--seed") > 0) cfg.seed = seed;
      cfg.validate();
      mmsb::Graph g = mmsb::read_edge_list(sup_graph);
      mmsb::MatrixXd pi_hat = mmsb::read_membership_csv(sup_pi);
      if (static_cast<int>(pi_hat.rows()) != cfg.k ||
          static_cast<int>(pi_hat.cols()) != g.nodes())
        mmsb::fail(mmsb::ErrorCode::DimensionMismatch,
                   "membership CSV shape does not match config/graph");
      double xi = cfg.xi_support;
      if (xi < 0.0) {
        mmsb::MatrixXd Q = mmsb::build_Q(pi_hat, cfg.alpha0, g.nodes());
        double p_diag = mmsb::estimate_P(Q, g).clamped.diagonal().mean();
        xi = cfg.c_xi * std::pow(cfg.alpha0 + 1.0, 1.5) * cfg.k *
             std::sqrt(std::max(p_diag, 0.0)) /
             std::sqrt(static_cast<double>(g.nodes()));
      }
      mmsb::Partition5 part = mmsb::fit_partition(g.nodes(), cfg);
      mmsb::Warnings warnings;
      mmsb::MatrixXi s =
          mmsb::support_recovery(g, pi_hat, cfg.alpha0, xi, part, &warnings);
      warned = !warnings.empty();
      mmsb::write_support_csv(s, sup_out);
    } else if (checkc->parsed()) {
      mmsb::MmsbModel model =
          mmsb::model_from_json(mmsb::read_json_file(check_model));
      FitConfig cfg = mmsb::fit_config_from_json(maybe_config(config_path));
      cfg.k = model.k;
      cfg.alpha0 = model.alpha0;
      mmsb::TheoryDiagnostics d = mmsb::check_assumptions(model, cfg);
      warned = !d.all_pass();
      emit(mmsb::diagnostics_to_json(d), out_path);
    } else if (expc->parsed()) {
      Json overrides = maybe_config(config_path);
      emit(mmsb::run_experiment(exp_preset, overrides, seed), out_path);
    }
  } catch (const mmsb::Error& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }

  if (strict && warned) return 2;
  return 0;
}
