#include "mmsb/io.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <vector>

namespace mmsb {

namespace {

std::string strip_comment(const std::string& line) {
  std::size_t h = line.find('#');
  return h == std::string::npos ? line : line.substr(0, h);
}

bool blank(const std::string& s) {
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  return true;
}

std::vector<double> json_vector(const Json& j) {
  return j.get<std::vector<double>>();
}

MatrixXd json_matrix(const Json& j) {
  auto rows = j.get<std::vector<std::vector<double>>>();
  if (rows.empty()) fail(ErrorCode::BadConfig, "empty matrix");
  MatrixXd m(rows.size(), rows[0].size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != rows[0].size())
      fail(ErrorCode::BadConfig, "ragged matrix");
    for (std::size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
  }
  return m;
}

Json matrix_json(const MatrixXd& m) {
  Json rows = Json::array();
  for (int r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

Json vector_json(const VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

// A knob that is either a number or the string "auto" (mapped to `sentinel`).
double auto_or_number(const Json& j, const char* key, double sentinel) {
  if (!j.contains(key)) return sentinel;
  const Json& v = j[key];
  if (v.is_string()) {
    if (v.get<std::string>() == "auto") return sentinel;
    fail(ErrorCode::BadConfig, std::string(key) + ": expected number or \"auto\"");
  }
  return v.get<double>();
}

}  // namespace

Graph read_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path);

  long n_declared = -1;
  bool directed = true;
  bool saw_header = false;
  std::vector<std::pair<long, long>> edges;
  long max_id = -1;

  std::string line;
  bool first_content = true;
  while (std::getline(in, line)) {
    std::string body = strip_comment(line);
    if (blank(body)) continue;
    if (first_content && body[0] == '%') {
      std::istringstream hs(body.substr(1));
      std::string tok;
      while (hs >> tok) {
        std::size_t eq = tok.find('=');
        if (eq == std::string::npos) continue;
        std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
        try {
          if (key == "nodes") n_declared = std::stol(val);
          else if (key == "directed") directed = std::stol(val) != 0;
        } catch (const std::exception&) {
          fail(ErrorCode::IoError, path + ": bad header token '" + tok + "'");
        }
      }
      saw_header = true;
      first_content = false;
      continue;
    }
    first_content = false;
    std::istringstream ls(body);
    long u, v;
    if (!(ls >> u >> v))
      fail(ErrorCode::IoError, path + ": bad edge line '" + body + "'");
    std::string rest;
    if (ls >> rest)
      fail(ErrorCode::IoError, path + ": trailing tokens on '" + body + "'");
    if (u < 0 || v < 0)
      fail(ErrorCode::IoError, path + ": negative node id");
    edges.emplace_back(u, v);
    max_id = std::max(max_id, std::max(u, v));
  }
  (void)saw_header;

  long n = n_declared >= 0 ? n_declared : max_id + 1;
  if (n <= 0) fail(ErrorCode::IoError, path + ": no nodes");
  if (max_id >= n)
    fail(ErrorCode::IoError, path + ": node id exceeds declared count");

  Graph g(static_cast<int>(n), directed);
  for (auto [u, v] : edges)
    g.set_edge(static_cast<int>(u), static_cast<int>(v));
  return g;
}

void write_edge_list(const Graph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path);
  out << "% nodes=" << g.nodes() << " directed=" << (g.directed() ? 1 : 0)
      << "\n";
  for (int u = 0; u < g.nodes(); ++u)
    g.for_neighbors(u, [&](int v) {
      if (g.directed() || u < v) out << u << '\t' << v << '\n';
    });
  if (!out) fail(ErrorCode::IoError, "write failed: " + path);
}

MatrixXd read_membership_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path);
  std::string line;
  if (!std::getline(in, line))
    fail(ErrorCode::IoError, path + ": empty file");
  int k = 1;
  for (char c : line) k += c == ',';
  std::vector<double> vals;
  int rows = 0;
  while (std::getline(in, line)) {
    if (blank(line)) continue;
    std::istringstream ls(line);
    std::string cell;
    int got = 0;
    while (std::getline(ls, cell, ',')) {
      try {
        vals.push_back(std::stod(cell));
      } catch (const std::exception&) {
        fail(ErrorCode::IoError, path + ": bad cell '" + cell + "'");
      }
      ++got;
    }
    if (got != k)
      fail(ErrorCode::IoError, path + ": row with " + std::to_string(got) +
                                   " cells, expected " + std::to_string(k));
    ++rows;
  }
  MatrixXd pi(k, rows);
  for (int j = 0; j < rows; ++j)
    for (int r = 0; r < k; ++r)
      pi(r, j) = vals[static_cast<std::size_t>(j) * k + r];
  return pi;
}

void write_membership_csv(const MatrixXd& pi, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path);
  out.precision(17);
  for (int r = 0; r < pi.rows(); ++r)
    out << (r ? "," : "") << 'c' << r;
  out << '\n';
  for (int j = 0; j < pi.cols(); ++j) {
    for (int r = 0; r < pi.rows(); ++r)
      out << (r ? "," : "") << pi(r, j);
    out << '\n';
  }
  if (!out) fail(ErrorCode::IoError, "write failed: " + path);
}

MatrixXi read_support_csv(const std::string& path) {
  MatrixXd m = read_membership_csv(path);
  return m.cast<int>();
}

void write_support_csv(const MatrixXi& support, const std::string& path) {
  write_membership_csv(support.cast<double>(), path);
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path);
  try {
    return Json::parse(in, nullptr, true, true);  // allow // comments
  } catch (const Json::parse_error& e) {
    fail(ErrorCode::IoError, path + ": " + e.what());
  }
}

void write_json_file(const Json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path);
  out << j.dump(2) << '\n';
  if (!out) fail(ErrorCode::IoError, "write failed: " + path);
}

MmsbModel model_from_json(const Json& j) {
  MmsbModel m;
  if (!j.contains("k") || !j.contains("n"))
    fail(ErrorCode::BadConfig, "model needs k and n");
  m.k = j["k"].get<int>();
  m.n = j["n"].get<int>();
  m.alpha0 = j.value("alpha0", 0.0);
  m.directed = j.value("directed", true);

  if (j.contains("homogeneous")) {
    const Json& h = j["homogeneous"];
    auto [P, prior] = make_homogeneous(m.k, h.at("p").get<double>(),
                                       h.at("q").get<double>());
    m.P = P;
    m.alpha = m.alpha0 > 0.0 ? VectorXd(m.alpha0 * prior) : prior;
  }
  if (j.contains("P")) m.P = json_matrix(j["P"]);
  if (j.contains("alpha")) {
    std::vector<double> a = json_vector(j["alpha"]);
    m.alpha = Eigen::Map<VectorXd>(a.data(), static_cast<int>(a.size()));
  }
  if (m.alpha.size() == 0) {
    m.alpha = VectorXd::Constant(
        m.k, m.alpha0 > 0.0 ? m.alpha0 / m.k : 1.0 / m.k);
  }
  if (m.P.size() == 0) fail(ErrorCode::BadConfig, "model needs P or homogeneous");
  m.validate();
  return m;
}

Json model_to_json(const MmsbModel& m) {
  return Json{{"k", m.k},
              {"n", m.n},
              {"alpha0", m.alpha0},
              {"alpha", vector_json(m.alpha)},
              {"P", matrix_json(m.P)},
              {"directed", m.directed}};
}

FitConfig fit_config_from_json(const Json& j) {
  FitConfig cfg;
  if (j.contains("k")) cfg.k = j["k"].get<int>();
  cfg.alpha0 = j.value("alpha0", 0.0);
  if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("fractions")) {
    std::vector<double> f = json_vector(j["fractions"]);
    if (f.size() != 5)
      fail(ErrorCode::BadConfig, "fractions must have 5 entries");
    for (int i = 0; i < 5; ++i) cfg.fractions[i] = f[i];
  }
  cfg.N = static_cast<int>(auto_or_number(j, "N", -1));
  cfg.L = static_cast<int>(auto_or_number(j, "L", -1));
  cfg.tau = auto_or_number(j, "tau", -1.0);
  cfg.xi_support = auto_or_number(j, "xi", -1.0);
  if (j.contains("xiSupport"))
    cfg.xi_support = auto_or_number(j, "xiSupport", -1.0);
  cfg.xi_deflate = auto_or_number(j, "xiDeflate", -1.0);
  cfg.c_tau = j.value("cTau", 1.0);
  cfg.c2 = j.value("c2", 10.0);
  cfg.c_xi = j.value("cXi", 4.0);
  cfg.compute_support = j.value("computeSupport", true);
  return cfg;
}

Json warnings_to_json(const Warnings& ws) {
  Json arr = Json::array();
  for (const Warning& w : ws) {
    const char* name = "Unknown";
    switch (w.code) {
      case WarningCode::AmbiguousAlignment: name = "AmbiguousAlignment"; break;
      case WarningCode::NotHomophilic: name = "NotHomophilic"; break;
      case WarningCode::AssumptionWarning: name = "AssumptionWarning"; break;
      case WarningCode::FewInitializers: name = "FewInitializers"; break;
    }
    arr.push_back({{"code", name}, {"detail", w.detail}});
  }
  return arr;
}

namespace {
Json times_to_json(const StageTimes& t) {
  return Json{{"partition", t.partition}, {"moments", t.moments},
              {"whitening", t.whitening}, {"tensor", t.tensor},
              {"power", t.power},         {"reconstruction", t.reconstruction},
              {"support", t.support},     {"total", t.total}};
}
}  // namespace

Json fit_report_json(const ModelEstimate& est) {
  Json j{{"schemaVersion", 1},
         {"pHat", matrix_json(est.p_hat)},
         {"pHatRaw", matrix_json(est.p_hat_raw)},
         {"alphaHat", vector_json(est.alpha_hat)},
         {"lambda", vector_json(est.eigen.lambda)},
         {"tau", est.tau},
         {"xiSupport", est.xi_support},
         {"xiDeflate", est.xi_deflate},
         {"iterations", est.iterations},
         {"tensorResidual", est.residual},
         {"warnings", warnings_to_json(est.warnings)},
         {"wallTimes", times_to_json(est.times)}};
  j["partitionSizes"] = {est.partition.A.size(), est.partition.B.size(),
                         est.partition.C.size(), est.partition.X.size(),
                         est.partition.Y.size()};
  return j;
}

Json metrics_to_json(const Metrics& m) {
  Json j{{"errPiL1", m.err_pi_l1},
         {"errPiL1PerNode", m.err_pi_l1_per_node},
         {"errP", m.err_p},
         {"tensorResidual", m.tensor_residual},
         {"wallTimes", times_to_json(m.times)}};
  if (m.support_recall) j["supportRecall"] = *m.support_recall;
  if (m.support_precision) j["supportPrecision"] = *m.support_precision;
  return j;
}

Json diagnostics_to_json(const TheoryDiagnostics& d) {
  Json conds = Json::array();
  for (const auto& c : d.conditions)
    conds.push_back({{"name", c.name}, {"pass", c.pass}, {"margin", c.margin}});
  return Json{{"rho", d.rho},
              {"zeta", d.zeta},
              {"separationStat", d.separation_stat},
              {"conditionsB1toB5", conds},
              {"allPass", d.all_pass()}};
}

}  // namespace mmsb
