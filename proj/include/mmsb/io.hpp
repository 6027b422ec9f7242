#pragma once

#include <string>

#include "json.hpp"
#include "mmsb/pipeline.hpp"

namespace mmsb {

using Json = nlohmann::json;

// Text edge list: optional first line "% nodes=<n> directed=<0|1>", then
// one "u<TAB>v" pair per line, 0-indexed; '#' starts a comment. Without
// the header, n = max index + 1 and the graph is directed. Undirected
// files store each edge once (u < v); reading mirrors them.
Graph read_edge_list(const std::string& path);
void write_edge_list(const Graph& g, const std::string& path);

// Membership CSV: header "c0,...,c{k-1}", one row per node. The in-memory
// matrix is k x n, so the file holds its transpose.
MatrixXd read_membership_csv(const std::string& path);
void write_membership_csv(const MatrixXd& pi, const std::string& path);

// 0/1 support matrix in the same layout as the membership CSV.
MatrixXi read_support_csv(const std::string& path);
void write_support_csv(const MatrixXi& support, const std::string& path);

Json read_json_file(const std::string& path);
void write_json_file(const Json& j, const std::string& path);

// Model description: {k, n, alpha0, directed, alpha?, P?, homogeneous?:
// {p, q}}. "homogeneous" fills P (and a uniform alpha when absent);
// alpha defaults to uniform.
MmsbModel model_from_json(const Json& j);
Json model_to_json(const MmsbModel& m);

// Fit settings: {k, alpha0?, seed?, fractions?, N?, L?, tau?, xi?,
// xiDeflate?, cTau?, c2?, cXi?, computeSupport?}. Numeric knobs accept
// "auto" (the default resolution) in place of a number.
FitConfig fit_config_from_json(const Json& j);

// Everything scalar-or-matrix from a fit, as one report with a
// schemaVersion field: pHat, pHatRaw, alphaHat, lambda, tau, xi values,
// iterations, residual, warnings, stage times, partition sizes.
Json fit_report_json(const ModelEstimate& est);

Json metrics_to_json(const Metrics& m);
Json diagnostics_to_json(const TheoryDiagnostics& d);
Json warnings_to_json(const Warnings& ws);

}  // namespace mmsb
