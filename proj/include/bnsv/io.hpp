#ifndef BNSV_IO_HPP
#define BNSV_IO_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "bnsv/dataset.hpp"
#include "bnsv/graph.hpp"
#include "bnsv/inference.hpp"
#include "bnsv/musa.hpp"
#include "bnsv/shapley.hpp"
#include "bnsv/theta.hpp"

namespace bnsv {

// ---------------------------------------------------------------- files ----
std::string read_file(const std::string& path);
// Write-to-temp + rename in the target directory; partial artifacts are never
// left behind under the final name.
void atomic_write(const std::string& path, const std::string& content);

// Shortest round-trip decimal formatting (used by every text format).
std::string format_double(double v);

// ---------------------------------------------------- network text format --
// Line-based, versioned:
//   bnsv-network v1
//   node X1 kind=cpp mu=7 v2=0.01
//   edge X1 X5 beta=1.2
//   subgraph main_fermentation X1 X2 ...
// mu/v2/beta are optional per line; a Theta is attached iff every node carries
// mu and v2 and every edge carries beta.
struct NetworkFile {
    ProcessGraph graph;
    std::optional<Theta> theta;
    std::map<std::string, std::vector<std::string>> subgraphs;
};

NetworkFile parse_network(const std::string& text);
NetworkFile load_network(const std::string& path);
std::string format_network(const ProcessGraph& graph, const Theta* theta,
                           const std::map<std::string, std::vector<std::string>>& subgraphs);

// ------------------------------------------------------------------- CSV ---
// Header row of node names (any column order); empty cells mark unobserved
// values. Rows must be parent-closed (ScopeNotParentClosed names the row).
BatchDataset parse_csv(const std::string& text, const ProcessGraph& graph);
BatchDataset load_data(const std::string& path, const ProcessGraph& graph);
std::string format_csv(const ProcessGraph& graph, const BatchDataset& data);

// ------------------------------------------------------------ draws file ---
// Columnar text format with a checksum over the column header:
//   bnsv-draws v1
//   checksum <fnv1a64 hex of the columns line>
//   columns mu:X1 ... v2:X1 ... beta:X1>X5 ...
//   meta T=... T0=... h=... seed=... B=...
//   <one row of doubles per stored draw>
std::string format_draws(const ProcessGraph& graph, const PosteriorDraws& draws);
PosteriorDraws parse_draws(const std::string& text, const ProcessGraph& graph);
PosteriorDraws load_draws(const std::string& path, const ProcessGraph& graph);

// ---------------------------------------------------------- report files ---
nlohmann::json sv_report_to_json(const ProcessGraph& graph, const SvReport& report);
SvReport sv_report_from_json(const ProcessGraph& graph, const nlohmann::json& j);

nlohmann::json summary_to_json(const ProcessGraph& graph, const PosteriorSvSummary& summary,
                               const PosteriorDraws& draws);
PosteriorSvSummary summary_from_json(const ProcessGraph& graph, const nlohmann::json& j);

nlohmann::json mu_report_to_json(const ProcessGraph& graph, const MuReport& report);
MuReport mu_report_from_json(const ProcessGraph& graph, const nlohmann::json& j);

// Accepts either report flavor for rendering: a posterior summary maps to an
// SvReport through its posterior-mean Shapley values and criticalities.
SvReport sv_report_for_rendering(const ProcessGraph& graph, const nlohmann::json& j);

std::string dump_json(const nlohmann::json& j);

// -------------------------------------------------------------- DOT export -
// Node fill darkness scales monotonically with the criticality of the factor
// rooted at the node (white at 0, darkest at the report maximum). When a
// model-uncertainty report is supplied, edge darkness follows each beta's
// contribution proportion and node border darkness each v2's. Output ordering
// is deterministic (declaration order). Throws ReportGraphMismatch when the
// report does not belong to the graph.
std::string export_dot(const ProcessGraph& graph, const SvReport& sv,
                       const MuReport* mu = nullptr);

// Factor / coefficient label round-trips ("X4", "e:X5"; "v2:X4",
// "beta:X1>X5", "mu:X2").
std::string input_factor_label(const ProcessGraph& graph, const InputFactor& f);
InputFactor parse_input_factor(const ProcessGraph& graph, const std::string& label);
CoefficientId parse_coefficient(const ProcessGraph& graph, const std::string& label);

}  // namespace bnsv

#endif
