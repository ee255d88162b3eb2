#include "bnsv/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "bnsv/error.hpp"
#include "bnsv/numeric.hpp"

namespace bnsv {

using nlohmann::json;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(errc::io_error, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void atomic_write(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(errc::io_error, "cannot open " + tmp + " for writing");
        out << content;
        out.flush();
        if (!out) throw Error(errc::io_error, "write failed for " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw Error(errc::io_error, "rename to " + path + " failed: " + ec.message());
    }
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

double parse_double_token(const std::string& tok, const char* what, int line_no) {
    double v = 0.0;
    const char* begin = tok.data();
    const char* end = begin + tok.size();
    const auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc{} || res.ptr != end)
        throw Error(errc::parse_error, "line " + std::to_string(line_no) + ": bad " +
                                           std::string(what) + " '" + tok + "'");
    return v;
}

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) out.push_back(tok);
    return out;
}

std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[19];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::string cur;
    for (char c : text) {
        if (c == '\n') {
            if (!cur.empty() && cur.back() == '\r') cur.pop_back();
            lines.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) lines.push_back(cur);
    return lines;
}

}  // namespace

// ----------------------------------------------------------- network file --

NetworkFile parse_network(const std::string& text) {
    const auto lines = split_lines(text);
    if (lines.empty() || split_ws(lines[0]) != std::vector<std::string>{"bnsv-network", "v1"})
        throw Error(errc::parse_error, "line 1: expected header 'bnsv-network v1'");

    struct NodeLine {
        NodeSpec spec;
        std::optional<double> mu, v2;
    };
    std::vector<NodeLine> node_lines;
    struct EdgeLine {
        EdgeSpec spec;
        std::optional<double> beta;
    };
    std::vector<EdgeLine> edge_lines;
    std::map<std::string, std::vector<std::string>> subgraphs;

    for (std::size_t i = 1; i < lines.size(); ++i) {
        const int line_no = static_cast<int>(i) + 1;
        const auto toks = split_ws(lines[i]);
        if (toks.empty() || toks[0].starts_with("#")) continue;
        auto kv = [&](const std::string& tok) -> std::pair<std::string, std::string> {
            const auto eq = tok.find('=');
            if (eq == std::string::npos)
                throw Error(errc::parse_error,
                            "line " + std::to_string(line_no) + ": expected key=value, got '" +
                                tok + "'");
            return {tok.substr(0, eq), tok.substr(eq + 1)};
        };
        if (toks[0] == "node") {
            if (toks.size() < 3)
                throw Error(errc::parse_error,
                            "line " + std::to_string(line_no) + ": node needs a name and a kind");
            NodeLine nl;
            nl.spec.name = toks[1];
            for (std::size_t t = 2; t < toks.size(); ++t) {
                const auto [k, v] = kv(toks[t]);
                if (k == "kind") {
                    if (v == "cpp")
                        nl.spec.kind = NodeKind::Cpp;
                    else if (v == "cqa")
                        nl.spec.kind = NodeKind::Cqa;
                    else if (v == "response")
                        nl.spec.kind = NodeKind::Response;
                    else
                        throw Error(errc::parse_error, "line " + std::to_string(line_no) +
                                                           ": unknown kind '" + v + "'");
                } else if (k == "mu") {
                    nl.mu = parse_double_token(v, "mu", line_no);
                } else if (k == "v2") {
                    nl.v2 = parse_double_token(v, "v2", line_no);
                } else {
                    throw Error(errc::parse_error,
                                "line " + std::to_string(line_no) + ": unknown key '" + k + "'");
                }
            }
            node_lines.push_back(std::move(nl));
        } else if (toks[0] == "edge") {
            if (toks.size() < 3)
                throw Error(errc::parse_error,
                            "line " + std::to_string(line_no) + ": edge needs parent and child");
            EdgeLine el;
            el.spec.parent = toks[1];
            el.spec.child = toks[2];
            for (std::size_t t = 3; t < toks.size(); ++t) {
                const auto [k, v] = kv(toks[t]);
                if (k == "beta")
                    el.beta = parse_double_token(v, "beta", line_no);
                else
                    throw Error(errc::parse_error,
                                "line " + std::to_string(line_no) + ": unknown key '" + k + "'");
            }
            edge_lines.push_back(std::move(el));
        } else if (toks[0] == "subgraph") {
            if (toks.size() < 3)
                throw Error(errc::parse_error, "line " + std::to_string(line_no) +
                                                   ": subgraph needs a name and nodes");
            subgraphs[toks[1]] = std::vector<std::string>(toks.begin() + 2, toks.end());
        } else {
            throw Error(errc::parse_error, "line " + std::to_string(line_no) +
                                               ": unknown directive '" + toks[0] + "'");
        }
    }

    NetworkFile out;
    std::vector<NodeSpec> nodes;
    for (const auto& nl : node_lines) nodes.push_back(nl.spec);
    std::vector<EdgeSpec> edges;
    for (const auto& el : edge_lines) edges.push_back(el.spec);
    out.graph = ProcessGraph::build(nodes, edges);
    for (const auto& [name, members] : subgraphs)
        for (const auto& n : members) out.graph.index_of(n);  // UnknownName early
    out.subgraphs = std::move(subgraphs);

    const bool full_theta =
        std::all_of(node_lines.begin(), node_lines.end(),
                    [](const NodeLine& n) { return n.mu && n.v2; }) &&
        std::all_of(edge_lines.begin(), edge_lines.end(),
                    [](const EdgeLine& e) { return e.beta.has_value(); });
    if (full_theta && !node_lines.empty()) {
        Theta t;
        t.mu.resize(node_lines.size());
        t.v2.resize(node_lines.size());
        for (std::size_t i = 0; i < node_lines.size(); ++i) {
            const int idx = out.graph.index_of(node_lines[i].spec.name);
            t.mu[idx] = *node_lines[i].mu;
            t.v2[idx] = *node_lines[i].v2;
        }
        t.beta.resize(edge_lines.size());
        for (const auto& el : edge_lines) {
            const int idx = out.graph.edge_index(out.graph.index_of(el.spec.parent),
                                                 out.graph.index_of(el.spec.child));
            t.beta[idx] = *el.beta;
        }
        const auto issues = validate_theta(out.graph, t);
        if (!issues.empty()) {
            std::string msg;
            for (const auto& is : issues) msg += " " + is.detail;
            throw Error(errc::invalid_theta, "network theta invalid:" + msg);
        }
        out.theta = std::move(t);
    }
    return out;
}

NetworkFile load_network(const std::string& path) { return parse_network(read_file(path)); }

std::string format_network(const ProcessGraph& graph, const Theta* theta,
                           const std::map<std::string, std::vector<std::string>>& subgraphs) {
    std::ostringstream out;
    out << "bnsv-network v1\n";
    for (int n = 0; n < graph.node_count(); ++n) {
        out << "node " << graph.name(n) << " kind=";
        switch (graph.kind(n)) {
            case NodeKind::Cpp: out << "cpp"; break;
            case NodeKind::Cqa: out << "cqa"; break;
            case NodeKind::Response: out << "response"; break;
        }
        if (theta)
            out << " mu=" << format_double(theta->mu[n]) << " v2=" << format_double(theta->v2[n]);
        out << "\n";
    }
    for (int e = 0; e < graph.edge_count(); ++e) {
        const auto& ed = graph.edges()[e];
        out << "edge " << graph.name(ed.parent) << " " << graph.name(ed.child);
        if (theta) out << " beta=" << format_double(theta->beta[e]);
        out << "\n";
    }
    for (const auto& [name, members] : subgraphs) {
        out << "subgraph " << name;
        for (const auto& m : members) out << " " << m;
        out << "\n";
    }
    return out.str();
}

// -------------------------------------------------------------------- CSV --

BatchDataset parse_csv(const std::string& text, const ProcessGraph& graph) {
    const auto lines = split_lines(text);
    if (lines.empty()) throw Error(errc::header_mismatch, "empty CSV");
    auto split_commas = [](const std::string& line) {
        std::vector<std::string> cells;
        std::string cur;
        for (char c : line) {
            if (c == ',') {
                cells.push_back(cur);
                cur.clear();
            } else {
                cur.push_back(c);
            }
        }
        cells.push_back(cur);
        return cells;
    };
    const auto header = split_commas(lines[0]);
    if (static_cast<int>(header.size()) != graph.node_count())
        throw Error(errc::header_mismatch,
                    "CSV has " + std::to_string(header.size()) + " columns, graph has " +
                        std::to_string(graph.node_count()) + " nodes");
    std::vector<int> col_node(header.size());
    std::vector<char> seen(graph.node_count(), 0);
    for (std::size_t c = 0; c < header.size(); ++c) {
        const int n = graph.find(header[c]);
        if (n < 0 || seen[n])
            throw Error(errc::header_mismatch, "CSV column '" + header[c] +
                                                   "' does not match the graph's nodes");
        seen[n] = 1;
        col_node[c] = n;
    }

    BatchDataset data(graph.node_count());
    std::vector<double> row(graph.node_count());
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const auto cells = split_commas(lines[i]);
        if (cells.size() != header.size())
            throw Error(errc::header_mismatch,
                        "row " + std::to_string(i) + " has " + std::to_string(cells.size()) +
                            " cells");
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (cells[c].empty()) {
                row[col_node[c]] = std::numeric_limits<double>::quiet_NaN();
                continue;
            }
            double v = 0.0;
            const char* b = cells[c].data();
            const char* e = b + cells[c].size();
            const auto res = std::from_chars(b, e, v);
            if (res.ec != std::errc{} || res.ptr != e || std::isnan(v))
                throw Error(errc::non_numeric_cell, "row " + std::to_string(i) + " col " +
                                                        std::to_string(c + 1) + ": '" +
                                                        cells[c] + "'");
            row[col_node[c]] = v;
        }
        data.add_row(row);
    }
    data.validate_scopes(graph);
    return data;
}

BatchDataset load_data(const std::string& path, const ProcessGraph& graph) {
    return parse_csv(read_file(path), graph);
}

std::string format_csv(const ProcessGraph& graph, const BatchDataset& data) {
    std::ostringstream out;
    for (int n = 0; n < graph.node_count(); ++n)
        out << (n ? "," : "") << graph.name(n);
    out << "\n";
    for (int r = 0; r < data.row_count(); ++r) {
        for (int n = 0; n < graph.node_count(); ++n) {
            if (n) out << ",";
            if (data.observed(r, n)) out << format_double(data.value(r, n));
        }
        out << "\n";
    }
    return out.str();
}

// ------------------------------------------------------------- draws file --

namespace {
std::string draws_columns_line(const ProcessGraph& graph) {
    std::ostringstream cols;
    cols << "columns";
    for (int n = 0; n < graph.node_count(); ++n) cols << " mu:" << graph.name(n);
    for (int n = 0; n < graph.node_count(); ++n) cols << " v2:" << graph.name(n);
    for (int e = 0; e < graph.edge_count(); ++e) {
        const auto& ed = graph.edges()[e];
        cols << " beta:" << graph.name(ed.parent) << ">" << graph.name(ed.child);
    }
    return cols.str();
}
}  // namespace

std::string format_draws(const ProcessGraph& graph, const PosteriorDraws& draws) {
    std::ostringstream out;
    const std::string cols = draws_columns_line(graph);
    out << "bnsv-draws v1\n";
    out << "checksum " << hex64(fnv1a64(cols)) << "\n";
    out << cols << "\n";
    out << "meta T=" << draws.total_iters << " T0=" << draws.burn_in << " h=" << draws.thin
        << " seed=" << draws.seed << " B=" << draws.draw_count() << "\n";
    for (const auto& t : draws.draws) {
        bool first = true;
        for (double v : t.mu) {
            out << (first ? "" : " ") << format_double(v);
            first = false;
        }
        for (double v : t.v2) out << " " << format_double(v);
        for (double v : t.beta) out << " " << format_double(v);
        out << "\n";
    }
    return out.str();
}

PosteriorDraws parse_draws(const std::string& text, const ProcessGraph& graph) {
    const auto lines = split_lines(text);
    if (lines.size() < 4 || split_ws(lines[0]) != std::vector<std::string>{"bnsv-draws", "v1"})
        throw Error(errc::parse_error, "line 1: expected header 'bnsv-draws v1'");
    const auto ck = split_ws(lines[1]);
    if (ck.size() != 2 || ck[0] != "checksum")
        throw Error(errc::parse_error, "line 2: expected checksum");
    if (ck[1] != hex64(fnv1a64(lines[2])))
        throw Error(errc::checksum_mismatch, "draws column checksum does not match");
    if (lines[2] != draws_columns_line(graph))
        throw Error(errc::header_mismatch, "draws columns do not match the graph");

    PosteriorDraws out;
    long b_declared = -1;
    for (const auto& tok : split_ws(lines[3])) {
        const auto eq = tok.find('=');
        if (tok == "meta" || eq == std::string::npos) continue;
        const std::string k = tok.substr(0, eq);
        const std::string v = tok.substr(eq + 1);
        if (k == "T") out.total_iters = std::stol(v);
        else if (k == "T0") out.burn_in = std::stol(v);
        else if (k == "h") out.thin = std::stol(v);
        else if (k == "seed") out.seed = std::stoull(v);
        else if (k == "B") b_declared = std::stol(v);
    }
    const int m = graph.node_count();
    const int e = graph.edge_count();
    for (std::size_t i = 4; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const auto toks = split_ws(lines[i]);
        if (static_cast<int>(toks.size()) != 2 * m + e)
            throw Error(errc::parse_error,
                        "line " + std::to_string(i + 1) + ": expected " +
                            std::to_string(2 * m + e) + " values");
        Theta t;
        t.mu.resize(m);
        t.v2.resize(m);
        t.beta.resize(e);
        int k = 0;
        for (int n = 0; n < m; ++n)
            t.mu[n] = parse_double_token(toks[k++], "mu", static_cast<int>(i + 1));
        for (int n = 0; n < m; ++n)
            t.v2[n] = parse_double_token(toks[k++], "v2", static_cast<int>(i + 1));
        for (int j = 0; j < e; ++j)
            t.beta[j] = parse_double_token(toks[k++], "beta", static_cast<int>(i + 1));
        out.draws.push_back(std::move(t));
    }
    if (b_declared >= 0 && b_declared != out.draw_count())
        throw Error(errc::parse_error, "meta B does not match the number of rows");
    return out;
}

PosteriorDraws load_draws(const std::string& path, const ProcessGraph& graph) {
    return parse_draws(read_file(path), graph);
}

// ----------------------------------------------------------------- labels --

std::string input_factor_label(const ProcessGraph& graph, const InputFactor& f) {
    return factor_label(graph, f);
}

InputFactor parse_input_factor(const ProcessGraph& graph, const std::string& label) {
    if (label.starts_with("e:")) {
        const int n = graph.index_of(label.substr(2));
        return {InputFactor::Kind::Residual, n};
    }
    const int n = graph.index_of(label);
    return {graph.is_cpp(n) ? InputFactor::Kind::Cpp : InputFactor::Kind::BoundaryCqa, n};
}

CoefficientId parse_coefficient(const ProcessGraph& graph, const std::string& label) {
    if (label.starts_with("mu:"))
        return {CoefficientId::Type::Mu, graph.index_of(label.substr(3))};
    if (label.starts_with("v2:"))
        return {CoefficientId::Type::V2, graph.index_of(label.substr(3))};
    if (label.starts_with("beta:")) {
        const std::string rest = label.substr(5);
        const auto gt = rest.find('>');
        if (gt == std::string::npos)
            throw Error(errc::parse_error, "bad coefficient label '" + label + "'");
        const int p = graph.index_of(rest.substr(0, gt));
        const int c = graph.index_of(rest.substr(gt + 1));
        const int e = graph.edge_index(p, c);
        if (e < 0) throw Error(errc::unknown_name, "no edge " + rest);
        return {CoefficientId::Type::Beta, e};
    }
    throw Error(errc::parse_error, "bad coefficient label '" + label + "'");
}

// ---------------------------------------------------------------- reports --

namespace {
const char* cov_mode_name(InputCovariance::Mode m) {
    switch (m) {
        case InputCovariance::Mode::Independent: return "independent";
        case InputCovariance::Mode::ModelPropagated: return "model";
        case InputCovariance::Mode::UserSupplied: return "user";
    }
    return "?";
}
InputCovariance::Mode cov_mode_from(const std::string& s) {
    if (s == "independent") return InputCovariance::Mode::Independent;
    if (s == "model") return InputCovariance::Mode::ModelPropagated;
    if (s == "user") return InputCovariance::Mode::UserSupplied;
    throw Error(errc::parse_error, "unknown covariance mode '" + s + "'");
}
}  // namespace

json sv_report_to_json(const ProcessGraph& graph, const SvReport& report) {
    json j;
    j["format"] = "bnsv-sv-report";
    j["version"] = 1;
    j["output"] = graph.name(report.output);
    j["total_variance"] = report.total_variance;
    j["covariance"] = cov_mode_name(report.cov_mode);
    j["subgraph"] = json::array();
    for (int n : report.subgraph_nodes) j["subgraph"].push_back(graph.name(n));
    json arr = json::array();
    for (const auto& e : report.entries)
        arr.push_back({{"factor", factor_label(graph, e.factor)},
                       {"shapley", e.shapley},
                       {"criticality", e.criticality}});
    j["factors"] = std::move(arr);
    return j;
}

SvReport sv_report_from_json(const ProcessGraph& graph, const json& j) {
    if (j.value("format", "") != "bnsv-sv-report")
        throw Error(errc::parse_error, "not a bnsv-sv-report");
    SvReport r;
    r.output = graph.index_of(j.at("output").get<std::string>());
    r.total_variance = j.at("total_variance").get<double>();
    r.cov_mode = cov_mode_from(j.at("covariance").get<std::string>());
    for (const auto& n : j.at("subgraph"))
        r.subgraph_nodes.push_back(graph.index_of(n.get<std::string>()));
    r.subgraph = !r.subgraph_nodes.empty();
    for (const auto& f : j.at("factors"))
        r.entries.push_back({parse_input_factor(graph, f.at("factor").get<std::string>()),
                             f.at("shapley").get<double>(), f.at("criticality").get<double>()});
    return r;
}

json summary_to_json(const ProcessGraph& graph, const PosteriorSvSummary& summary,
                     const PosteriorDraws& draws) {
    json j;
    j["format"] = "bnsv-posterior-sv-summary";
    j["version"] = 1;
    j["output"] = graph.name(summary.output);
    j["draws"] = summary.draw_count;
    j["chain"] = {{"T", draws.total_iters},
                  {"T0", draws.burn_in},
                  {"h", draws.thin},
                  {"seed", draws.seed}};
    json arr = json::array();
    for (const auto& f : summary.factors)
        arr.push_back({{"factor", factor_label(graph, f.factor)},
                       {"shapley_mean", f.sh_mean},
                       {"shapley_var", f.sh_var},
                       {"criticality_mean", f.p_mean},
                       {"criticality_var", f.p_var}});
    j["factors"] = std::move(arr);
    return j;
}

PosteriorSvSummary summary_from_json(const ProcessGraph& graph, const json& j) {
    if (j.value("format", "") != "bnsv-posterior-sv-summary")
        throw Error(errc::parse_error, "not a bnsv-posterior-sv-summary");
    PosteriorSvSummary s;
    s.output = graph.index_of(j.at("output").get<std::string>());
    s.draw_count = j.at("draws").get<int>();
    for (const auto& f : j.at("factors"))
        s.factors.push_back({parse_input_factor(graph, f.at("factor").get<std::string>()),
                             f.at("shapley_mean").get<double>(),
                             f.at("shapley_var").get<double>(),
                             f.at("criticality_mean").get<double>(),
                             f.at("criticality_var").get<double>()});
    return s;
}

json mu_report_to_json(const ProcessGraph& graph, const MuReport& report) {
    json j;
    j["format"] = "bnsv-mu-report";
    j["version"] = 1;
    j["input"] = factor_label(graph, report.input);
    j["output"] = graph.name(report.output);
    j["quantity"] = report.quantity == Quantity::Shapley ? "shapley" : "criticality";
    j["total_posterior_variance"] = report.total_posterior_variance;
    j["sampling"] = {{"n_pi", report.n_permutations}, {"b_outer", report.outer_draws},
                     {"b_inner", report.inner_draws}, {"inner_iters", report.inner_iters},
                     {"inner_thin", report.inner_thin}, {"b_draws", report.b_draws},
                     {"seed", report.seed}};
    json arr = json::array();
    for (const auto& c : report.contributions)
        arr.push_back({{"coefficient", coefficient_label(graph, c.coeff)},
                       {"shapley", c.shapley},
                       {"proportion", c.proportion}});
    j["contributions"] = std::move(arr);
    return j;
}

MuReport mu_report_from_json(const ProcessGraph& graph, const json& j) {
    if (j.value("format", "") != "bnsv-mu-report")
        throw Error(errc::parse_error, "not a bnsv-mu-report");
    MuReport r;
    r.input = parse_input_factor(graph, j.at("input").get<std::string>());
    r.output = graph.index_of(j.at("output").get<std::string>());
    r.quantity = j.at("quantity").get<std::string>() == "shapley" ? Quantity::Shapley
                                                                  : Quantity::Criticality;
    r.total_posterior_variance = j.at("total_posterior_variance").get<double>();
    const auto& s = j.at("sampling");
    r.n_permutations = s.at("n_pi").get<int>();
    r.outer_draws = s.at("b_outer").get<int>();
    r.inner_draws = s.at("b_inner").get<int>();
    r.inner_iters = s.at("inner_iters").get<int>();
    r.inner_thin = s.at("inner_thin").get<int>();
    r.b_draws = s.at("b_draws").get<int>();
    r.seed = s.at("seed").get<std::uint64_t>();
    for (const auto& c : j.at("contributions"))
        r.contributions.push_back(
            {parse_coefficient(graph, c.at("coefficient").get<std::string>()),
             c.at("shapley").get<double>(), c.at("proportion").get<double>()});
    return r;
}

SvReport sv_report_for_rendering(const ProcessGraph& graph, const json& j) {
    if (j.value("format", "") == "bnsv-sv-report") return sv_report_from_json(graph, j);
    if (j.value("format", "") == "bnsv-posterior-sv-summary") {
        const PosteriorSvSummary s = summary_from_json(graph, j);
        SvReport r;
        r.output = s.output;
        NeumaierSum total;
        for (const auto& f : s.factors) {
            r.entries.push_back({f.factor, f.sh_mean, f.p_mean});
            total.add(f.sh_mean);
        }
        r.total_variance = total.value();
        return r;
    }
    throw Error(errc::parse_error, "expected an sv report or a posterior summary");
}

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

// -------------------------------------------------------------------- DOT --

namespace {
std::string gray_fill(double intensity) {
    // 0 -> white, 1 -> dark gray; monotone
    const int level = 255 - static_cast<int>(std::lround(200.0 * std::clamp(intensity, 0.0, 1.0)));
    char buf[8];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", level, level, level);
    return buf;
}
}  // namespace

std::string export_dot(const ProcessGraph& graph, const SvReport& sv, const MuReport* mu) {
    if (sv.output < 0 || sv.output >= graph.node_count())
        throw Error(errc::report_graph_mismatch, "report output is not a node of this graph");
    std::vector<double> crit(graph.node_count(), 0.0);
    double max_crit = 0.0;
    for (const auto& e : sv.entries) {
        if (e.factor.node < 0 || e.factor.node >= graph.node_count())
            throw Error(errc::report_graph_mismatch, "report factor outside the graph");
        crit[e.factor.node] = std::max(0.0, e.criticality);
        max_crit = std::max(max_crit, crit[e.factor.node]);
    }
    std::vector<double> edge_mu(graph.edge_count(), 0.0), node_mu(graph.node_count(), 0.0);
    double max_mu = 0.0;
    if (mu) {
        for (const auto& c : mu->contributions) {
            const double p = std::max(0.0, c.proportion);
            if (c.coeff.type == CoefficientId::Type::Beta) {
                if (c.coeff.index >= graph.edge_count())
                    throw Error(errc::report_graph_mismatch, "mu report edge outside the graph");
                edge_mu[c.coeff.index] = p;
            } else if (c.coeff.type == CoefficientId::Type::V2) {
                node_mu[c.coeff.index] = p;
            }
            max_mu = std::max(max_mu, p);
        }
    }

    std::ostringstream out;
    out << "digraph process {\n  rankdir=LR;\n  node [shape=ellipse, style=filled];\n";
    for (int n = 0; n < graph.node_count(); ++n) {
        const double fill = max_crit > 0.0 ? crit[n] / max_crit : 0.0;
        const double border = (mu && max_mu > 0.0) ? node_mu[n] / max_mu : 0.0;
        out << "  \"" << graph.name(n) << "\" [fillcolor=\"" << gray_fill(fill)
            << "\", color=\"" << gray_fill(mu ? border : 0.35) << "\", penwidth="
            << format_double(mu ? 1.0 + 3.0 * border : 1.0) << "];\n";
    }
    for (int e = 0; e < graph.edge_count(); ++e) {
        const auto& ed = graph.edges()[e];
        const double w = (mu && max_mu > 0.0) ? edge_mu[e] / max_mu : 0.0;
        out << "  \"" << graph.name(ed.parent) << "\" -> \"" << graph.name(ed.child)
            << "\" [color=\"" << gray_fill(mu ? w : 0.35) << "\", penwidth="
            << format_double(mu ? 1.0 + 3.0 * w : 1.0) << "];\n";
    }
    out << "}\n";
    return out.str();
}

}  // namespace bnsv
