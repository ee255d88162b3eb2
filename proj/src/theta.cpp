#include "bnsv/theta.hpp"

#include <cmath>

#include "bnsv/error.hpp"

namespace bnsv {

std::vector<ThetaIssue> validate_theta(const ProcessGraph& graph, const Theta& theta) {
    std::vector<ThetaIssue> issues;
    const int m = graph.node_count();
    const int e = graph.edge_count();

    auto finite = [](double x) { return std::isfinite(x); };

    if (static_cast<int>(theta.mu.size()) != m || static_cast<int>(theta.v2.size()) != m) {
        issues.push_back({ThetaIssue::Code::NonFiniteValue, -1, -1,
                          "mu/v2 size does not match node count"});
        return issues;
    }
    for (int n = 0; n < m; ++n) {
        if (!finite(theta.mu[n]))
            issues.push_back({ThetaIssue::Code::NonFiniteValue, n, -1,
                              "mu[" + graph.name(n) + "] not finite"});
        if (!finite(theta.v2[n]))
            issues.push_back({ThetaIssue::Code::NonFiniteValue, n, -1,
                              "v2[" + graph.name(n) + "] not finite"});
        else if (theta.v2[n] <= 0.0)
            issues.push_back({ThetaIssue::Code::NonPositiveVariance, n, -1,
                              "v2[" + graph.name(n) + "] = " + std::to_string(theta.v2[n])});
    }
    for (int i = 0; i < e; ++i) {
        if (i >= static_cast<int>(theta.beta.size())) {
            const auto& ed = graph.edges()[i];
            issues.push_back({ThetaIssue::Code::MissingBeta, -1, i,
                              "beta missing for edge " + graph.name(ed.parent) + " -> " +
                                  graph.name(ed.child)});
        } else if (!finite(theta.beta[i])) {
            issues.push_back({ThetaIssue::Code::NonFiniteValue, -1, i, "beta not finite"});
        }
    }
    for (int i = e; i < static_cast<int>(theta.beta.size()); ++i)
        issues.push_back({ThetaIssue::Code::ExtraBeta, -1, i,
                          "beta entry " + std::to_string(i) + " beyond the edge set"});
    return issues;
}

Theta make_theta(const ProcessGraph& graph,
                 const std::vector<double>& mu,
                 const std::vector<double>& v2,
                 const std::map<std::pair<std::string, std::string>, double>& beta) {
    Theta t;
    t.mu = mu;
    t.v2 = v2;
    t.beta.assign(graph.edge_count(), std::numeric_limits<double>::quiet_NaN());

    std::string problems;
    for (const auto& [key, value] : beta) {
        const int p = graph.find(key.first);
        const int c = graph.find(key.second);
        const int idx = (p >= 0 && c >= 0) ? graph.edge_index(p, c) : -1;
        if (idx < 0) {
            problems += " ExtraBeta(" + key.first + " -> " + key.second + ")";
            continue;
        }
        t.beta[idx] = value;
    }
    for (int i = 0; i < graph.edge_count(); ++i)
        if (std::isnan(t.beta[i])) {
            const auto& ed = graph.edges()[i];
            problems +=
                " MissingBeta(" + graph.name(ed.parent) + " -> " + graph.name(ed.child) + ")";
        }
    if (!problems.empty()) throw Error(errc::invalid_theta, "beta keying:" + problems);

    const auto issues = validate_theta(graph, t);
    if (!issues.empty()) {
        std::string msg;
        for (const auto& is : issues) msg += " " + is.detail;
        throw Error(errc::invalid_theta, msg);
    }
    return t;
}

std::string coefficient_label(const ProcessGraph& graph, const CoefficientId& c) {
    switch (c.type) {
        case CoefficientId::Type::Mu:
            return "mu:" + graph.name(c.index);
        case CoefficientId::Type::V2:
            return "v2:" + graph.name(c.index);
        case CoefficientId::Type::Beta: {
            const auto& e = graph.edges()[c.index];
            return "beta:" + graph.name(e.parent) + ">" + graph.name(e.child);
        }
    }
    return "?";
}

}  // namespace bnsv
