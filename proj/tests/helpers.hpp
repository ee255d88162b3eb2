#ifndef BNSV_TESTS_HELPERS_HPP
#define BNSV_TESTS_HELPERS_HPP

#include <string>
#include <vector>

#include "bnsv/graph.hpp"
#include "bnsv/rng.hpp"
#include "bnsv/theta.hpp"

namespace bnsv::testing {

struct RandomModel {
    ProcessGraph graph;
    Theta theta;
};

// Random layered DAG: `cpps` roots, `cqas` children; each child draws parents
// uniformly from earlier nodes with probability edge_p (at least one parent).
inline RandomModel random_model(RngStream& rng, int cpps, int cqas, double edge_p = 0.5) {
    std::vector<NodeSpec> nodes;
    for (int i = 0; i < cpps; ++i) nodes.push_back({"P" + std::to_string(i), NodeKind::Cpp});
    for (int i = 0; i < cqas; ++i)
        nodes.push_back({"Q" + std::to_string(i),
                         i + 1 == cqas ? NodeKind::Response : NodeKind::Cqa});
    std::vector<EdgeSpec> edges;
    for (int c = cpps; c < cpps + cqas; ++c) {
        bool any = false;
        for (int p = 0; p < c; ++p)
            if (rng.uniform01() < edge_p) {
                edges.push_back({nodes[p].name, nodes[c].name});
                any = true;
            }
        if (!any && c > 0) edges.push_back({nodes[c - 1].name, nodes[c].name});
    }
    RandomModel out;
    out.graph = ProcessGraph::build(nodes, edges);
    out.theta.mu.resize(out.graph.node_count());
    out.theta.v2.resize(out.graph.node_count());
    out.theta.beta.resize(out.graph.edge_count());
    for (int n = 0; n < out.graph.node_count(); ++n) {
        out.theta.mu[n] = 6.0 * rng.uniform01() - 3.0;
        out.theta.v2[n] = 0.1 + 1.9 * rng.uniform01();
    }
    for (int e = 0; e < out.graph.edge_count(); ++e)
        out.theta.beta[e] = 3.0 * rng.uniform01() - 1.5;
    return out;
}

// Independent oracle for gamma: explicit enumeration of directed paths,
// summing the product of edge coefficients along each.
inline double path_sum(const ProcessGraph& g, const Theta& t, int from, int to) {
    if (from == to) return 1.0;
    double total = 0.0;
    for (int c : g.children(from))
        total += t.beta[g.edge_index(from, c)] * path_sum(g, t, c, to);
    return total;
}

}  // namespace bnsv::testing

#endif
