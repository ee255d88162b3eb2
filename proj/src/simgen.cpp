#include "bnsv/simgen.hpp"

#include <algorithm>
#include <cmath>

#include "bnsv/detail/mabs_table.hpp"
#include "bnsv/error.hpp"
#include "bnsv/numeric.hpp"
#include "bnsv/propagate.hpp"

namespace bnsv {

double association_beta(AssociationLevel level) {
    switch (level) {
        case AssociationLevel::High: return 0.9;
        case AssociationLevel::Medium: return 0.6;
        case AssociationLevel::Low: return 0.3;
    }
    return 0.0;
}

std::pair<double, double> range_to_cpp_params(const RangeSpec& spec) {
    if (!(spec.low < spec.up))
        throw Error(errc::invalid_range,
                    "range for " + spec.node + " needs low < up");
    return {(spec.low + spec.up) / 2.0, (spec.up - spec.low) / 4.0};
}

void back_engineer_v(const ProcessGraph& graph, Theta& theta,
                     const std::vector<std::pair<int, double>>& target_sd) {
    const int m = graph.node_count();
    std::vector<double> target(m, -1.0);
    for (const auto& [node, sd] : target_sd) {
        if (graph.is_cpp(node))
            throw Error(errc::invalid_range,
                        "marginal target given for CPP " + graph.name(node));
        target[node] = sd * sd;
    }
    constexpr double eps = 1e-9;

    // incremental path weights over the nodes processed so far
    GammaMatrix g(m);
    for (int n : graph.topo_order()) {
        g.at(n, n) = 1.0;
        for (int p : graph.parents(n)) {
            const double b = theta.beta[graph.edge_index(p, n)];
            for (int s = 0; s < m; ++s)
                if (g(s, p) != 0.0) g.at(s, n) += b * g(s, p);
        }
        if (graph.is_cpp(n)) continue;
        if (target[n] < 0.0)
            throw Error(errc::unknown_name,
                        "no marginal-SD target for CQA " + graph.name(n));
        NeumaierSum propagated;
        for (int s = 0; s < m; ++s)
            if (s != n && g(s, n) != 0.0) propagated.add(g(s, n) * g(s, n) * theta.v2[s]);
        const double v2 = target[n] - propagated.value();
        if (v2 < eps)
            throw Error(errc::infeasible_target,
                        "node " + graph.name(n) + ": propagated variance " +
                            std::to_string(propagated.value()) + " reaches the target " +
                            std::to_string(target[n]) + " (excess " +
                            std::to_string(propagated.value() - target[n]) + ")");
        theta.v2[n] = v2;
    }
}

namespace {

struct UnitLayout {
    std::vector<int> cpps;
    std::vector<std::string> labels;  // default physical labels, slot-aligned
    std::vector<std::pair<double, double>> label_ranges;
};

const std::vector<UnitLayout>& mabs_units() {
    static const std::vector<UnitLayout> units = {
        {{0, 1, 2, 3},
         {"pH", "temperature", "agitation rate", "dissolved oxygen"},
         {{6.8, 7.2}, {20, 30}, {1.1, 2.5}, {2.5, 7.5}}},
        {{7, 8}, {"temperature", "rotation speed"}, {{20, 30}, {3, 5}}},
        {{11, 12}, {"pooling window", "temperature"}, {{10, 30}, {2, 10}}},
        {{16, 17}, {"size of sieve", "flow rate"}, {{0.1, 0.5}, {25, 100}}},
    };
    return units;
}

}  // namespace

const std::vector<std::string>& mabs_default_cpp_labels() {
    static const std::vector<std::string> labels = [] {
        std::vector<std::string> out;
        for (const auto& u : mabs_units())
            out.insert(out.end(), u.labels.begin(), u.labels.end());
        return out;
    }();
    return labels;
}

MabsNetwork build_mabs_network(const std::vector<std::string>& cpp_labels) {
    using detail::kMabsCppCriticality;
    using detail::kMabsResidualShare;

    // ---- structure -------------------------------------------------------
    std::vector<NodeSpec> nodes;
    for (int i = 1; i <= 20; ++i) {
        const std::string name = "X" + std::to_string(i);
        NodeKind kind = NodeKind::Cqa;
        if ((i >= 1 && i <= 4) || i == 8 || i == 9 || i == 12 || i == 13 || i == 17 || i == 18)
            kind = NodeKind::Cpp;
        else if (i == 19 || i == 20)
            kind = NodeKind::Response;
        nodes.push_back({name, kind});
    }
    std::vector<EdgeSpec> edges;
    auto connect = [&](std::initializer_list<int> parents, std::initializer_list<int> children) {
        for (int c : children)
            for (int p : parents)
                edges.push_back({"X" + std::to_string(p), "X" + std::to_string(c)});
    };
    connect({1, 2, 3, 4}, {5, 6, 7});
    connect({8, 9, 5, 6, 7}, {10, 11});
    connect({12, 13, 10, 11}, {14, 15, 16});
    connect({17, 18, 14, 15, 16}, {19, 20});
    ProcessGraph graph = ProcessGraph::build(nodes, edges);

    // ---- labels and physical ranges ---------------------------------------
    std::vector<std::string> labels =
        cpp_labels.empty() ? mabs_default_cpp_labels() : cpp_labels;
    if (labels.size() != 10)
        throw Error(errc::invalid_range, "cpp mapping must provide 10 labels");
    MabsNetwork net;
    net.ranges.assign(20, RangeSpec{});
    int slot = 0;
    for (const auto& unit : mabs_units()) {
        // each unit's labels must be a permutation of its default set
        std::vector<std::string> given(labels.begin() + slot,
                                       labels.begin() + slot + unit.cpps.size());
        auto sorted_given = given;
        auto sorted_def = unit.labels;
        std::sort(sorted_given.begin(), sorted_given.end());
        std::sort(sorted_def.begin(), sorted_def.end());
        if (sorted_given != sorted_def)
            throw Error(errc::invalid_range, "cpp mapping must permute labels within each unit");
        for (std::size_t k = 0; k < unit.cpps.size(); ++k) {
            const auto pos = std::find(unit.labels.begin(), unit.labels.end(), given[k]) -
                             unit.labels.begin();
            net.ranges[unit.cpps[k]] = {given[k], unit.label_ranges[pos].first,
                                        unit.label_ranges[pos].second};
        }
        slot += static_cast<int>(unit.cpps.size());
    }
    const std::pair<double, double> impurities{3, 11}, protein{1, 5}, bioburden{5, 15};
    auto set_cqa = [&](int idx0, const char* label, std::pair<double, double> r) {
        net.ranges[idx0] = {label, r.first, r.second};
    };
    set_cqa(4, "impurities", impurities);
    set_cqa(5, "protein content", protein);
    set_cqa(6, "bioburden", bioburden);
    set_cqa(9, "impurities", impurities);
    set_cqa(10, "protein content", bioburden);  // printed range of the centrifuge protein row
    set_cqa(13, "impurities", impurities);
    set_cqa(14, "protein content", protein);
    set_cqa(15, "bioburden", bioburden);
    set_cqa(18, "impurities", impurities);
    set_cqa(19, "protein content", protein);

    std::vector<double> sd(20);
    net.theta.mu.assign(20, 0.0);
    for (int n = 0; n < 20; ++n) {
        auto [mu, s] = range_to_cpp_params(net.ranges[n]);
        net.theta.mu[n] = mu;
        sd[n] = s;
    }

    // ---- standardized structural weights ----------------------------------
    // Unit-scale construction: every node has unit marginal variance; each
    // child's variance splits into a CPP block (shared among the unit's CPPs
    // according to their calibrated criticality profile), a carried-CQA block
    // and a residual. Carried blocks are solved against the covariance of the
    // carriers accumulated so far.
    std::vector<double> phat(20, 0.0);
    for (const auto& unit : mabs_units()) {
        double total = 0.0;
        for (int c : unit.cpps)
            for (const auto& [idx, p] : kMabsCppCriticality)
                if (idx == c) total += p;
        for (int c : unit.cpps)
            for (const auto& [idx, p] : kMabsCppCriticality)
                if (idx == c) phat[c] = p / total;
    }
    std::vector<double> rshare(20, 0.0);
    for (const auto& [idx, r] : kMabsResidualShare) rshare[idx] = r;

    Theta std_theta;
    std_theta.mu.assign(20, 0.0);
    std_theta.v2.assign(20, 1.0);  // CPP unit variances; CQA slots filled below
    std_theta.beta.assign(graph.edge_count(), 0.0);

    auto solve_child = [&](int child, double cpp_share, const std::vector<int>& carriers,
                           const std::vector<double>& carry_weight) {
        const double resid = rshare[child];
        for (int p : graph.parents(child)) {
            if (!graph.is_cpp(p)) continue;
            std_theta.beta[graph.edge_index(p, child)] = std::sqrt(phat[p] * cpp_share);
        }
        if (!carriers.empty()) {
            const double carry_share = 1.0 - cpp_share - resid;
            // scale so that Var(sum_i w_i t Z_i) = carry_share
            double quad = 0.0;
            for (std::size_t a = 0; a < carriers.size(); ++a)
                for (std::size_t b = 0; b < carriers.size(); ++b)
                    quad += carry_weight[a] * carry_weight[b] *
                            node_covariance(graph, std_theta, carriers[a], carriers[b]);
            const double t = std::sqrt(carry_share / quad);
            for (std::size_t a = 0; a < carriers.size(); ++a)
                std_theta.beta[graph.edge_index(carriers[a], child)] = t * carry_weight[a];
        }
        std_theta.v2[child] = resid;
    };

    const double u7 = detail::kMabsBioburdenCarry;
    for (int child : {4, 5, 6}) solve_child(child, 1.0 - rshare[child], {}, {});
    for (int child : {9, 10})
        solve_child(child, detail::kMabsCppShareCentrifuge, {4, 5, 6}, {1.0, 1.0, u7});
    for (int child : {13, 14, 15})
        solve_child(child, detail::kMabsCppShareChromatography, {9, 10}, {1.0, 1.0});
    solve_child(18, detail::kMabsCppShareX19, {13, 14, 15}, {1.0, 1.0, 1.0});
    solve_child(19, detail::kMabsCppShareX20, {13, 14, 15}, {1.0, 1.0, 1.0});

    // ---- physical-scale theta ---------------------------------------------
    net.theta.v2.assign(20, 0.0);
    net.theta.beta.assign(graph.edge_count(), 0.0);
    for (int e = 0; e < graph.edge_count(); ++e) {
        const Edge ed = graph.edges()[e];
        net.theta.beta[e] = std_theta.beta[e] * sd[ed.child] / sd[ed.parent];
    }
    std::vector<std::pair<int, double>> targets;
    for (int n = 0; n < 20; ++n) {
        if (graph.is_cpp(n))
            net.theta.v2[n] = sd[n] * sd[n];
        else
            targets.emplace_back(n, sd[n]);
    }
    back_engineer_v(graph, net.theta, targets);

    net.subgraphs = {
        {"main_fermentation", {"X1", "X2", "X3", "X4", "X5", "X6", "X7"}},
        {"through_centrifuge",
         {"X1", "X2", "X3", "X4", "X5", "X6", "X7", "X8", "X9", "X10", "X11"}},
        {"through_chromatography",
         {"X1", "X2", "X3", "X4", "X5", "X6", "X7", "X8", "X9", "X10", "X11", "X12", "X13",
          "X14", "X15", "X16"}},
        {"from_fermentation",
         {"X5", "X6", "X7", "X8", "X9", "X10", "X11", "X12", "X13", "X14", "X15", "X16", "X17",
          "X18", "X19", "X20"}},
        {"from_centrifuge",
         {"X10", "X11", "X12", "X13", "X14", "X15", "X16", "X17", "X18", "X19", "X20"}},
        {"from_chromatography", {"X14", "X15", "X16", "X17", "X18", "X19", "X20"}},
    };
    net.graph = std::move(graph);
    return net;
}

BatchDataset generate_batches(const ProcessGraph& graph, const Theta& theta, int complete_rows,
                              int incomplete_rows, const std::vector<int>& subgraph,
                              std::uint64_t seed) {
    if (complete_rows + incomplete_rows < 1)
        throw Error(errc::empty_dataset, "need at least one row");
    std::vector<char> keep(graph.node_count(), 1);
    if (incomplete_rows > 0) {
        std::fill(keep.begin(), keep.end(), 0);
        for (int n : subgraph) keep[n] = 1;
        for (int n : subgraph)
            for (int p : graph.parents(n))
                if (!keep[p])
                    throw Error(errc::subgraph_not_parent_closed,
                                graph.name(n) + " is in the subgraph but its parent " +
                                    graph.name(p) + " is not");
    }
    BatchDataset full =
        forward_sample(graph, theta, complete_rows + incomplete_rows, seed);
    BatchDataset out(graph.node_count());
    std::vector<double> row(graph.node_count());
    for (int r = 0; r < full.row_count(); ++r) {
        for (int n = 0; n < graph.node_count(); ++n)
            row[n] = (r >= complete_rows && !keep[n])
                         ? std::numeric_limits<double>::quiet_NaN()
                         : full.value(r, n);
        out.add_row(row);
    }
    return out;
}

}  // namespace bnsv
