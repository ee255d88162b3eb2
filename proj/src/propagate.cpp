#include "bnsv/propagate.hpp"

#include <cmath>

#include "bnsv/error.hpp"
#include "bnsv/parallel.hpp"
#include "bnsv/rng.hpp"

namespace bnsv {

GammaMatrix gamma_matrix(const ProcessGraph& graph, const Theta& theta) {
    const int m = graph.node_count();
    GammaMatrix g(m);
    for (int n : graph.topo_order()) {
        g.at(n, n) = 1.0;
        for (int p : graph.parents(n)) {
            const double b = theta.beta[graph.edge_index(p, n)];
            for (int s = 0; s < m; ++s)
                if (g(s, p) != 0.0) g.at(s, n) += b * g(s, p);
        }
    }
    return g;
}

std::vector<double> gamma_to_node(const ProcessGraph& graph, const Theta& theta, int target) {
    std::vector<double> g(graph.node_count(), 0.0);
    g[target] = 1.0;
    const auto& topo = graph.topo_order();
    for (int r = graph.topo_rank(target) - 1; r >= 0; --r) {
        const int n = topo[r];
        double acc = 0.0;
        for (int c : graph.children(n))
            if (g[c] != 0.0) acc += theta.beta[graph.edge_index(n, c)] * g[c];
        g[n] = acc;
    }
    return g;
}

double GammaMap::weight_of(const InputFactor& f) const {
    for (std::size_t i = 0; i < factors.size(); ++i)
        if (factors[i] == f) return weight[i];
    throw Error(errc::unknown_factor, "factor not present in gamma map");
}

GammaMap gamma_weights(const ProcessGraph& graph, const Theta& theta, int target) {
    if (graph.is_cpp(target))
        throw Error(errc::target_is_cpp, "target " + graph.name(target) + " is a CPP");
    GammaMap out;
    out.target = target;
    out.factors = input_factors(graph);
    const auto g = gamma_to_node(graph, theta, target);
    out.weight.reserve(out.factors.size());
    for (const auto& f : out.factors) out.weight.push_back(g[f.node]);
    return out;
}

std::pair<double, GammaMap> linear_representation(const ProcessGraph& graph, const Theta& theta,
                                                  int target) {
    return {theta.mu[target], gamma_weights(graph, theta, target)};
}

NodeMoments node_moments(const ProcessGraph& graph, const Theta& theta) {
    const int m = graph.node_count();
    NodeMoments out;
    out.mean = theta.mu;
    out.variance.assign(m, 0.0);
    const auto g = gamma_matrix(graph, theta);
    for (int n = 0; n < m; ++n) {
        double acc = 0.0, comp = 0.0;
        for (int s = 0; s < m; ++s) {
            const double term = g(s, n) * g(s, n) * theta.v2[s];
            const double t = acc + term;  // Neumaier
            comp += (std::fabs(acc) >= std::fabs(term)) ? (acc - t) + term : (term - t) + acc;
            acc = t;
        }
        out.variance[n] = acc + comp;
    }
    return out;
}

double node_covariance(const ProcessGraph& graph, const Theta& theta, int a, int b) {
    const auto ga = gamma_to_node(graph, theta, a);
    const auto gb = gamma_to_node(graph, theta, b);
    double acc = 0.0, comp = 0.0;
    for (int s = 0; s < graph.node_count(); ++s) {
        const double term = ga[s] * gb[s] * theta.v2[s];
        const double t = acc + term;
        comp += (std::fabs(acc) >= std::fabs(term)) ? (acc - t) + term : (term - t) + acc;
        acc = t;
    }
    return acc + comp;
}

ForwardSampleDetail forward_sample_detail(const ProcessGraph& graph, const Theta& theta, int rows,
                                          std::uint64_t seed) {
    const int m = graph.node_count();
    ForwardSampleDetail out;
    out.data = BatchDataset(m);
    out.factor_draws.assign(static_cast<std::size_t>(rows) * m, 0.0);
    std::vector<double> values(static_cast<std::size_t>(rows) * m, 0.0);

    parallel_for(rows, [&](int r) {
        RngStream rng = RngStream::derive(seed, {static_cast<std::uint64_t>(r)});
        double* x = values.data() + static_cast<std::size_t>(r) * m;
        double* f = out.factor_draws.data() + static_cast<std::size_t>(r) * m;
        for (int n : graph.topo_order()) {
            const double z = rng.normal();
            const double noise = std::sqrt(theta.v2[n]) * z;
            if (graph.is_cpp(n)) {
                x[n] = theta.mu[n] + noise;
                f[n] = x[n];
            } else {
                double acc = theta.mu[n];
                for (int p : graph.parents(n))
                    acc += theta.beta[graph.edge_index(p, n)] * (x[p] - theta.mu[p]);
                x[n] = acc + noise;
                f[n] = noise;
            }
        }
    });
    for (int r = 0; r < rows; ++r)
        out.data.add_row({values.data() + static_cast<std::size_t>(r) * m,
                          static_cast<std::size_t>(m)});
    return out;
}

BatchDataset forward_sample(const ProcessGraph& graph, const Theta& theta, int rows,
                            std::uint64_t seed) {
    if (rows < 1) throw Error(errc::empty_dataset, "forward_sample requires rows >= 1");
    return forward_sample_detail(graph, theta, rows, seed).data;
}

}  // namespace bnsv
