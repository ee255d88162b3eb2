#include "bnsv/shapley.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "bnsv/error.hpp"
#include "bnsv/numeric.hpp"

namespace bnsv {

void validate_covariance(const Eigen::MatrixXd& m, double tol) {
    if (m.rows() != m.cols())
        throw Error(errc::bad_covariance, "covariance matrix is not square");
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        if (!(m(i, i) > 0.0))
            throw Error(errc::bad_covariance,
                        "diagonal entry " + std::to_string(i) + " is not positive");
        for (Eigen::Index j = 0; j < i; ++j)
            if (std::fabs(m(i, j) - m(j, i)) > tol * std::max(1.0, std::fabs(m(i, j))))
                throw Error(errc::bad_covariance, "matrix is not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    const double min_eig = es.eigenvalues().minCoeff();
    const double scale = std::max(1.0, m.diagonal().maxCoeff());
    if (min_eig < -tol * scale)
        throw Error(errc::bad_covariance,
                    "matrix is not positive semidefinite (min eigenvalue " +
                        std::to_string(min_eig) + ")");
}

const SvEntry& SvReport::entry_of(const InputFactor& f) const {
    for (const auto& e : entries)
        if (e.factor == f) return e;
    throw Error(errc::unknown_factor, "factor not present in report");
}

double criticality(const SvReport& report, const InputFactor& factor) {
    return report.entry_of(factor).criticality;
}

namespace {

// Resolved inputs of one analysis: factor list, gamma weights to the output,
// and the covariance over factors (dense only when correlations exist).
struct ResolvedInputs {
    std::vector<InputFactor> factors;
    std::vector<double> gamma;
    std::vector<double> diag;
    Eigen::MatrixXd dense;  // empty in diagonal mode
    bool diagonal = true;

    double cov(int i, int j) const {
        if (diagonal) return i == j ? diag[i] : 0.0;
        return dense(i, j);
    }
};

ResolvedInputs resolve_full_graph(const ProcessGraph& graph, const Theta& theta, int output,
                                  const InputCovariance& cov) {
    if (graph.is_cpp(output))
        throw Error(errc::target_is_cpp, "output " + graph.name(output) + " is a CPP");
    ResolvedInputs r;
    auto gm = gamma_weights(graph, theta, output);
    r.factors = std::move(gm.factors);
    r.gamma = std::move(gm.weight);
    const int k = static_cast<int>(r.factors.size());
    if (cov.mode == InputCovariance::Mode::UserSupplied) {
        if (cov.matrix.rows() != k)
            throw Error(errc::bad_covariance,
                        "user covariance must be " + std::to_string(k) + "x" + std::to_string(k) +
                            " over the input factors");
        validate_covariance(cov.matrix);
        r.dense = cov.matrix;
        r.diagonal = false;
    } else {
        // full-graph input factors are exogenous and mutually independent, so
        // ModelPropagated coincides with Independent here
        r.diag.reserve(k);
        for (const auto& f : r.factors) r.diag.push_back(theta.v2[f.node]);
    }
    return r;
}

double cost_of_subset(const ResolvedInputs& in, const std::vector<int>& idx) {
    NeumaierSum s;
    for (std::size_t a = 0; a < idx.size(); ++a) {
        s.add(in.gamma[idx[a]] * in.gamma[idx[a]] * in.cov(idx[a], idx[a]));
        if (!in.diagonal)
            for (std::size_t b = 0; b < a; ++b)
                s.add(2.0 * in.gamma[idx[a]] * in.gamma[idx[b]] * in.cov(idx[a], idx[b]));
    }
    return s.value();
}

SvReport closed_form_on(const ResolvedInputs& in, int output, InputCovariance::Mode mode) {
    const int k = static_cast<int>(in.factors.size());
    SvReport rep;
    rep.output = output;
    rep.cov_mode = mode;
    rep.entries.resize(k);
    NeumaierSum total;
    for (int i = 0; i < k; ++i) {
        NeumaierSum sh;
        sh.add(in.gamma[i] * in.gamma[i] * in.cov(i, i));
        if (!in.diagonal)
            for (int j = 0; j < k; ++j)
                if (j != i) sh.add(in.gamma[i] * in.gamma[j] * in.cov(i, j));
        rep.entries[i].factor = in.factors[i];
        rep.entries[i].shapley = sh.value();
        total.add(rep.entries[i].shapley);
    }
    rep.total_variance = total.value();
    for (auto& e : rep.entries) e.criticality = e.shapley / rep.total_variance;
    return rep;
}

}  // namespace

InputCovariance covariance_from_data(const ProcessGraph& graph, const Theta& theta,
                                     const BatchDataset& data) {
    const auto factors = input_factors(graph);
    const int k = static_cast<int>(factors.size());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(k, k);
    for (int i = 0; i < k; ++i)
        if (factors[i].kind == InputFactor::Kind::Residual) m(i, i) = theta.v2[factors[i].node];
    for (int i = 0; i < k; ++i) {
        if (factors[i].kind != InputFactor::Kind::Cpp) continue;
        for (int j = 0; j <= i; ++j) {
            if (factors[j].kind != InputFactor::Kind::Cpp) continue;
            const int a = factors[i].node, b = factors[j].node;
            std::vector<int> rows;
            for (int r = 0; r < data.row_count(); ++r)
                if (data.observed(r, a) && data.observed(r, b)) rows.push_back(r);
            if (rows.size() < 2)
                throw Error(errc::empty_dataset,
                            "need at least two joint rows for Cov(" + graph.name(a) + "," +
                                graph.name(b) + ")");
            double ma = 0.0, mb = 0.0;
            for (int r : rows) {
                ma += data.value(r, a);
                mb += data.value(r, b);
            }
            ma /= static_cast<double>(rows.size());
            mb /= static_cast<double>(rows.size());
            double ss = 0.0;
            for (int r : rows)
                ss += (data.value(r, a) - ma) * (data.value(r, b) - mb);
            m(i, j) = m(j, i) = ss / static_cast<double>(rows.size() - 1);
        }
    }
    return InputCovariance::user(std::move(m));
}

double cost_remaining_variance(const ProcessGraph& graph, const Theta& theta, int output,
                               const std::vector<InputFactor>& subset,
                               const InputCovariance& cov) {
    const auto in = resolve_full_graph(graph, theta, output, cov);
    std::vector<int> idx;
    idx.reserve(subset.size());
    for (const auto& f : subset) {
        const auto it = std::find(in.factors.begin(), in.factors.end(), f);
        if (it == in.factors.end())
            throw Error(errc::unknown_factor,
                        "subset member " + factor_label(graph, f) + " is not an input factor");
        idx.push_back(static_cast<int>(it - in.factors.begin()));
    }
    return cost_of_subset(in, idx);
}

SvReport sv_closed_form(const ProcessGraph& graph, const Theta& theta, int output,
                        const InputCovariance& cov) {
    return closed_form_on(resolve_full_graph(graph, theta, output, cov), output, cov.mode);
}

std::vector<double> sv_bruteforce(const std::function<double(std::uint32_t)>& cost, int K) {
    if (K < 1 || K > 20)
        throw Error(errc::too_many_factors, "brute force supports 1..20 factors, got " +
                                                std::to_string(K));
    // subset weights  w[s] = s! (K-1-s)! / K!  with exact 64-bit factorials
    std::vector<unsigned long long> fact(K + 1, 1);
    for (int i = 1; i <= K; ++i) fact[i] = fact[i - 1] * static_cast<unsigned long long>(i);
    std::vector<double> w(K, 0.0);
    for (int s = 0; s < K; ++s)
        w[s] = static_cast<double>(static_cast<long double>(fact[s]) * fact[K - 1 - s] /
                                   static_cast<long double>(fact[K]));

    const std::uint32_t full = (K == 32) ? ~0u : ((1u << K) - 1u);
    std::vector<double> c(static_cast<std::size_t>(full) + 1);
    for (std::uint32_t mask = 0; mask <= full; ++mask) c[mask] = cost(mask);

    std::vector<double> sh(K, 0.0);
    for (int k = 0; k < K; ++k) {
        NeumaierSum acc;
        const std::uint32_t bit = 1u << k;
        for (std::uint32_t mask = 0; mask <= full; ++mask) {
            if (mask & bit) continue;
            const int s = std::popcount(mask);
            acc.add(w[s] * (c[mask | bit] - c[mask]));
        }
        sh[k] = acc.value();
    }
    return sh;
}

std::function<double(std::uint32_t)> complementary_cost(
    const std::function<double(std::uint32_t)>& cost, int K, double total) {
    const std::uint32_t full = (1u << K) - 1u;
    return [cost, full, total](std::uint32_t mask) { return total - cost(full & ~mask); };
}

SvReport subgraph_analysis(const ProcessGraph& graph, const Theta& theta,
                           const std::vector<int>& nodes, int output, const BoundaryCov& cov) {
    std::vector<char> in_s(graph.node_count(), 0);
    for (int n : nodes) in_s[n] = 1;
    if (output < 0 || output >= graph.node_count() || !in_s[output])
        throw Error(errc::output_not_in_subgraph,
                    "output node is not part of the sub-graph");
    if (graph.is_cpp(output))
        throw Error(errc::target_is_cpp, "output " + graph.name(output) + " is a CPP");

    std::vector<int> cpps, boundary, internal;
    for (int n : graph.topo_order()) {
        if (!in_s[n]) continue;
        if (graph.is_cpp(n)) {
            cpps.push_back(n);
            continue;
        }
        const auto& pa = graph.parents(n);
        const int inside = static_cast<int>(
            std::count_if(pa.begin(), pa.end(), [&](int p) { return in_s[p] != 0; }));
        if (pa.empty() || inside == static_cast<int>(pa.size()))
            internal.push_back(n);
        else if (inside == 0)
            boundary.push_back(n);
        else
            throw Error(errc::subgraph_boundary_mixed,
                        "CQA " + graph.name(n) + " has parents both inside and outside");
    }

    ResolvedInputs r;
    for (int n : cpps) r.factors.push_back({InputFactor::Kind::Cpp, n});
    for (int n : boundary) r.factors.push_back({InputFactor::Kind::BoundaryCqa, n});
    for (int n : internal) r.factors.push_back({InputFactor::Kind::Residual, n});
    const int k = static_cast<int>(r.factors.size());

    // gamma restricted to the induced sub-graph
    std::vector<double> g(graph.node_count(), 0.0);
    g[output] = 1.0;
    const auto& topo = graph.topo_order();
    for (int rk = graph.topo_rank(output) - 1; rk >= 0; --rk) {
        const int n = topo[rk];
        if (!in_s[n]) continue;
        double acc = 0.0;
        for (int c : graph.children(n))
            if (in_s[c] && g[c] != 0.0) acc += theta.beta[graph.edge_index(n, c)] * g[c];
        g[n] = acc;
    }
    r.gamma.reserve(k);
    for (const auto& f : r.factors) r.gamma.push_back(g[f.node]);

    const bool correlated = !boundary.empty() && cov.kind != BoundaryCov::Kind::Independent;
    NodeMoments moments;
    if (!boundary.empty()) moments = node_moments(graph, theta);

    auto boundary_variance = [&](int n) -> double {
        if (cov.kind == BoundaryCov::Kind::SampleFromData) {
            const auto rows = cov.data->rows_observing(n);
            if (rows.size() < 2)
                throw Error(errc::empty_dataset,
                            "not enough rows observing " + graph.name(n) + " for a variance");
            double mean = 0.0;
            for (int rr : rows) mean += cov.data->value(rr, n);
            mean /= static_cast<double>(rows.size());
            double ss = 0.0;
            for (int rr : rows) ss += (cov.data->value(rr, n) - mean) * (cov.data->value(rr, n) - mean);
            return ss / static_cast<double>(rows.size() - 1);
        }
        return moments.variance[n];
    };

    if (!correlated) {
        r.diagonal = true;
        for (const auto& f : r.factors)
            r.diag.push_back(f.kind == InputFactor::Kind::BoundaryCqa ? boundary_variance(f.node)
                                                                      : theta.v2[f.node]);
    } else {
        r.diagonal = false;
        r.dense = Eigen::MatrixXd::Zero(k, k);
        for (int i = 0; i < k; ++i)
            r.dense(i, i) = r.factors[i].kind == InputFactor::Kind::BoundaryCqa
                                ? boundary_variance(r.factors[i].node)
                                : theta.v2[r.factors[i].node];
        for (int i = 0; i < k; ++i) {
            if (r.factors[i].kind != InputFactor::Kind::BoundaryCqa) continue;
            for (int j = 0; j < i; ++j) {
                if (r.factors[j].kind != InputFactor::Kind::BoundaryCqa) continue;
                double c = 0.0;
                switch (cov.kind) {
                    case BoundaryCov::Kind::ModelPropagated:
                        c = node_covariance(graph, theta, r.factors[i].node, r.factors[j].node);
                        break;
                    case BoundaryCov::Kind::SampleFromData: {
                        const int a = r.factors[i].node, b = r.factors[j].node;
                        std::vector<int> rows;
                        for (int rr = 0; rr < cov.data->row_count(); ++rr)
                            if (cov.data->observed(rr, a) && cov.data->observed(rr, b))
                                rows.push_back(rr);
                        if (rows.size() < 2)
                            throw Error(errc::empty_dataset, "not enough joint rows for covariance");
                        double ma = 0.0, mb = 0.0;
                        for (int rr : rows) {
                            ma += cov.data->value(rr, a);
                            mb += cov.data->value(rr, b);
                        }
                        ma /= static_cast<double>(rows.size());
                        mb /= static_cast<double>(rows.size());
                        double ss = 0.0;
                        for (int rr : rows)
                            ss += (cov.data->value(rr, a) - ma) * (cov.data->value(rr, b) - mb);
                        c = ss / static_cast<double>(rows.size() - 1);
                        break;
                    }
                    case BoundaryCov::Kind::UserSupplied: {
                        // indices within the boundary block, report order
                        auto bpos = [&](int node) {
                            return static_cast<int>(
                                std::find(boundary.begin(), boundary.end(), node) -
                                boundary.begin());
                        };
                        c = cov.user(bpos(r.factors[i].node), bpos(r.factors[j].node));
                        break;
                    }
                    case BoundaryCov::Kind::Independent:
                        break;
                }
                r.dense(i, j) = r.dense(j, i) = c;
            }
        }
        if (cov.kind == BoundaryCov::Kind::UserSupplied) {
            if (cov.user.rows() != static_cast<Eigen::Index>(boundary.size()))
                throw Error(errc::bad_covariance, "user boundary covariance has wrong size");
            validate_covariance(cov.user);
        }
    }

    auto mode = cov.kind == BoundaryCov::Kind::Independent
                    ? InputCovariance::Mode::Independent
                    : (cov.kind == BoundaryCov::Kind::UserSupplied
                           ? InputCovariance::Mode::UserSupplied
                           : InputCovariance::Mode::ModelPropagated);
    SvReport rep = closed_form_on(r, output, mode);
    rep.subgraph = true;
    rep.subgraph_nodes = nodes;
    return rep;
}

}  // namespace bnsv
