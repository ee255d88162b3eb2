#include "bnsv/inference.hpp"

#include <cmath>

#include "bnsv/error.hpp"
#include "bnsv/gibbs_engine.hpp"
#include "bnsv/numeric.hpp"

namespace bnsv {

Prior default_prior(const ProcessGraph& graph, const BatchDataset* data) {
    const int m = graph.node_count();
    Prior p;
    p.mu0.assign(m, 0.0);
    p.sigma0_sq.assign(m, 1e6);
    p.kappa0.assign(m, 0.02);
    p.lambda0.assign(m, 0.02);
    p.beta0.assign(graph.edge_count(), 0.0);
    p.tau0_sq.assign(graph.edge_count(), 1e6);
    if (data) {
        for (int n = 0; n < m; ++n) {
            NeumaierSum s;
            int count = 0;
            for (int r = 0; r < data->row_count(); ++r)
                if (data->observed(r, n)) {
                    s.add(data->value(r, n));
                    ++count;
                }
            if (count > 0) p.mu0[n] = s.value() / count;
        }
    }
    return p;
}

NormalParams cond_post_beta(const ProcessGraph& graph, const Prior& prior,
                            const BatchDataset& data, const Theta& rest, int edge_index) {
    const Edge e = graph.edges()[edge_index];
    const int i = e.parent, j = e.child;
    const double tau0 = prior.tau0_sq[edge_index];
    const double b0 = prior.beta0[edge_index];
    const double vj = rest.v2[j];

    NeumaierSum sum_a2, sum_am;
    int rows = 0;
    for (int r = 0; r < data.row_count(); ++r) {
        if (!data.observed(r, j)) continue;
        ++rows;
        const double alpha = data.value(r, i) - rest.mu[i];
        // partial residual of child j excluding this edge
        double m = data.value(r, j) - rest.mu[j];
        for (int k : graph.parents(j))
            if (k != i) m -= rest.beta[graph.edge_index(k, j)] * (data.value(r, k) - rest.mu[k]);
        sum_a2.add(alpha * alpha);
        sum_am.add(alpha * m);
    }
    if (data.row_count() > 0 && rows == 0)
        throw Error(errc::child_unobserved,
                    "no row observes child " + graph.name(j) + " of edge " +
                        graph.name(i) + " -> " + graph.name(j));
    const double denom = tau0 * sum_a2.value() + vj;
    return {(tau0 * sum_am.value() + vj * b0) / denom, tau0 * vj / denom};
}

InvGammaParams cond_post_v2(const ProcessGraph& graph, const Prior& prior,
                            const BatchDataset& data, const Theta& rest, int node) {
    NeumaierSum ss;
    int rows = 0;
    for (int r = 0; r < data.row_count(); ++r) {
        if (!data.observed(r, node)) continue;
        ++rows;
        double u = data.value(r, node) - rest.mu[node];
        for (int k : graph.parents(node))
            u -= rest.beta[graph.edge_index(k, node)] * (data.value(r, k) - rest.mu[k]);
        ss.add(u * u);
    }
    return {prior.kappa0[node] + rows, prior.lambda0[node] + ss.value()};
}

NormalParams cond_post_mu(const ProcessGraph& graph, const Prior& prior, const BatchDataset& data,
                          const Theta& rest, int node) {
    const int i = node;
    double precision = 1.0 / prior.sigma0_sq[i];
    NeumaierSum numer;
    numer.add(prior.mu0[i] / prior.sigma0_sq[i]);

    // own-node term over rows observing i
    {
        NeumaierSum sum_a;
        int rows = 0;
        for (int r = 0; r < data.row_count(); ++r) {
            if (!data.observed(r, i)) continue;
            ++rows;
            double a = data.value(r, i);
            for (int k : graph.parents(i))
                a -= rest.beta[graph.edge_index(k, i)] * (data.value(r, k) - rest.mu[k]);
            sum_a.add(a);
        }
        precision += rows / rest.v2[i];
        numer.add(sum_a.value() / rest.v2[i]);
    }

    // child terms over rows observing each child
    for (int j : graph.children(i)) {
        const double bij = rest.beta[graph.edge_index(i, j)];
        NeumaierSum sum_c;
        int rows = 0;
        for (int r = 0; r < data.row_count(); ++r) {
            if (!data.observed(r, j)) continue;
            ++rows;
            double c = bij * data.value(r, i) - (data.value(r, j) - rest.mu[j]);
            for (int k : graph.parents(j))
                if (k != i)
                    c += rest.beta[graph.edge_index(k, j)] * (data.value(r, k) - rest.mu[k]);
            sum_c.add(c);
        }
        precision += rows * bij * bij / rest.v2[j];
        numer.add(bij * sum_c.value() / rest.v2[j]);
    }
    return {numer.value() / precision, 1.0 / precision};
}

PosteriorDraws gibbs_sample(const ProcessGraph& graph, const Prior& prior,
                            const BatchDataset& data, long total_iters, long burn_in, long thin,
                            std::uint64_t seed) {
    if (data.row_count() == 0) throw Error(errc::empty_dataset, "gibbs_sample needs data");
    if (burn_in < 0 || thin < 1 || total_iters <= burn_in)
        throw Error(errc::invalid_chain_params, "require T > T0 >= 0 and h >= 1");
    if ((total_iters - burn_in) % thin != 0)
        throw Error(errc::invalid_chain_params, "(T - T0) must be divisible by h");
    data.validate_scopes(graph);

    const long n_draws = (total_iters - burn_in) / thin;
    PosteriorDraws out;
    out.total_iters = total_iters;
    out.burn_in = burn_in;
    out.thin = thin;
    out.seed = seed;
    out.draws.reserve(static_cast<std::size_t>(n_draws));

    RngStream rng = RngStream::derive(seed, {0x676962627301ULL});
    GibbsEngine engine(graph, prior, data);
    engine.init_for_chain();
    long next_store = burn_in + 1;
    for (long t = 1; t <= total_iters; ++t) {
        engine.sweep(rng);
        if (t == next_store && static_cast<long>(out.draws.size()) < n_draws) {
            out.draws.push_back(engine.theta());
            next_store += thin;
        }
    }
    return out;
}

// ------------------------------------------------------------- GibbsEngine

GibbsEngine::GibbsEngine(const ProcessGraph& graph, const Prior& prior, const BatchDataset& data)
    : graph_(graph), prior_(prior), data_(data) {
    const int m = graph.node_count();
    obs_.resize(m);
    res_.resize(m);
    for (int n = 0; n < m; ++n) {
        obs_[n] = data.rows_observing(n);
        res_[n].assign(obs_[n].size(), 0.0);
    }
    theta_.mu.assign(m, 0.0);
    theta_.v2.assign(m, 1.0);
    theta_.beta.assign(graph.edge_count(), 0.0);
}

void GibbsEngine::set_theta(const Theta& theta) {
    theta_ = theta;
    recompute_residuals();
}

void GibbsEngine::init_for_chain() {
    theta_.beta = prior_.beta0;
    theta_.mu = prior_.mu0;
    for (int n = 0; n < graph_.node_count(); ++n) {
        const auto& rows = obs_[n];
        if (rows.size() < 2) {
            theta_.v2[n] = 1.0;
            continue;
        }
        double mean = 0.0;
        for (int r : rows) mean += data_.value(r, n);
        mean /= static_cast<double>(rows.size());
        double ss = 0.0;
        for (int r : rows) {
            const double d = data_.value(r, n) - mean;
            ss += d * d;
        }
        theta_.v2[n] = std::max(ss / static_cast<double>(rows.size() - 1), 1e-12);
    }
    recompute_residuals();
}

void GibbsEngine::recompute_residuals() {
    for (int n = 0; n < graph_.node_count(); ++n) {
        for (std::size_t s = 0; s < obs_[n].size(); ++s) {
            const int r = obs_[n][s];
            double u = data_.value(r, n) - theta_.mu[n];
            for (int k : graph_.parents(n))
                u -= theta_.beta[graph_.edge_index(k, n)] * (data_.value(r, k) - theta_.mu[k]);
            res_[n][s] = u;
        }
    }
}

void GibbsEngine::update_beta(int edge, RngStream& rng) {
    const Edge e = graph_.edges()[edge];
    const int i = e.parent, j = e.child;
    const double old = theta_.beta[edge];
    const double vj = theta_.v2[j];
    double sum_a2 = 0.0, sum_am = 0.0;
    for (std::size_t s = 0; s < obs_[j].size(); ++s) {
        const int r = obs_[j][s];
        const double alpha = data_.value(r, i) - theta_.mu[i];
        const double m = res_[j][s] + old * alpha;
        sum_a2 += alpha * alpha;
        sum_am += alpha * m;
    }
    const double tau0 = prior_.tau0_sq[edge];
    const double denom = tau0 * sum_a2 + vj;
    const double mean = (tau0 * sum_am + vj * prior_.beta0[edge]) / denom;
    const double fresh = rng.normal(mean, tau0 * vj / denom);
    theta_.beta[edge] = fresh;
    const double delta = old - fresh;
    if (delta != 0.0)
        for (std::size_t s = 0; s < obs_[j].size(); ++s) {
            const int r = obs_[j][s];
            res_[j][s] += delta * (data_.value(r, i) - theta_.mu[i]);
        }
}

void GibbsEngine::update_v2(int node, RngStream& rng) {
    double ss = 0.0;
    for (double u : res_[node]) ss += u * u;
    const double kappa = prior_.kappa0[node] + static_cast<double>(obs_[node].size());
    const double lambda = prior_.lambda0[node] + ss;
    theta_.v2[node] = rng.inv_gamma(kappa / 2.0, lambda / 2.0);
}

void GibbsEngine::update_mu(int node, RngStream& rng) {
    const int i = node;
    const double old = theta_.mu[i];
    double precision = 1.0 / prior_.sigma0_sq[i];
    double numer = prior_.mu0[i] / prior_.sigma0_sq[i];

    const double ri = static_cast<double>(obs_[i].size());
    double sum_res_i = 0.0;
    for (double u : res_[i]) sum_res_i += u;
    precision += ri / theta_.v2[i];
    numer += (sum_res_i + ri * old) / theta_.v2[i];  // a_i = res_i + mu_i

    for (int j : graph_.children(i)) {
        const double bij = theta_.beta[graph_.edge_index(i, j)];
        const double rj = static_cast<double>(obs_[j].size());
        double sum_res_j = 0.0;
        for (double u : res_[j]) sum_res_j += u;
        precision += rj * bij * bij / theta_.v2[j];
        numer += bij * (rj * bij * old - sum_res_j) / theta_.v2[j];  // c_ij = bij*mu_i - res_j
    }

    const double fresh = rng.normal(numer / precision, 1.0 / precision);
    theta_.mu[i] = fresh;
    const double delta = fresh - old;
    if (delta != 0.0) {
        for (auto& u : res_[i]) u -= delta;
        for (int j : graph_.children(i)) {
            const double bij = theta_.beta[graph_.edge_index(i, j)];
            for (auto& u : res_[j]) u += bij * delta;
        }
    }
}

void GibbsEngine::sweep(RngStream& rng) {
    for (int e = 0; e < graph_.edge_count(); ++e) {
        if (obs_[graph_.edges()[e].child].empty())
            theta_.beta[e] = rng.normal(prior_.beta0[e], prior_.tau0_sq[e]);
        else
            update_beta(e, rng);
    }
    for (int n = 0; n < graph_.node_count(); ++n) update_v2(n, rng);
    for (int n = 0; n < graph_.node_count(); ++n) update_mu(n, rng);
    if (++sweeps_since_refresh_ >= 64) {
        sweeps_since_refresh_ = 0;
        recompute_residuals();
    }
}

void GibbsEngine::sweep_subset(std::span<const CoefficientId> subset, RngStream& rng) {
    for (const auto& c : subset) {
        if (c.type != CoefficientId::Type::Beta) continue;
        if (obs_[graph_.edges()[c.index].child].empty())
            theta_.beta[c.index] = rng.normal(prior_.beta0[c.index], prior_.tau0_sq[c.index]);
        else
            update_beta(c.index, rng);
    }
    for (const auto& c : subset)
        if (c.type == CoefficientId::Type::V2) update_v2(c.index, rng);
    for (const auto& c : subset)
        if (c.type == CoefficientId::Type::Mu) update_mu(c.index, rng);
    if (++sweeps_since_refresh_ >= 64) {
        sweeps_since_refresh_ = 0;
        recompute_residuals();
    }
}

}  // namespace bnsv
