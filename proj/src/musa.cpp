#include "bnsv/musa.hpp"

#include <algorithm>
#include <cmath>

#include "bnsv/error.hpp"
#include "bnsv/gibbs_engine.hpp"
#include "bnsv/numeric.hpp"
#include "bnsv/parallel.hpp"
#include "bnsv/propagate.hpp"

namespace bnsv {

const FactorSummary& PosteriorSvSummary::of(const InputFactor& f) const {
    for (const auto& s : factors)
        if (s.factor == f) return s;
    throw Error(errc::unknown_factor, "factor not present in summary");
}

PosteriorSvSummary posterior_sv_summary(const PosteriorDraws& draws, const ProcessGraph& graph,
                                        int output) {
    const int b = draws.draw_count();
    if (b < 2) throw Error(errc::too_few_draws, "need at least 2 posterior draws");
    PosteriorSvSummary out;
    out.output = output;
    out.draw_count = b;
    const auto factors = input_factors(graph);
    const int k = static_cast<int>(factors.size());

    std::vector<NeumaierSum> sh_sum(k), sh_sq(k), p_sum(k), p_sq(k);
    std::vector<std::vector<double>> sh(static_cast<std::size_t>(b));
    std::vector<std::vector<double>> pc(static_cast<std::size_t>(b));
    for (int d = 0; d < b; ++d) {
        const SvReport rep = sv_closed_form(graph, draws.draws[d], output);
        sh[d].resize(k);
        pc[d].resize(k);
        for (int i = 0; i < k; ++i) {
            sh[d][i] = rep.entries[i].shapley;
            pc[d][i] = rep.entries[i].criticality;
        }
    }
    out.factors.resize(k);
    for (int i = 0; i < k; ++i) {
        NeumaierSum ms, mp;
        for (int d = 0; d < b; ++d) {
            ms.add(sh[d][i]);
            mp.add(pc[d][i]);
        }
        const double mean_sh = ms.value() / b;
        const double mean_p = mp.value() / b;
        NeumaierSum vs, vp;
        for (int d = 0; d < b; ++d) {
            vs.add((sh[d][i] - mean_sh) * (sh[d][i] - mean_sh));
            vp.add((pc[d][i] - mean_p) * (pc[d][i] - mean_p));
        }
        out.factors[i] = {factors[i], mean_sh, vs.value() / (b - 1), mean_p,
                          vp.value() / (b - 1)};
    }
    return out;
}

std::vector<CoefficientId> theta_path_set(const ProcessGraph& graph, const InputFactor& input,
                                          int output) {
    std::vector<CoefficientId> out;
    out.push_back({CoefficientId::Type::V2, input.node});
    for (int e = 0; e < graph.edge_count(); ++e) {
        const auto& ed = graph.edges()[e];
        if (graph.reaches(input.node, ed.parent) && graph.reaches(ed.child, output))
            out.push_back({CoefficientId::Type::Beta, e});
    }
    return out;
}

double quantity_value(const ProcessGraph& graph, const Theta& theta, const InputFactor& input,
                      int output, Quantity q) {
    const auto g = gamma_to_node(graph, theta, output);
    const double sh = g[input.node] * g[input.node] * theta.v2[input.node];
    if (q == Quantity::Shapley) return sh;
    NeumaierSum total;
    for (int n = 0; n < graph.node_count(); ++n) total.add(g[n] * g[n] * theta.v2[n]);
    return sh / total.value();
}

double nested_gibbs_cost(const ProcessGraph& graph, const Prior& prior, const BatchDataset& data,
                         std::span<const CoefficientId> subset, std::span<const Theta> outer,
                         const InputFactor& input, int output, Quantity q, int inner_draws,
                         int inner_thin, std::uint64_t seed) {
    if (subset.empty()) return 0.0;
    if (inner_draws < 2 || inner_thin < 1)
        throw Error(errc::invalid_chain_params, "inner chain needs B_I >= 2, h >= 1");
    const long inner_iters = static_cast<long>(inner_draws) * inner_thin + 1;

    GibbsEngine engine(graph, prior, data);
    std::vector<double> vals(static_cast<std::size_t>(inner_draws));
    NeumaierSum outer_avg;
    for (std::size_t o = 0; o < outer.size(); ++o) {
        RngStream rng = RngStream::derive(seed, {0x696e6e6572ULL, static_cast<std::uint64_t>(o)});
        engine.set_theta(outer[o]);
        int stored = 0;
        for (long t = 1; t <= inner_iters && stored < inner_draws; ++t) {
            engine.sweep_subset(subset, rng);
            if ((t - 1) % inner_thin == 0)
                vals[static_cast<std::size_t>(stored++)] =
                    quantity_value(graph, engine.theta(), input, output, q);
        }
        NeumaierSum mean;
        for (double v : vals) mean.add(v);
        const double mu = mean.value() / inner_draws;
        NeumaierSum ss;
        for (double v : vals) ss.add((v - mu) * (v - mu));
        outer_avg.add(ss.value() / (inner_draws - 1));
    }
    return outer_avg.value() / static_cast<double>(outer.size());
}

MuReport appro_shapley_mu(const ProcessGraph& graph, const Prior& prior, const BatchDataset& data,
                          const PosteriorDraws& draws, const InputFactor& input, int output,
                          Quantity q, const MuOptions& opts) {
    const int b = draws.draw_count();
    if (b < 2) throw Error(errc::too_few_draws, "need at least 2 posterior draws");
    if (opts.n_permutations < 1 || opts.outer_draws < 1)
        throw Error(errc::invalid_chain_params, "need N_pi >= 1 and B_O >= 1");

    // pinned overall estimation uncertainty over the B supplied draws
    std::vector<double> qv(static_cast<std::size_t>(b));
    for (int d = 0; d < b; ++d)
        qv[d] = quantity_value(graph, draws.draws[d], input, output, q);
    NeumaierSum mean;
    for (double v : qv) mean.add(v);
    const double mu = mean.value() / b;
    NeumaierSum ss;
    for (double v : qv) ss.add((v - mu) * (v - mu));
    const double pinned = ss.value() / (b - 1);

    auto path = theta_path_set(graph, input, output);
    const int L = static_cast<int>(path.size());

    // outer draws: evenly strided subsample, shared across permutations
    std::vector<Theta> outer;
    outer.reserve(opts.outer_draws);
    for (int o = 0; o < opts.outer_draws; ++o)
        outer.push_back(draws.draws[static_cast<std::size_t>(
            static_cast<long long>(o) * b / opts.outer_draws)]);

    // per-permutation increments, parallel over permutations, aggregated in
    // permutation order
    std::vector<std::vector<double>> delta(static_cast<std::size_t>(opts.n_permutations));
    parallel_for(opts.n_permutations, [&](int n) {
        RngStream perm_rng =
            RngStream::derive(opts.seed, {0x7065726dULL, static_cast<std::uint64_t>(n)});
        std::vector<int> pi(static_cast<std::size_t>(L));
        for (int i = 0; i < L; ++i) pi[i] = i;
        for (int i = L - 1; i > 0; --i) {
            const int j = static_cast<int>(perm_rng.next_u64() % static_cast<std::uint64_t>(i + 1));
            std::swap(pi[i], pi[j]);
        }
        std::vector<double>& d = delta[static_cast<std::size_t>(n)];
        d.assign(static_cast<std::size_t>(L), 0.0);
        std::vector<CoefficientId> prefix;
        prefix.reserve(L);
        double prev = 0.0;  // cost of the empty prefix
        for (int l = 0; l < L; ++l) {
            prefix.push_back(path[static_cast<std::size_t>(pi[l])]);
            double c;
            if (l == L - 1) {
                c = pinned;  // full set pinned to the reported overall uncertainty
            } else {
                std::vector<CoefficientId> ordered = prefix;  // canonical scan order
                std::sort(ordered.begin(), ordered.end());
                c = nested_gibbs_cost(graph, prior, data, ordered, outer, input, output, q,
                                      opts.inner_draws, opts.inner_thin,
                                      RngStream::derive(opts.seed,
                                                        {0x6e657374ULL,
                                                         static_cast<std::uint64_t>(n),
                                                         static_cast<std::uint64_t>(l)})
                                          .next_u64());
            }
            d[static_cast<std::size_t>(pi[l])] = c - prev;
            prev = c;
        }
    });

    MuReport rep;
    rep.input = input;
    rep.output = output;
    rep.quantity = q;
    rep.total_posterior_variance = pinned;
    rep.n_permutations = opts.n_permutations;
    rep.outer_draws = opts.outer_draws;
    rep.inner_draws = opts.inner_draws;
    rep.inner_iters = opts.inner_draws * opts.inner_thin + 1;
    rep.inner_thin = opts.inner_thin;
    rep.b_draws = b;
    rep.seed = opts.seed;

    std::vector<double> sh(static_cast<std::size_t>(L), 0.0);
    for (int l = 0; l < L; ++l) {
        NeumaierSum acc;
        for (int n = 0; n < opts.n_permutations; ++n)
            acc.add(delta[static_cast<std::size_t>(n)][static_cast<std::size_t>(l)]);
        sh[static_cast<std::size_t>(l)] = acc.value() / opts.n_permutations;
    }

    // The per-permutation increments telescope to the pinned total in exact
    // arithmetic; fold the float dust (a few ulps) into the last contribution
    // of the summation order so the decomposition identity holds bitwise.
    // When the leading partial sum lies within a factor of two of the total,
    // Sterbenz subtraction makes prefix + (pinned - prefix) land exactly on
    // pinned; otherwise fall back to fixed-point iteration.
    if (L > 0) {
        double prefix = 0.0;
        for (int l = 0; l + 1 < L; ++l) prefix += sh[static_cast<std::size_t>(l)];
        if (pinned / 2.0 <= prefix && prefix <= 2.0 * pinned) {
            sh[static_cast<std::size_t>(L - 1)] = pinned - prefix;
        } else {
            for (int iter = 0; iter < 64; ++iter) {
                double s = 0.0;
                for (double v : sh) s += v;
                const double resid = pinned - s;
                if (resid == 0.0) break;
                sh[static_cast<std::size_t>(L - 1)] += resid;
            }
        }
    }

    rep.contributions.resize(static_cast<std::size_t>(L));
    for (int l = 0; l < L; ++l) {
        rep.contributions[static_cast<std::size_t>(l)] = {
            path[static_cast<std::size_t>(l)], sh[static_cast<std::size_t>(l)],
            pinned > 0.0 ? sh[static_cast<std::size_t>(l)] / pinned : 0.0};
    }
    return rep;
}

std::vector<double> mu_proportions(const MuReport& report) {
    if (!(report.total_posterior_variance > 0.0))
        throw Error(errc::zero_total_variance, "pinned posterior variance is not positive");
    std::vector<double> out;
    out.reserve(report.contributions.size());
    for (const auto& c : report.contributions)
        out.push_back(c.shapley / report.total_posterior_variance);
    return out;
}

}  // namespace bnsv
