#ifndef BNSV_INFERENCE_HPP
#define BNSV_INFERENCE_HPP

#include <cstdint>
#include <vector>

#include "bnsv/dataset.hpp"
#include "bnsv/graph.hpp"
#include "bnsv/theta.hpp"

namespace bnsv {

// Conjugate prior: Normal on each mu_i and beta_ij, inverse-gamma
// InvGamma(kappa/2, lambda/2) on each v_i^2. Defaults are vague (flat enough
// that prior precision is negligible from a handful of batches up, while all
// posteriors stay proper).
struct Prior {
    std::vector<double> mu0, sigma0_sq;    // per node
    std::vector<double> kappa0, lambda0;   // per node
    std::vector<double> beta0, tau0_sq;    // per edge
};

// mu0 = column sample means when data is given (0 otherwise), sigma0^2 = 1e6;
// beta0 = 0, tau0^2 = 1e6; kappa0 = lambda0 = 0.02. All overridable by
// editing the returned struct.
Prior default_prior(const ProcessGraph& graph, const BatchDataset* data = nullptr);

struct NormalParams {
    double mean;
    double var;
};
struct InvGammaParams {
    double kappa;
    double lambda;  // distribution is InvGamma(kappa/2, lambda/2)
};

// Exact conditional posteriors given all other coefficients (`rest`). Rows
// enter a conditional iff they observe the relevant node, which covers both
// the complete-data forms and the top-sub-graph mixing forms with one code
// path (a complete dataset is the special case where every row qualifies).
//
// cond_post_beta throws ChildUnobservedInAllRows when the dataset is nonempty
// but no row observes the child; an empty dataset returns the prior.
NormalParams cond_post_beta(const ProcessGraph& graph, const Prior& prior,
                            const BatchDataset& data, const Theta& rest, int edge_index);
InvGammaParams cond_post_v2(const ProcessGraph& graph, const Prior& prior,
                            const BatchDataset& data, const Theta& rest, int node);
NormalParams cond_post_mu(const ProcessGraph& graph, const Prior& prior,
                          const BatchDataset& data, const Theta& rest, int node);

struct PosteriorDraws {
    std::vector<Theta> draws;
    long total_iters = 0;
    long burn_in = 0;
    long thin = 1;
    std::uint64_t seed = 0;
    int draw_count() const { return static_cast<int>(draws.size()); }
};

// Gibbs sampler: initialize from a prior draw, then per iteration sweep every
// beta (edge declaration order), every v^2 (node order), every mu (node
// order). Stored draws are iterations burn_in + (b-1)*thin + 1 for
// b = 1..(T - T0)/h. Deterministic for a fixed seed; coefficients whose node
// is never observed are drawn from their prior, so top-sub-graph-only data
// leaves out-of-scope coefficients at their prior marginals.
PosteriorDraws gibbs_sample(const ProcessGraph& graph, const Prior& prior,
                            const BatchDataset& data, long total_iters, long burn_in, long thin,
                            std::uint64_t seed);

}  // namespace bnsv

#endif
