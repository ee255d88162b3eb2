#ifndef BNSV_MUSA_HPP
#define BNSV_MUSA_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "bnsv/inference.hpp"
#include "bnsv/shapley.hpp"

namespace bnsv {

enum class Quantity { Shapley, Criticality };

struct FactorSummary {
    InputFactor factor;
    double sh_mean, sh_var;  // posterior mean / variance of the Shapley value
    double p_mean, p_var;    // posterior mean / variance of the criticality
};

struct PosteriorSvSummary {
    int output = -1;
    int draw_count = 0;
    std::vector<FactorSummary> factors;
    const FactorSummary& of(const InputFactor& f) const;  // UnknownFactor
};

// Per-draw closed-form Shapley analysis, then sample mean/variance across
// draws (unbiased, divisor B-1). Throws TooFewDraws when B < 2.
PosteriorSvSummary posterior_sv_summary(const PosteriorDraws& draws, const ProcessGraph& graph,
                                        int output);

// Coefficients whose estimation uncertainty reaches Sh_{W,output}: the source
// node's conditional variance plus every edge coefficient on a directed path
// from the factor's node to the output. mu coefficients never qualify. With
// no path to the output the beta set is empty and only V2 remains.
std::vector<CoefficientId> theta_path_set(const ProcessGraph& graph, const InputFactor& input,
                                          int output);

// Shapley value or criticality of `input` on `output` at one theta (inputs
// independent, full-graph closed form).
double quantity_value(const ProcessGraph& graph, const Theta& theta, const InputFactor& input,
                      int output, Quantity q);

// Nested-Gibbs estimate of the cost
//   c(J) = E*[ Var*( quantity | theta_{path \ J}, data ) ]:
// for each outer posterior draw, coefficients outside J stay frozen at the
// outer draw while an inner Gibbs chain (initialized at the outer draw,
// stored every `inner_thin` iterations) resamples theta_J; the inner sample
// variance (divisor B_I - 1) is averaged over the outer draws. c(empty) = 0
// by definition, without sampling.
double nested_gibbs_cost(const ProcessGraph& graph, const Prior& prior, const BatchDataset& data,
                         std::span<const CoefficientId> subset, std::span<const Theta> outer,
                         const InputFactor& input, int output, Quantity q, int inner_draws,
                         int inner_thin, std::uint64_t seed);

struct MuOptions {
    int n_permutations = 500;  // N_pi
    int outer_draws = 5;       // B_O
    int inner_draws = 20;      // B_I
    int inner_thin = 5;        // inner chain keeps every h-th state; T = B_I*h + 1
    std::uint64_t seed = 0;
};

struct MuContribution {
    CoefficientId coeff;
    double shapley;     // contribution to the posterior variance of the quantity
    double proportion;  // shapley / total (sign preserved; negatives are MC noise)
};

struct MuReport {
    InputFactor input;
    int output = -1;
    Quantity quantity = Quantity::Criticality;
    // Pinned overall estimation uncertainty Var*[quantity | data] over the B
    // supplied draws; the per-coefficient contributions sum to it bitwise
    // under the report's coefficient order.
    double total_posterior_variance = 0.0;
    std::vector<MuContribution> contributions;  // canonical order: V2 then betas by edge index
    int n_permutations = 0, outer_draws = 0, inner_draws = 0, inner_iters = 0, inner_thin = 0;
    int b_draws = 0;
    std::uint64_t seed = 0;
};

// Algorithm: draw N_pi uniform permutations of the path set; walk each
// permutation evaluating the nested-Gibbs cost at successive prefixes (empty
// prefix = 0, full set pinned to the B-draw posterior variance); average the
// per-coefficient incremental costs. The B_O outer draws are an evenly
// strided subsample of `draws`, shared across permutations. Deterministic
// for fixed options and independent of worker count.
MuReport appro_shapley_mu(const ProcessGraph& graph, const Prior& prior, const BatchDataset& data,
                          const PosteriorDraws& draws, const InputFactor& input, int output,
                          Quantity q, const MuOptions& opts);

// Proportions Sh*_l / Var*; throws ZeroTotalVariance when the pinned total is
// not positive.
std::vector<double> mu_proportions(const MuReport& report);

}  // namespace bnsv

#endif
