#ifndef BNSV_PROPAGATE_HPP
#define BNSV_PROPAGATE_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "bnsv/dataset.hpp"
#include "bnsv/graph.hpp"
#include "bnsv/theta.hpp"

namespace bnsv {

// Path-weight coefficients gamma(source -> node): the sum over directed paths
// of edge-coefficient products, computed by dynamic programming over the
// topological order instead of path enumeration. Row `source` is the weight
// of the input factor rooted at that node (the CPP value for roots, the
// residual e_source for CQAs); gamma(n, n) = 1.
class GammaMatrix {
public:
    GammaMatrix(int n) : n_(n), w_(static_cast<std::size_t>(n) * n, 0.0) {}
    double operator()(int source, int node) const {
        return w_[static_cast<std::size_t>(source) * n_ + node];
    }
    double& at(int source, int node) { return w_[static_cast<std::size_t>(source) * n_ + node]; }
    int size() const { return n_; }

private:
    int n_;
    std::vector<double> w_;
};

GammaMatrix gamma_matrix(const ProcessGraph& graph, const Theta& theta);

// gamma(node -> target) for every node, one backward pass; gamma[target] = 1.
std::vector<double> gamma_to_node(const ProcessGraph& graph, const Theta& theta, int target);

struct GammaMap {
    int target;
    std::vector<InputFactor> factors;  // full-graph input factor order
    std::vector<double> weight;        // aligned with factors
    double weight_of(const InputFactor& f) const;  // UnknownFactor
};

// Weights of every input factor on `target`. Throws TargetIsCpp.
GammaMap gamma_weights(const ProcessGraph& graph, const Theta& theta, int target);

// Affine representation of `target` over the input factors:
//   X_target = intercept + sum_k gamma_k (X_k - mu_k) + sum_k gamma_k e_k.
// Evaluating it on the draws used by forward_sample reproduces the sampled
// target values. Throws TargetIsCpp.
std::pair<double, GammaMap> linear_representation(const ProcessGraph& graph, const Theta& theta,
                                                  int target);

struct NodeMoments {
    std::vector<double> mean;
    std::vector<double> variance;  // marginal
};

NodeMoments node_moments(const ProcessGraph& graph, const Theta& theta);

// Cov(X_a, X_b) propagated through the model: sum over shared input factors
// of gamma_a * gamma_b * v^2. Symmetric; node_covariance(a, a) equals the
// marginal variance.
double node_covariance(const ProcessGraph& graph, const Theta& theta, int a, int b);

// R complete rows; row r uses the substream derived from (seed, r), nodes
// drawn in topological order, one N(0,1) draw each. Deterministic for a fixed
// seed and independent of worker count.
BatchDataset forward_sample(const ProcessGraph& graph, const Theta& theta, int rows,
                            std::uint64_t seed);

// Test hook: also returns the realized input-factor values (CPP slots hold the
// sampled X, CQA slots the residual draw e), row-major.
struct ForwardSampleDetail {
    BatchDataset data;
    std::vector<double> factor_draws;  // row-major, node-indexed
};
ForwardSampleDetail forward_sample_detail(const ProcessGraph& graph, const Theta& theta, int rows,
                                          std::uint64_t seed);

}  // namespace bnsv

#endif
