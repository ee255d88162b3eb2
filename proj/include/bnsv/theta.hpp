#ifndef BNSV_THETA_HPP
#define BNSV_THETA_HPP

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "bnsv/graph.hpp"

namespace bnsv {

// Coefficient set theta = (mu, v2, beta). mu and v2 are indexed by node; beta
// by the graph's edge declaration order. v2 is the conditional variance
// Var[X_k | Pa(X_k)] (equal to the marginal variance for CPP roots).
struct Theta {
    std::vector<double> mu;
    std::vector<double> v2;
    std::vector<double> beta;
};

struct ThetaIssue {
    enum class Code { NonPositiveVariance, MissingBeta, ExtraBeta, NonFiniteValue };
    Code code;
    int node = -1;  // for variance / mu issues
    int edge = -1;  // for beta issues (-1 for ExtraBeta keys outside the graph)
    std::string detail;
};

// Structured validation; empty result means theta satisfies all invariants
// against the graph.
std::vector<ThetaIssue> validate_theta(const ProcessGraph& graph, const Theta& theta);

// Builds a Theta from name-keyed maps (beta keyed by (parent, child) names).
// Throws InvalidTheta listing MissingBeta / ExtraBeta / invalid values.
Theta make_theta(const ProcessGraph& graph,
                 const std::vector<double>& mu,
                 const std::vector<double>& v2,
                 const std::map<std::pair<std::string, std::string>, double>& beta);

// Single model coefficient: Mu(node) | V2(node) | Beta(edge index).
struct CoefficientId {
    enum class Type { Mu, V2, Beta };
    Type type;
    int index;
    friend bool operator==(const CoefficientId&, const CoefficientId&) = default;
    friend auto operator<=>(const CoefficientId&, const CoefficientId&) = default;
};

std::string coefficient_label(const ProcessGraph& graph, const CoefficientId& c);

}  // namespace bnsv

#endif
