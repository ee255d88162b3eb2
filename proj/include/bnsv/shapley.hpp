#ifndef BNSV_SHAPLEY_HPP
#define BNSV_SHAPLEY_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "bnsv/dataset.hpp"
#include "bnsv/graph.hpp"
#include "bnsv/propagate.hpp"
#include "bnsv/theta.hpp"

namespace bnsv {

// Covariance structure over the input factors of an analysis.
//  Independent     : diagonal, model variances.
//  ModelPropagated : boundary CQAs get their model-propagated covariance
//                    (identical to Independent on the full graph, where all
//                    input factors are exogenous).
//  UserSupplied    : full matrix over the factor set, validated symmetric,
//                    diagonal > 0, PSD to 1e-8 on the smallest eigenvalue.
struct InputCovariance {
    enum class Mode { Independent, ModelPropagated, UserSupplied };
    Mode mode = Mode::Independent;
    Eigen::MatrixXd matrix;  // only for UserSupplied

    static InputCovariance independent() { return {Mode::Independent, {}}; }
    static InputCovariance model_propagated() { return {Mode::ModelPropagated, {}}; }
    static InputCovariance user(Eigen::MatrixXd m) { return {Mode::UserSupplied, std::move(m)}; }
};

// Throws BadCovariance when not symmetric / diagonal <= 0 / smallest
// eigenvalue < -tol.
void validate_covariance(const Eigen::MatrixXd& m, double tol = 1e-8);

struct SvEntry {
    InputFactor factor;
    double shapley;      // units^2 of the output; may be negative under correlated inputs
    double criticality;  // shapley / total_variance
};

struct SvReport {
    int output = -1;
    double total_variance = 0.0;
    std::vector<SvEntry> entries;
    InputCovariance::Mode cov_mode = InputCovariance::Mode::Independent;
    bool subgraph = false;
    std::vector<int> subgraph_nodes;  // empty for whole-graph reports

    const SvEntry& entry_of(const InputFactor& f) const;  // UnknownFactor
};

// Input covariance estimated from batch data: pairwise-complete sample
// covariance over the CPP block, model variances on the unobservable residual
// diagonal, zero across the blocks. The report carries the user-supplied mode
// so consumers can tell a data-estimated analysis from a model-independent one.
InputCovariance covariance_from_data(const ProcessGraph& graph, const Theta& theta,
                                     const BatchDataset& data);

// Payoff c(J) = E[Var[X_output | W_{-J}]]: remaining output variance when the
// complement of J is fixed. c(empty) = 0, c(all) = Var(output).
double cost_remaining_variance(const ProcessGraph& graph, const Theta& theta, int output,
                               const std::vector<InputFactor>& subset,
                               const InputCovariance& cov = InputCovariance::independent());

// Closed-form Shapley values over the full input factor set:
//   Sh_k = gamma_k^2 Var(W_k) + sum_{l != k} gamma_k gamma_l Cov(W_k, W_l).
// Under Independent mode this reduces to gamma^2 v^2. Throws TargetIsCpp.
SvReport sv_closed_form(const ProcessGraph& graph, const Theta& theta, int output,
                        const InputCovariance& cov = InputCovariance::independent());

// Exact Shapley values by full subset enumeration of the payoff function;
// bit k of the mask marks membership of factor k. K <= 20 (TooManyFactors).
std::vector<double> sv_bruteforce(const std::function<double(std::uint32_t)>& cost, int K);

// Complementary payoff of the same game, c'(J) = total - c(K \ J); both forms
// of the variance payoff yield the same Shapley values (test oracle helper).
std::function<double(std::uint32_t)> complementary_cost(
    const std::function<double(std::uint32_t)>& cost, int K, double total);

// Covariance source for boundary CQAs of a sub-graph analysis.
struct BoundaryCov {
    enum class Kind { Independent, ModelPropagated, SampleFromData, UserSupplied };
    Kind kind = Kind::ModelPropagated;
    const BatchDataset* data = nullptr;  // SampleFromData
    Eigen::MatrixXd user;                // UserSupplied, over boundary factors in report order

    static BoundaryCov model() { return {}; }
    static BoundaryCov independent() { return {Kind::Independent, nullptr, {}}; }
    static BoundaryCov from_data(const BatchDataset& d) {
        return {Kind::SampleFromData, &d, {}};
    }
};

// Analysis restricted to `nodes`: inputs are the CPPs inside, the boundary
// CQAs (all parents outside the sub-graph), and the residuals of internal
// CQAs. Boundary CQAs may be correlated; their covariance comes from the
// model, from data, or is dropped (Independent keeps model variances only).
// Every CQA in the sub-graph must have its parents all inside or all outside
// (SubgraphBoundaryMixed otherwise); the output must be inside
// (OutputNotInSubgraph).
SvReport subgraph_analysis(const ProcessGraph& graph, const Theta& theta,
                           const std::vector<int>& nodes, int output,
                           const BoundaryCov& cov = BoundaryCov::model());

// Sh / total variance for one factor of an existing report (UnknownFactor).
double criticality(const SvReport& report, const InputFactor& factor);

}  // namespace bnsv

#endif
