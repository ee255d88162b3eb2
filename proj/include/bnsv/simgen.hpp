#ifndef BNSV_SIMGEN_HPP
#define BNSV_SIMGEN_HPP

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "bnsv/dataset.hpp"
#include "bnsv/graph.hpp"
#include "bnsv/theta.hpp"

namespace bnsv {

struct RangeSpec {
    std::string node;
    double low;
    double up;
};

// Relative association classes with the fixed numeric mapping 0.9 / 0.6 / 0.3.
enum class AssociationLevel { High, Medium, Low };
double association_beta(AssociationLevel level);

// CPP marginal from its operating range: mu = (low+up)/2, sd = (up-low)/4.
// Throws InvalidRange unless low < up.
std::pair<double, double> range_to_cpp_params(const RangeSpec& spec);

// Fills theta.v2 for every CQA/Response node so that the marginal variance of
// each equals its target: v_i^2 = target_sd_i^2 - (variance propagated from
// upstream input factors). Processes nodes in topological order; theta.beta
// and the CPP v2 entries must already be set. Throws InfeasibleTarget naming
// the node and the excess when the propagated variance reaches the target
// (feasibility floor 1e-9).
void back_engineer_v(const ProcessGraph& graph, Theta& theta,
                     const std::vector<std::pair<int, double>>& target_sd);

// The 20-node mAbs drug-substance network: main fermentation (X1..X4 ->
// X5..X7), centrifuge (X8,X9 + X5..X7 -> X10,X11), chromatography (X12,X13 +
// X10,X11 -> X14..X16), filtration (X17,X18 + X14..X16 -> X19,X20); 44 edges.
// Node means and marginal SDs come from the published operating ranges;
// conditional variances are back-engineered so every marginal matches its
// range exactly.
struct MabsNetwork {
    ProcessGraph graph;
    Theta theta;
    std::vector<RangeSpec> ranges;                           // node-indexed
    std::map<std::string, std::vector<std::string>> subgraphs;  // named node sets
};

// cpp_labels: optional relabeling of the ten CPP slots
// {X1..X4, X8, X9, X12, X13, X17, X18}; must permute each unit's label set.
// Relabeling moves the physical ranges (means, units) between slots while the
// calibrated index-bound structure stays put, so index-keyed criticalities
// are mapping-invariant.
MabsNetwork build_mabs_network(const std::vector<std::string>& cpp_labels = {});

// Default CPP slot labels, unit by unit.
const std::vector<std::string>& mabs_default_cpp_labels();

// R1 complete rows plus R2 rows masked to the parent-closed subset `subgraph`
// (SubgraphNotParentClosed otherwise). Masked rows are sampled on the full
// graph, which is distribution-identical to sampling the sub-model. Fixed
// seed gives byte-identical datasets.
BatchDataset generate_batches(const ProcessGraph& graph, const Theta& theta, int complete_rows,
                              int incomplete_rows, const std::vector<int>& subgraph,
                              std::uint64_t seed);

}  // namespace bnsv

#endif
