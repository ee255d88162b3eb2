#ifndef BNSV_ERROR_HPP
#define BNSV_ERROR_HPP

#include <stdexcept>
#include <string>
#include <utility>

namespace bnsv {

// All library failures carry a stable machine-readable code alongside the
// human-readable message. The CLI prints the code on stderr.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(code + ": " + message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

namespace errc {
// bn-model
inline constexpr const char* cycle_detected = "CycleDetected";
inline constexpr const char* edge_into_cpp = "EdgeIntoCpp";
inline constexpr const char* duplicate_name = "DuplicateName";
inline constexpr const char* unknown_name = "UnknownName";
// propagate / shapley
inline constexpr const char* target_is_cpp = "TargetIsCpp";
inline constexpr const char* unknown_factor = "UnknownFactor";
inline constexpr const char* too_many_factors = "TooManyFactors";
inline constexpr const char* output_not_in_subgraph = "OutputNotInSubgraph";
inline constexpr const char* subgraph_boundary_mixed = "SubgraphBoundaryMixed";
inline constexpr const char* bad_covariance = "BadCovariance";
// inference
inline constexpr const char* child_unobserved = "ChildUnobservedInAllRows";
inline constexpr const char* empty_dataset = "EmptyDataset";
inline constexpr const char* invalid_chain_params = "InvalidChainParams";
// mu-sa
inline constexpr const char* too_few_draws = "TooFewDraws";
inline constexpr const char* zero_total_variance = "ZeroTotalVariance";
// simgen
inline constexpr const char* invalid_range = "InvalidRange";
inline constexpr const char* infeasible_target = "InfeasibleTarget";
inline constexpr const char* subgraph_not_parent_closed = "SubgraphNotParentClosed";
// io
inline constexpr const char* parse_error = "ParseError";
inline constexpr const char* header_mismatch = "HeaderMismatch";
inline constexpr const char* non_numeric_cell = "NonNumericCell";
inline constexpr const char* scope_not_parent_closed = "ScopeNotParentClosed";
inline constexpr const char* report_graph_mismatch = "ReportGraphMismatch";
inline constexpr const char* io_error = "IoError";
inline constexpr const char* checksum_mismatch = "ChecksumMismatch";
inline constexpr const char* invalid_theta = "InvalidTheta";
}  // namespace errc

}  // namespace bnsv

#endif
