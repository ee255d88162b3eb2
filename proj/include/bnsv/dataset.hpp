#ifndef BNSV_DATASET_HPP
#define BNSV_DATASET_HPP

#include <span>
#include <vector>

#include "bnsv/graph.hpp"

namespace bnsv {

// Batch records over the graph's nodes. A row is either complete or observed
// only on a parent-closed node subset ("top sub-graph"); unobserved cells are
// NaN. Rows may carry different scopes, which generalizes the two-dataset
// mixing case to multiple incomplete datasets.
class BatchDataset {
public:
    BatchDataset() = default;
    explicit BatchDataset(int node_count) : nodes_(node_count) {}

    int node_count() const { return nodes_; }
    int row_count() const { return static_cast<int>(values_.size()) / std::max(nodes_, 1); }

    // values.size() must equal node_count; NaN marks an unobserved cell
    void add_row(std::span<const double> values);

    double value(int row, int node) const { return values_[static_cast<std::size_t>(row) * nodes_ + node]; }
    bool observed(int row, int node) const;
    bool row_complete(int row) const;

    int complete_rows() const;
    int incomplete_rows() const { return row_count() - complete_rows(); }

    std::vector<int> rows_observing(int node) const;

    // Every row's scope must be parent-closed: a CQA cell may be observed only
    // if all its parents are observed in the same row. Throws
    // ScopeNotParentClosed naming the first offending row.
    void validate_scopes(const ProcessGraph& graph) const;

    const std::vector<double>& raw() const { return values_; }

private:
    int nodes_ = 0;
    std::vector<double> values_;  // row-major
};

}  // namespace bnsv

#endif
