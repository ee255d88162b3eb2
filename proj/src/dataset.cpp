#include "bnsv/dataset.hpp"

#include <cmath>

#include "bnsv/error.hpp"

namespace bnsv {

void BatchDataset::add_row(std::span<const double> values) {
    if (static_cast<int>(values.size()) != nodes_)
        throw Error(errc::header_mismatch, "row width does not match node count");
    values_.insert(values_.end(), values.begin(), values.end());
}

bool BatchDataset::observed(int row, int node) const {
    return !std::isnan(value(row, node));
}

bool BatchDataset::row_complete(int row) const {
    for (int n = 0; n < nodes_; ++n)
        if (!observed(row, n)) return false;
    return true;
}

int BatchDataset::complete_rows() const {
    int c = 0;
    for (int r = 0; r < row_count(); ++r)
        if (row_complete(r)) ++c;
    return c;
}

std::vector<int> BatchDataset::rows_observing(int node) const {
    std::vector<int> out;
    for (int r = 0; r < row_count(); ++r)
        if (observed(r, node)) out.push_back(r);
    return out;
}

void BatchDataset::validate_scopes(const ProcessGraph& graph) const {
    if (graph.node_count() != nodes_)
        throw Error(errc::header_mismatch, "dataset width does not match graph");
    for (int r = 0; r < row_count(); ++r)
        for (int n = 0; n < nodes_; ++n) {
            if (!observed(r, n)) continue;
            for (int p : graph.parents(n))
                if (!observed(r, p))
                    throw Error(errc::scope_not_parent_closed,
                                "row " + std::to_string(r) + " observes " + graph.name(n) +
                                    " but not its parent " + graph.name(p));
        }
}

}  // namespace bnsv
