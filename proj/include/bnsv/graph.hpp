#ifndef BNSV_GRAPH_HPP
#define BNSV_GRAPH_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace bnsv {

// CPP: controllable root factor, never has parents.
// CQA: measured quality attribute, linear-Gaussian child.
// Response: a CQA flagged as a terminal output of interest; a graph may store
// several candidates and each analysis names its output node.
enum class NodeKind { Cpp, Cqa, Response };

struct NodeSpec {
    std::string name;
    NodeKind kind;
};

struct EdgeSpec {
    std::string parent;
    std::string child;
};

struct Edge {
    int parent;
    int child;
    friend bool operator==(const Edge&, const Edge&) = default;
};

// Immutable process knowledge graph. Node indices are dense 0..m in
// declaration order; the topological order is deterministic with ties broken
// by declaration order. Safe to share across threads after construction.
class ProcessGraph {
public:
    ProcessGraph() = default;

    // Validates and builds; throws DuplicateName, UnknownName, EdgeIntoCpp,
    // CycleDetected (message lists the offending edges).
    static ProcessGraph build(const std::vector<NodeSpec>& nodes,
                              const std::vector<EdgeSpec>& edges);

    int node_count() const { return static_cast<int>(kinds_.size()); }
    int edge_count() const { return static_cast<int>(edges_.size()); }

    const std::string& name(int node) const { return names_[node]; }
    NodeKind kind(int node) const { return kinds_[node]; }
    bool is_cpp(int node) const { return kinds_[node] == NodeKind::Cpp; }

    int find(std::string_view name) const;      // -1 when absent
    int index_of(std::string_view name) const;  // throws UnknownName

    const std::vector<int>& parents(int node) const { return parents_[node]; }
    const std::vector<int>& children(int node) const { return children_[node]; }
    const std::vector<Edge>& edges() const { return edges_; }
    int edge_index(int parent, int child) const;  // -1 when absent

    const std::vector<int>& topo_order() const { return topo_; }
    int topo_rank(int node) const { return topo_rank_[node]; }

    // Directed reachability (from == to counts as reachable).
    bool reaches(int from, int to) const;

private:
    std::vector<std::string> names_;
    std::vector<NodeKind> kinds_;
    std::vector<Edge> edges_;
    std::vector<std::vector<int>> parents_;
    std::vector<std::vector<int>> children_;
    std::vector<int> topo_;
    std::vector<int> topo_rank_;
    std::unordered_map<std::string, int> by_name_;
    std::vector<std::uint64_t> reach_;  // closure bitsets, row-major words
    int words_per_node_ = 0;
};

// A random input factor of the variance game: either a CPP node itself, the
// residual attached to a CQA/Response node, or (in sub-graph analyses only) a
// boundary CQA treated as an exogenous input.
struct InputFactor {
    enum class Kind { Cpp, Residual, BoundaryCqa };
    Kind kind;
    int node;
    friend bool operator==(const InputFactor&, const InputFactor&) = default;
};

// Full-graph input factor set: CPPs in topological order, then residuals of
// CQA/Response nodes in topological order.
std::vector<InputFactor> input_factors(const ProcessGraph& graph);

// "X3" for CPPs and boundary CQAs, "e:X7" for residuals.
std::string factor_label(const ProcessGraph& graph, const InputFactor& f);

}  // namespace bnsv

#endif
