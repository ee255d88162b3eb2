#include "bnsv/graph.hpp"

#include <algorithm>
#include <set>

#include "bnsv/error.hpp"

namespace bnsv {

ProcessGraph ProcessGraph::build(const std::vector<NodeSpec>& nodes,
                                 const std::vector<EdgeSpec>& edges) {
    ProcessGraph g;
    g.names_.reserve(nodes.size());
    g.kinds_.reserve(nodes.size());
    for (const auto& n : nodes) {
        if (n.name.empty())
            throw Error(errc::duplicate_name, "node name must be non-empty");
        if (!g.by_name_.emplace(n.name, static_cast<int>(g.names_.size())).second)
            throw Error(errc::duplicate_name, "duplicate node name '" + n.name + "'");
        g.names_.push_back(n.name);
        g.kinds_.push_back(n.kind);
    }
    const int m = g.node_count();
    g.parents_.resize(m);
    g.children_.resize(m);

    std::set<std::pair<int, int>> seen;
    for (const auto& e : edges) {
        const int p = g.index_of(e.parent);
        const int c = g.index_of(e.child);
        if (g.kinds_[c] == NodeKind::Cpp)
            throw Error(errc::edge_into_cpp,
                        "edge " + e.parent + " -> " + e.child + " targets a CPP node");
        if (!seen.emplace(p, c).second)
            throw Error(errc::duplicate_name,
                        "duplicate edge " + e.parent + " -> " + e.child);
        g.edges_.push_back({p, c});
        g.parents_[c].push_back(p);
        g.children_[p].push_back(c);
    }

    // Kahn with smallest-declaration-index tie break
    std::vector<int> indeg(m, 0);
    for (const auto& e : g.edges_) indeg[e.child]++;
    std::set<int> ready;
    for (int i = 0; i < m; ++i)
        if (indeg[i] == 0) ready.insert(i);
    g.topo_.reserve(m);
    while (!ready.empty()) {
        const int n = *ready.begin();
        ready.erase(ready.begin());
        g.topo_.push_back(n);
        for (int c : g.children_[n])
            if (--indeg[c] == 0) ready.insert(c);
    }
    if (static_cast<int>(g.topo_.size()) != m) {
        std::string stuck;
        for (const auto& e : g.edges_)
            if (indeg[e.child] > 0) {
                if (!stuck.empty()) stuck += ", ";
                stuck += g.names_[e.parent] + " -> " + g.names_[e.child];
            }
        throw Error(errc::cycle_detected, "cycle through edges: " + stuck);
    }
    g.topo_rank_.assign(m, -1);
    for (int r = 0; r < m; ++r) g.topo_rank_[g.topo_[r]] = r;

    // reachability closure: process in reverse topological order
    g.words_per_node_ = (m + 63) / 64;
    g.reach_.assign(static_cast<std::size_t>(m) * g.words_per_node_, 0);
    auto row = [&](int n) { return g.reach_.data() + static_cast<std::size_t>(n) * g.words_per_node_; };
    for (int r = m - 1; r >= 0; --r) {
        const int n = g.topo_[r];
        std::uint64_t* rn = row(n);
        rn[n / 64] |= (1ULL << (n % 64));
        for (int c : g.children_[n]) {
            const std::uint64_t* rc = row(c);
            for (int w = 0; w < g.words_per_node_; ++w) rn[w] |= rc[w];
        }
    }
    return g;
}

int ProcessGraph::find(std::string_view name) const {
    auto it = by_name_.find(std::string(name));
    return it == by_name_.end() ? -1 : it->second;
}

int ProcessGraph::index_of(std::string_view name) const {
    const int i = find(name);
    if (i < 0)
        throw Error(errc::unknown_name, "unknown node '" + std::string(name) + "'");
    return i;
}

int ProcessGraph::edge_index(int parent, int child) const {
    for (int i = 0; i < edge_count(); ++i)
        if (edges_[i].parent == parent && edges_[i].child == child) return i;
    return -1;
}

bool ProcessGraph::reaches(int from, int to) const {
    const std::uint64_t* r = reach_.data() + static_cast<std::size_t>(from) * words_per_node_;
    return (r[to / 64] >> (to % 64)) & 1ULL;
}

std::vector<InputFactor> input_factors(const ProcessGraph& graph) {
    std::vector<InputFactor> out;
    out.reserve(graph.node_count());
    for (int n : graph.topo_order())
        if (graph.is_cpp(n)) out.push_back({InputFactor::Kind::Cpp, n});
    for (int n : graph.topo_order())
        if (!graph.is_cpp(n)) out.push_back({InputFactor::Kind::Residual, n});
    return out;
}

std::string factor_label(const ProcessGraph& graph, const InputFactor& f) {
    if (f.kind == InputFactor::Kind::Residual) return "e:" + graph.name(f.node);
    return graph.name(f.node);
}

}  // namespace bnsv
