#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "mrparse/profile.hpp"
#include "mrparse/util.hpp"

namespace mrparse {

using NodeId = std::int64_t;

/// Property and attribute values keep their JSON scalar type for lossless
/// serialization; comparisons and transition payloads use the canonical
/// string form from value_string().
using Value = Json;

inline std::string value_string(const Value& v) {
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

struct Anchor {
    std::int64_t from = 0;
    std::int64_t to = 0;
    bool operator==(const Anchor&) const = default;
    auto operator<=>(const Anchor&) const = default;
};

struct Node {
    NodeId id = 0;
    std::optional<std::string> label;
    std::vector<std::pair<std::string, Value>> properties;  // insertion-ordered map
    std::vector<Anchor> anchors;
    Json extra;  // unknown fields, preserved verbatim

    const Value* property(const std::string& name) const {
        for (const auto& [n, v] : properties)
            if (n == name) return &v;
        return nullptr;
    }
    void set_property(const std::string& name, Value v) {
        for (auto& [n, old] : properties)
            if (n == name) {
                old = std::move(v);
                return;
            }
        properties.emplace_back(name, std::move(v));
    }
};

struct Edge {
    NodeId source = 0;
    NodeId target = 0;
    std::optional<std::string> label;
    std::vector<std::pair<std::string, Value>> attributes;
    Json extra;

    std::string label_or_empty() const { return label ? *label : std::string(); }
};

/// A meaning-representation graph in the MRP data model. Immutable by
/// convention once built; corpus-level code shares graphs freely.
struct Graph {
    std::string id;
    std::string framework;
    int flavor = 0;
    std::string input;
    std::vector<NodeId> tops;
    std::vector<Node> nodes;
    std::vector<Edge> edges;
    Json extra;

    const Node* find_node(NodeId nid) const {
        for (const auto& n : nodes)
            if (n.id == nid) return &n;
        return nullptr;
    }
    Node* find_node(NodeId nid) {
        for (auto& n : nodes)
            if (n.id == nid) return &n;
        return nullptr;
    }
};

// ---- cycle analysis ----

namespace detail {

// Adjacency as indices into graph.edges, out-edges sorted by ascending target
// id (then edge index) so every traversal below is deterministic.
inline std::unordered_map<NodeId, std::vector<std::size_t>> sorted_adjacency(const Graph& g) {
    std::unordered_map<NodeId, std::vector<std::size_t>> adj;
    adj.reserve(g.nodes.size());
    for (const auto& n : g.nodes) adj[n.id];
    for (std::size_t i = 0; i < g.edges.size(); ++i) adj[g.edges[i].source].push_back(i);
    for (auto& [nid, out] : adj) {
        std::sort(out.begin(), out.end(), [&](std::size_t a, std::size_t b) {
            if (g.edges[a].target != g.edges[b].target) return g.edges[a].target < g.edges[b].target;
            return a < b;
        });
    }
    return adj;
}

// Iterative Tarjan; returns component id per node, components numbered in
// reverse topological discovery order (ids only used for grouping).
inline std::unordered_map<NodeId, int> strongly_connected_components(const Graph& g) {
    auto adj = sorted_adjacency(g);
    std::vector<NodeId> order;
    order.reserve(g.nodes.size());
    for (const auto& n : g.nodes) order.push_back(n.id);
    std::sort(order.begin(), order.end());

    std::unordered_map<NodeId, int> index, lowlink, comp;
    std::vector<NodeId> stack;
    std::set<NodeId> on_stack;
    int next_index = 0, next_comp = 0;

    struct Frame {
        NodeId node;
        std::size_t edge_pos;
    };
    for (NodeId start : order) {
        if (index.count(start)) continue;
        std::vector<Frame> frames{{start, 0}};
        index[start] = lowlink[start] = next_index++;
        stack.push_back(start);
        on_stack.insert(start);
        while (!frames.empty()) {
            auto& f = frames.back();
            const auto& out = adj[f.node];
            if (f.edge_pos < out.size()) {
                NodeId tgt = g.edges[out[f.edge_pos++]].target;
                if (!index.count(tgt)) {
                    index[tgt] = lowlink[tgt] = next_index++;
                    stack.push_back(tgt);
                    on_stack.insert(tgt);
                    frames.push_back({tgt, 0});
                } else if (on_stack.count(tgt)) {
                    lowlink[f.node] = std::min(lowlink[f.node], index[tgt]);
                }
            } else {
                NodeId done = f.node;
                frames.pop_back();
                if (!frames.empty())
                    lowlink[frames.back().node] = std::min(lowlink[frames.back().node], lowlink[done]);
                if (lowlink[done] == index[done]) {
                    for (;;) {
                        NodeId w = stack.back();
                        stack.pop_back();
                        on_stack.erase(w);
                        comp[w] = next_comp;
                        if (w == done) break;
                    }
                    ++next_comp;
                }
            }
        }
    }
    return comp;
}

}  // namespace detail

/// One witness directed cycle (as a list of edges) per strongly connected
/// component of size >= 2, plus one per self-loop edge. Empty iff the graph
/// is a DAG. Witnesses are deterministic: DFS from the lowest node id in the
/// component, out-edges taken in ascending-target order.
inline std::vector<std::vector<Edge>> find_cycles(const Graph& g) {
    auto comp = detail::strongly_connected_components(g);
    auto adj = detail::sorted_adjacency(g);

    std::map<int, std::vector<NodeId>> members;
    for (const auto& [nid, c] : comp) members[c].push_back(nid);
    for (auto& [c, nids] : members) std::sort(nids.begin(), nids.end());

    // Order results by the lowest node id involved.
    std::vector<std::pair<NodeId, std::vector<Edge>>> found;

    for (std::size_t i = 0; i < g.edges.size(); ++i)
        if (g.edges[i].source == g.edges[i].target)
            found.emplace_back(g.edges[i].source, std::vector<Edge>{g.edges[i]});

    for (const auto& [c, nids] : members) {
        if (nids.size() < 2) continue;
        NodeId start = nids[0];
        // DFS within the component until an edge closes back onto the path.
        std::vector<std::pair<NodeId, std::size_t>> path{{start, 0}};
        std::map<NodeId, std::size_t> path_pos{{start, 0}};
        std::vector<std::size_t> path_edges;
        std::set<NodeId> visited{start};
        std::vector<Edge> witness;
        while (!path.empty() && witness.empty()) {
            auto& [node, pos] = path.back();
            const auto& out = adj[node];
            bool advanced = false;
            while (pos < out.size()) {
                std::size_t ei = out[pos++];
                NodeId tgt = g.edges[ei].target;
                if (comp.at(tgt) != c || tgt == node) continue;
                auto hit = path_pos.find(tgt);
                if (hit != path_pos.end()) {
                    for (std::size_t k = hit->second; k < path_edges.size(); ++k)
                        witness.push_back(g.edges[path_edges[k]]);
                    witness.push_back(g.edges[ei]);
                    break;
                }
                if (visited.count(tgt)) continue;
                visited.insert(tgt);
                path_pos[tgt] = path_edges.size() + 1;
                path_edges.push_back(ei);
                path.push_back({tgt, 0});
                advanced = true;
                break;
            }
            if (witness.empty() && !advanced && pos >= out.size()) {
                path_pos.erase(node);
                path.pop_back();
                if (!path_edges.empty()) path_edges.pop_back();
            }
        }
        if (witness.empty()) throw Error("internal: SCC of size >= 2 without a witness cycle");
        found.emplace_back(start, std::move(witness));
    }

    std::stable_sort(found.begin(), found.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<std::vector<Edge>> cycles;
    cycles.reserve(found.size());
    for (auto& [nid, cyc] : found) cycles.push_back(std::move(cyc));
    return cycles;
}

inline bool is_cyclic(const Graph& g) { return !find_cycles(g).empty(); }

// ---- corpus statistics ----

struct FrameworkStats {
    std::size_t graph_count = 0;
    std::size_t cyclic_count = 0;
    std::optional<double> cyclic_fraction;
};

struct CorpusStats {
    std::size_t graph_count = 0;
    std::size_t cyclic_count = 0;
    std::optional<double> cyclic_fraction;  // absent on an empty corpus
    std::map<std::string, FrameworkStats> per_framework;

    Json to_json() const {
        Json j;
        j["graphs"] = graph_count;
        j["cyclic"] = cyclic_count;
        if (cyclic_fraction) j["cyclic-fraction"] = *cyclic_fraction;
        Json per = Json::object();
        for (const auto& [fw, st] : per_framework) {
            Json e;
            e["graphs"] = st.graph_count;
            e["cyclic"] = st.cyclic_count;
            if (st.cyclic_fraction) e["cyclic-fraction"] = *st.cyclic_fraction;
            per[fw] = e;
        }
        j["per-framework"] = per;
        return j;
    }
};

inline CorpusStats corpus_stats(const std::vector<Graph>& graphs) {
    CorpusStats stats;
    for (const auto& g : graphs) {
        bool cyc = is_cyclic(g);
        ++stats.graph_count;
        stats.cyclic_count += cyc;
        auto& fw = stats.per_framework[g.framework];
        ++fw.graph_count;
        fw.cyclic_count += cyc;
    }
    if (stats.graph_count > 0)
        stats.cyclic_fraction = static_cast<double>(stats.cyclic_count) / static_cast<double>(stats.graph_count);
    for (auto& [tag, fw] : stats.per_framework)
        if (fw.graph_count > 0)
            fw.cyclic_fraction = static_cast<double>(fw.cyclic_count) / static_cast<double>(fw.graph_count);
    return stats;
}

}  // namespace mrparse
