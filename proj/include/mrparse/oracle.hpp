#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mrparse/constraints.hpp"
#include "mrparse/irep.hpp"
#include "mrparse/transitions.hpp"

namespace mrparse {

/// How a gold node comes into existence during the parse. Nodes with an
/// anchored descendant are created compositionally with NODE from a
/// designated child; unanchored subgraphs hang off an already-creatable
/// parent with CHILD. The recipe edge is consumed by the creation itself.
struct CreationRecipe {
    enum class How { Preexisting, ByNode, ByChild };
    How how = How::Preexisting;
    NodeId via = 0;             // designated child (ByNode) or parent (ByChild)
    std::size_t gold_edge = 0;  // index into gold edges, consumed at creation
};

struct OraclePlan {
    std::map<NodeId, CreationRecipe> recipes;
    std::set<std::size_t> initial_pending;  // gold edge indices built as plain edges
};

namespace detail {

struct GoldIndex {
    std::map<NodeId, const INode*> nodes;
    std::map<NodeId, std::vector<std::size_t>> out_edges;  // by source
    std::map<NodeId, std::vector<std::size_t>> in_edges;   // by target
    std::set<NodeId> terminal_ids;
};

inline GoldIndex index_gold(const IGraph& gold) {
    GoldIndex gi;
    for (const auto& n : gold.nodes) gi.nodes[n.id] = &n;
    for (std::size_t i = 0; i < gold.edges.size(); ++i) {
        gi.out_edges[gold.edges[i].source].push_back(i);
        gi.in_edges[gold.edges[i].target].push_back(i);
    }
    gi.terminal_ids.insert(gold.terminals.begin(), gold.terminals.end());
    return gi;
}

// Rightmost terminal row reachable from each node; terminals map to their
// own row. Nodes that reach no terminal are absent.
inline std::map<NodeId, std::size_t> rightmost_terminal(const IGraph& gold) {
    std::map<NodeId, std::size_t> rightmost;
    for (std::size_t i = 0; i < gold.terminals.size(); ++i) rightmost[gold.terminals[i]] = i;
    // propagate over reversed edges until fixpoint; graphs are small
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& e : gold.edges) {
            auto it = rightmost.find(e.target);
            if (it == rightmost.end()) continue;
            auto at = rightmost.find(e.source);
            if (at == rightmost.end() || it->second > at->second) {
                rightmost[e.source] = it->second;
                changed = true;
            }
        }
    }
    return rightmost;
}

}  // namespace detail

/// Decide every node's creation recipe up front. Throws when some node can
/// never be created (no anchored descendant and no creatable parent).
inline OraclePlan make_oracle_plan(const IGraph& gold) {
    auto gi = detail::index_gold(gold);
    auto rightmost = detail::rightmost_terminal(gold);

    OraclePlan plan;
    plan.recipes[gold.virtual_root] = {CreationRecipe::How::Preexisting, 0, 0};
    for (NodeId t : gold.terminals) plan.recipes[t] = {CreationRecipe::How::Preexisting, 0, 0};

    // Compositional creations. The designated child is the one whose yield
    // extends furthest right, so the node is created only once its other
    // dependents are already on the stack: a freshly created node is the
    // newest and can always swap its way down to them, whereas the reverse
    // order wedges on the swap index precondition.
    for (const auto& n : gold.nodes) {
        if (plan.recipes.count(n.id)) continue;
        if (!rightmost.count(n.id)) continue;
        std::optional<std::size_t> best;
        for (std::size_t ei : gi.out_edges[n.id]) {
            NodeId child = gold.edges[ei].target;
            if (!rightmost.count(child)) continue;
            if (!best) {
                best = ei;
                continue;
            }
            NodeId best_child = gold.edges[*best].target;
            // larger rightmost wins; ties go to the smaller child id
            auto key = [&](NodeId c, std::size_t e) {
                return std::tuple(rightmost.at(c), -c, -static_cast<std::int64_t>(e));
            };
            if (key(child, ei) > key(best_child, *best)) best = ei;
        }
        if (!best) throw Error("internal: node " + std::to_string(n.id) + " reaches a terminal without an edge");
        plan.recipes[n.id] = {CreationRecipe::How::ByNode, gold.edges[*best].target, *best};
    }

    // Remaining nodes attach under an already-creatable parent, in waves.
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& n : gold.nodes) {
            if (plan.recipes.count(n.id)) continue;
            std::optional<std::size_t> best;
            for (std::size_t ei : gi.in_edges[n.id]) {
                NodeId parent = gold.edges[ei].source;
                if (!plan.recipes.count(parent)) continue;
                if (!best || std::tuple(parent, ei) <
                                 std::tuple(gold.edges[*best].source, *best))
                    best = ei;
            }
            if (best) {
                plan.recipes[n.id] = {CreationRecipe::How::ByChild, gold.edges[*best].source, *best};
                changed = true;
            }
        }
    }
    for (const auto& n : gold.nodes)
        if (!plan.recipes.count(n.id))
            throw Error("oracle stuck: node " + std::to_string(n.id) +
                        " has no anchored descendant and no creatable parent");

    std::set<std::size_t> consumed;
    for (const auto& [nid, r] : plan.recipes)
        if (r.how != CreationRecipe::How::Preexisting) consumed.insert(r.gold_edge);
    for (std::size_t i = 0; i < gold.edges.size(); ++i)
        if (!consumed.count(i)) plan.initial_pending.insert(i);
    return plan;
}

/// Stepwise oracle state: the parser configuration plus what remains of the
/// gold graph. Pending sets shrink monotonically along a produced sequence.
struct OracleState {
    const IGraph* gold = nullptr;
    OraclePlan plan;
    ParserState parser;
    std::vector<NodeId> ref_to_gold;        // parser ref -> gold node id
    std::map<NodeId, NodeRef> gold_to_ref;
    std::set<std::size_t> pending_edges;    // gold edge indices still to build
    std::vector<std::pair<std::string, std::string>> pending_attrs;  // due on the latest edge

    NodeId gold_of(NodeRef r) const { return ref_to_gold[static_cast<std::size_t>(r)]; }
    bool created(NodeId gold_id) const { return gold_to_ref.count(gold_id) != 0; }
};

inline OracleState make_oracle_state(const IGraph& gold, const std::vector<TokenRow>& rows) {
    if (gold.terminals.size() != rows.size())
        throw Error("oracle: gold graph has " + std::to_string(gold.terminals.size()) + " terminals but " +
                    std::to_string(rows.size()) + " token rows");
    if (auto problems = check_igraph(gold); !problems.empty())
        throw Error("oracle: gold graph violates intermediate-form invariants: " + problems.front());

    OracleState o;
    o.gold = &gold;
    o.plan = make_oracle_plan(gold);
    o.parser = initial_state(rows.size());
    o.ref_to_gold.assign(o.parser.nodes.size(), -1);
    o.ref_to_gold[static_cast<std::size_t>(o.parser.root)] = gold.virtual_root;
    o.gold_to_ref[gold.virtual_root] = o.parser.root;
    for (std::size_t i = 0; i < gold.terminals.size(); ++i) {
        o.ref_to_gold[static_cast<std::size_t>(o.parser.terminals[i])] = gold.terminals[i];
        o.gold_to_ref[gold.terminals[i]] = o.parser.terminals[i];
    }
    o.pending_edges = o.plan.initial_pending;
    return o;
}

namespace detail {

inline const INode& gold_node(const OracleState& o, NodeId id) {
    const INode* n = o.gold->find_node(id);
    if (!n) throw Error("internal: unknown gold node " + std::to_string(id));
    return *n;
}

// Next decoration still missing on the mapped parser node, if any.
inline std::optional<Transition> pending_decoration(const OracleState& o, NodeRef ref) {
    NodeId gid = o.gold_of(ref);
    const INode& gn = gold_node(o, gid);
    const StateNode& pn = o.parser.nodes[static_cast<std::size_t>(ref)];
    if (gn.label && !pn.label) return Transition::label(*gn.label);
    if (pn.properties.size() < gn.properties.size()) {
        const auto& [name, value] = gn.properties[pn.properties.size()];
        return Transition::property(name, value);
    }
    return std::nullopt;
}

// Lowest pending gold edge from `src` to `tgt`, optionally label-matched.
inline std::optional<std::size_t> pending_edge_between(const OracleState& o, NodeId src, NodeId tgt,
                                                       const std::string* label = nullptr) {
    for (std::size_t ei : o.pending_edges) {
        const IEdge& e = o.gold->edges[ei];
        if (e.source == src && e.target == tgt && (!label || e.label_or_empty() == *label)) return ei;
    }
    return std::nullopt;
}

inline bool has_pending_edge_with(const OracleState& o, NodeId a, NodeId b) {
    return pending_edge_between(o, a, b).has_value() || pending_edge_between(o, b, a).has_value();
}

// Lowest-id uncreated gold node whose recipe goes through `via` with the
// given creation method.
inline std::optional<NodeId> creation_due(const OracleState& o, NodeId via, CreationRecipe::How how) {
    std::optional<NodeId> best;
    for (const auto& [nid, recipe] : o.plan.recipes) {
        if (recipe.how != how || recipe.via != via || o.created(nid)) continue;
        if (!best || nid < *best) best = nid;
    }
    return best;
}

// A node is finished when it carries all decorations, participates in no
// pending edge, and is no longer needed as the anchor of a creation.
inline bool node_done(const OracleState& o, NodeRef ref) {
    if (ref == o.parser.root) return false;
    NodeId gid = o.gold_of(ref);
    if (pending_decoration(o, ref)) return false;
    for (std::size_t ei : o.pending_edges) {
        const IEdge& e = o.gold->edges[ei];
        if (e.source == gid || e.target == gid) return false;
    }
    for (const auto& [nid, recipe] : o.plan.recipes)
        if (recipe.how != CreationRecipe::How::Preexisting && recipe.via == gid && !o.created(nid)) return false;
    return true;
}

inline bool all_work_done(const OracleState& o) {
    if (!o.pending_edges.empty() || !o.pending_attrs.empty()) return false;
    for (const auto& [nid, recipe] : o.plan.recipes)
        if (!o.created(nid)) return false;
    for (const auto& [gid, ref] : o.gold_to_ref)
        if (pending_decoration(o, ref)) return false;
    return true;
}

}  // namespace detail

/// All gold-compatible transitions in the current state, most preferred
/// first: ATTRIBUTE > LABEL > PROPERTY > LEFT-EDGE > RIGHT-EDGE > NODE >
/// CHILD > REDUCE > SWAP > SHIFT > FINISH. Throws "oracle stuck" when no
/// transition keeps the gold graph reachable.
inline std::vector<Transition> next_gold(const OracleState& o) {
    const ParserState& s = o.parser;
    if (s.finished) throw Error("oracle: parser already in terminal state");
    std::vector<Transition> out;

    if (!o.pending_attrs.empty()) {
        const auto& [name, value] = o.pending_attrs.front();
        out.push_back(Transition::attribute(name, value));
    }

    bool pair_action = false;
    if (!s.stack.empty()) {
        NodeRef top = s.top();
        NodeId gtop = o.gold_of(top);
        if (auto deco = detail::pending_decoration(o, top)) out.push_back(*deco);
        if (s.stack.size() >= 2) {
            NodeId gsec = o.gold_of(s.second());
            if (auto ei = detail::pending_edge_between(o, gtop, gsec)) {
                out.push_back(Transition::left_edge(o.gold->edges[*ei].label_or_empty()));
                pair_action = true;
            }
            if (auto ei = detail::pending_edge_between(o, gsec, gtop)) {
                out.push_back(Transition::right_edge(o.gold->edges[*ei].label_or_empty()));
                pair_action = true;
            }
        }
        if (auto due = detail::creation_due(o, gtop, CreationRecipe::How::ByNode)) {
            out.push_back(Transition::node(o.gold->edges[o.plan.recipes.at(*due).gold_edge].label_or_empty()));
            pair_action = true;
        }
        if (auto due = detail::creation_due(o, gtop, CreationRecipe::How::ByChild)) {
            out.push_back(Transition::child(o.gold->edges[o.plan.recipes.at(*due).gold_edge].label_or_empty()));
            pair_action = true;
        }
        if (detail::node_done(o, top)) out.push_back(Transition::reduce());

        // Reordering: get the second out of the way when the top two cannot
        // act on each other — to dive toward a deeper partner of the top, to
        // dispose of a finished second, or to unblock two stalled nodes.
        if (s.stack.size() >= 2 && !pair_action && !s.is_root_node(s.second()) &&
            is_legal(s, Transition::swap())) {
            bool deeper_partner = false;
            for (std::size_t k = 0; k + 2 < s.stack.size() && !deeper_partner; ++k)
                deeper_partner = detail::has_pending_edge_with(o, gtop, o.gold_of(s.stack[k]));
            bool second_done = detail::node_done(o, s.second());
            bool top_stalled = !detail::node_done(o, top) && out.empty();
            if (deeper_partner || second_done || top_stalled) out.push_back(Transition::swap());
        }
    }

    if (!s.buffer.empty()) out.push_back(Transition::shift());
    if (is_legal(s, Transition::finish()) && detail::all_work_done(o)) out.push_back(Transition::finish());

    if (out.empty()) {
        // last resort before giving up: any legal swap that keeps the root at
        // the bottom (swap counts are bounded by the index-order rule)
        if (s.stack.size() >= 2 && !s.is_root_node(s.second()) && is_legal(s, Transition::swap())) {
            out.push_back(Transition::swap());
        } else {
            std::string detail_msg = "nothing pending";
            if (!o.pending_edges.empty()) {
                const IEdge& e = o.gold->edges[*o.pending_edges.begin()];
                detail_msg = "blocking edge " + std::to_string(e.source) + "->" + std::to_string(e.target) +
                             " [" + e.label_or_empty() + "]";
            } else {
                for (const auto& [nid, recipe] : o.plan.recipes)
                    if (!o.created(nid)) {
                        detail_msg = "node " + std::to_string(nid) + " never created";
                        break;
                    }
            }
            throw Error("oracle stuck: " + detail_msg);
        }
    }
    return out;
}

/// Advance the oracle by one transition (normally next_gold().front()),
/// keeping the gold bookkeeping in sync with the parser.
inline OracleState oracle_apply(const OracleState& state, const Transition& t) {
    using K = Transition::Kind;
    OracleState o = state;
    const ParserState& s = o.parser;

    switch (t.kind) {
        case K::Node:
        case K::Child: {
            NodeId gtop = o.gold_of(s.top());
            auto how = t.kind == K::Node ? CreationRecipe::How::ByNode : CreationRecipe::How::ByChild;
            auto due = detail::creation_due(o, gtop, how);
            if (!due) throw Error("oracle: no creation due at stack top");
            NodeRef fresh = static_cast<NodeRef>(s.nodes.size());
            o.ref_to_gold.push_back(*due);
            o.gold_to_ref[*due] = fresh;
            o.pending_attrs = o.gold->edges[o.plan.recipes.at(*due).gold_edge].attributes;
            break;
        }
        case K::LeftEdge:
        case K::RightEdge: {
            NodeId src = t.kind == K::LeftEdge ? o.gold_of(s.top()) : o.gold_of(s.second());
            NodeId tgt = t.kind == K::LeftEdge ? o.gold_of(s.second()) : o.gold_of(s.top());
            auto ei = detail::pending_edge_between(o, src, tgt, &*t.payload);
            if (!ei) throw Error("oracle: no pending gold edge for " + t.encode());
            o.pending_edges.erase(*ei);
            o.pending_attrs = o.gold->edges[*ei].attributes;
            break;
        }
        case K::Attribute: {
            if (o.pending_attrs.empty()) throw Error("oracle: no attribute pending");
            o.pending_attrs.erase(o.pending_attrs.begin());
            break;
        }
        default:
            break;
    }
    o.parser = apply(o.parser, t);
    return o;
}

struct OracleResult {
    std::vector<Transition> sequence;
    std::map<NodeRef, NodeId> node_ids;  // parser creation index -> gold node id
};

/// Compile a gold intermediate graph into a legal transition sequence whose
/// replay reconstructs it exactly. The step bound is a safety net; measured
/// sequence lengths stay well under it.
inline OracleResult gold_parse(const IGraph& gold, const std::vector<TokenRow>& rows) {
    OracleState o = make_oracle_state(gold, rows);
    std::size_t decorations = 0;
    for (const auto& n : gold.nodes) decorations += n.properties.size() + (n.label ? 1 : 0);
    for (const auto& e : gold.edges) decorations += e.attributes.size();
    std::size_t budget = 60 * (gold.nodes.size() + gold.edges.size() + decorations) + 200;

    OracleResult result;
    while (!o.parser.finished) {
        if (result.sequence.size() > budget) throw Error("oracle runaway on graph " + gold.id);
        Transition t = next_gold(o).front();
        o = oracle_apply(o, t);
        result.sequence.push_back(t);
    }
    for (std::size_t r = 0; r < o.ref_to_gold.size(); ++r)
        result.node_ids[static_cast<NodeRef>(r)] = o.ref_to_gold[r];
    return result;
}

inline std::vector<Transition> gold_sequence(const IGraph& gold, const std::vector<TokenRow>& rows) {
    return gold_parse(gold, rows).sequence;
}

/// Run a transition sequence from the initial state for `rows`, failing fast
/// with the offending index, and read out the resulting intermediate graph.
inline IGraph replay(const std::vector<TokenRow>& rows, const std::vector<Transition>& seq) {
    ParserState s = initial_state(rows.size());
    for (std::size_t k = 0; k < seq.size(); ++k) {
        try {
            s = apply(s, seq[k]);
        } catch (const Error& e) {
            throw Error("replay failed at transition " + std::to_string(k) + ": " + e.what());
        }
    }
    return extract_igraph(s);
}

/// Rename intermediate-graph node ids (used to port replayed graphs back
/// onto gold ids via the oracle's creation record).
inline IGraph renumber_igraph(const IGraph& ig, const std::map<NodeId, NodeId>& id_map) {
    IGraph out = ig;
    auto rename = [&](NodeId id) {
        auto it = id_map.find(id);
        return it != id_map.end() ? it->second : id;
    };
    for (auto& n : out.nodes) n.id = rename(n.id);
    for (auto& e : out.edges) {
        e.source = rename(e.source);
        e.target = rename(e.target);
    }
    out.virtual_root = rename(out.virtual_root);
    for (auto& t : out.terminals) t = rename(t);
    return out;
}

}  // namespace mrparse
