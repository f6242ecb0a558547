#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mrparse/companion.hpp"
#include "mrparse/graph.hpp"
#include "mrparse/graph_io.hpp"
#include "mrparse/profile.hpp"

namespace mrparse {

// Reserved edge labels attaching the virtual nodes.
inline constexpr const char* kTopEdge = "TOP";
inline constexpr const char* kAnchorEdge = "ANCHOR";

// Placeholder tokens standing for the concatenated lemmas / forms of a
// node's anchored tokens.
inline constexpr const char* kLemmaPlaceholder = "⟨ℓ⟩";  // ⟨ℓ⟩
inline constexpr const char* kFormPlaceholder = "⟨f⟩";        // ⟨f⟩

struct INode {
    NodeId id = 0;
    std::optional<std::string> label;
    std::vector<std::pair<std::string, std::string>> properties;
    bool is_virtual = false;
};

struct IEdge {
    NodeId source = 0;
    NodeId target = 0;
    std::optional<std::string> label;
    std::vector<std::pair<std::string, std::string>> attributes;

    std::string label_or_empty() const { return label ? *label : std::string(); }
};

/// The parser-internal graph form: the original graph plus a virtual root
/// (TOP edges to the graph's tops) and one virtual terminal per token
/// (ANCHOR edges from anchored nodes). Labels and properties may contain
/// placeholder tokens. removed_cycle_edges is training-side bookkeeping.
struct IGraph {
    std::string id;
    std::string framework;
    int flavor = 0;
    std::vector<INode> nodes;
    std::vector<IEdge> edges;
    NodeId virtual_root = 0;
    std::vector<NodeId> terminals;  // one per token row, in row order
    std::vector<Edge> removed_cycle_edges;

    const INode* find_node(NodeId nid) const {
        for (const auto& n : nodes)
            if (n.id == nid) return &n;
        return nullptr;
    }
    bool is_terminal(NodeId nid) const {
        return std::find(terminals.begin(), terminals.end(), nid) != terminals.end();
    }
    // Terminal positions (row indices) a node anchors to, ascending.
    std::vector<std::size_t> anchored_rows(NodeId nid) const {
        std::map<NodeId, std::size_t> pos;
        for (std::size_t i = 0; i < terminals.size(); ++i) pos[terminals[i]] = i;
        std::set<std::size_t> rows;
        for (const auto& e : edges)
            if (e.source == nid && e.label_or_empty() == kAnchorEdge && pos.count(e.target))
                rows.insert(pos[e.target]);
        return {rows.begin(), rows.end()};
    }
};

// ---- cycle breaking ----

/// Remove edges until the graph is acyclic: repeatedly take a witness cycle
/// and delete the cycle edge with the lexicographically greatest
/// (source, target, label); parallel duplicates resolve to the latest edge.
/// Returns the acyclic graph and the removed edges in removal order.
inline std::pair<Graph, std::vector<Edge>> break_cycles(const Graph& graph) {
    Graph g = graph;
    std::vector<Edge> removed;
    for (;;) {
        auto cycles = find_cycles(g);
        if (cycles.empty()) break;
        for (const auto& cycle : cycles) {
            auto key = [](const Edge& e) { return std::tuple(e.source, e.target, e.label_or_empty()); };
            const Edge* worst = &cycle[0];
            for (const auto& e : cycle)
                if (key(e) > key(*worst)) worst = &e;
            std::size_t pick = g.edges.size();
            for (std::size_t i = 0; i < g.edges.size(); ++i)
                if (key(g.edges[i]) == key(*worst)) pick = i;
            if (pick == g.edges.size()) throw Error("internal: cycle edge not found in graph");
            removed.push_back(g.edges[pick]);
            g.edges.erase(g.edges.begin() + static_cast<std::ptrdiff_t>(pick));
        }
    }
    return {std::move(g), std::move(removed)};
}

// ---- placeholder substitution ----

namespace detail {

inline std::string resolve_tokens(std::string s, const std::string& lemma_concat, const std::string& form_concat) {
    for (auto [token, concat] : {std::pair<const char*, const std::string*>{kLemmaPlaceholder, &lemma_concat},
                                 {kFormPlaceholder, &form_concat}}) {
        std::string t = token;
        std::size_t pos = 0;
        while ((pos = s.find(t, pos)) != std::string::npos) {
            s.replace(pos, t.size(), *concat);
            pos += concat->size();
        }
    }
    return s;
}

// Case-insensitive replacement of every occurrence of `concat` by `token`,
// accepted only when expanding the token back reproduces the original string
// exactly (substitution must stay invertible).
inline std::optional<std::string> substitute_token(const std::string& original, const std::string& concat,
                                                   const char* token, const std::string& lemma_concat,
                                                   const std::string& form_concat) {
    if (concat.empty()) return std::nullopt;
    if (original.find(kLemmaPlaceholder) != std::string::npos ||
        original.find(kFormPlaceholder) != std::string::npos)
        return std::nullopt;
    std::string lower = ascii_lower(original), needle = ascii_lower(concat);
    std::string out;
    std::size_t from = 0;
    bool fired = false;
    for (;;) {
        std::size_t pos = lower.find(needle, from);
        if (pos == std::string::npos) break;
        out += original.substr(from, pos - from);
        out += token;
        from = pos + needle.size();
        fired = true;
    }
    if (!fired) return std::nullopt;
    out += original.substr(from);
    if (resolve_tokens(out, lemma_concat, form_concat) != original) return std::nullopt;
    return out;
}

struct Concats {
    std::string lemma;
    std::string form;
};

inline Concats concats_for(const std::vector<std::size_t>& row_indices, const std::vector<TokenRow>& rows) {
    std::vector<std::string> lemmas, forms;
    for (std::size_t i : row_indices) {
        lemmas.push_back(rows[i].lemma);
        forms.push_back(rows[i].form);
    }
    return {join(lemmas, " "), join(forms, " ")};
}

}  // namespace detail

// ---- MRP graph -> intermediate representation ----

inline IGraph to_intermediate(const Graph& graph, const std::vector<TokenRow>& rows,
                              const FrameworkProfile& profile) {
    auto [acyclic, removed] = break_cycles(graph);

    IGraph ig;
    ig.id = graph.id;
    ig.framework = graph.framework;
    ig.flavor = graph.flavor;
    ig.removed_cycle_edges = std::move(removed);

    NodeId next_id = -1;
    for (const auto& n : acyclic.nodes) next_id = std::max(next_id, n.id);
    ig.virtual_root = ++next_id;
    for (std::size_t i = 0; i < rows.size(); ++i) ig.terminals.push_back(++next_id);

    ig.nodes.push_back({ig.virtual_root, std::nullopt, {}, true});
    for (NodeId t : ig.terminals) ig.nodes.push_back({t, std::nullopt, {}, true});
    for (const auto& n : acyclic.nodes) {
        INode in{n.id, n.label, {}, false};
        for (const auto& [name, value] : n.properties) in.properties.emplace_back(name, value_string(value));
        ig.nodes.push_back(std::move(in));
    }

    for (NodeId top : acyclic.tops) ig.edges.push_back({ig.virtual_root, top, kTopEdge, {}});

    // ANCHOR edges: one per (node, terminal) pair whose spans overlap; a
    // partial overlap counts. Every anchor must hit at least one token.
    std::map<NodeId, std::vector<std::size_t>> node_rows;
    for (const auto& n : acyclic.nodes) {
        std::set<std::size_t> hit;
        for (const auto& a : n.anchors) {
            bool any = false;
            for (std::size_t i = 0; i < rows.size(); ++i) {
                if (a.from < rows[i].anchor.to && rows[i].anchor.from < a.to) {
                    hit.insert(i);
                    any = true;
                }
            }
            if (!any)
                throw Error("graph " + graph.id + ": anchor [" + std::to_string(a.from) + ", " +
                            std::to_string(a.to) + ") on node " + std::to_string(n.id) +
                            " overlaps no token row");
        }
        node_rows[n.id] = {hit.begin(), hit.end()};
        for (std::size_t i : node_rows[n.id]) ig.edges.push_back({n.id, ig.terminals[i], kAnchorEdge, {}});
    }

    for (const auto& e : acyclic.edges) {
        IEdge ie{e.source, e.target, e.label, {}};
        for (const auto& [name, value] : e.attributes) ie.attributes.emplace_back(name, value_string(value));
        ig.edges.push_back(std::move(ie));
    }

    // Placeholder rewriting on anchored nodes; name-property collapsing first
    // so the individual opN values are still raw when compared to forms.
    for (auto& n : ig.nodes) {
        if (n.is_virtual || node_rows[n.id].empty()) continue;
        auto cc = detail::concats_for(node_rows[n.id], rows);

        if (profile.collapse_name_ops && n.label && *n.label == "name") {
            std::size_t k = 0;
            while (true) {
                std::string want = "op" + std::to_string(k + 1);
                bool found = false;
                for (const auto& [name, value] : n.properties)
                    if (name == want) found = true;
                if (!found) break;
                ++k;
            }
            if (k > 0 && k == node_rows[n.id].size()) {
                std::vector<std::string> forms;
                for (std::size_t i : node_rows[n.id]) forms.push_back(rows[i].form);
                bool match = std::none_of(forms.begin(), forms.end(),
                                          [](const std::string& f) { return f.find(' ') != std::string::npos; });
                for (std::size_t i = 0; match && i < k; ++i) {
                    std::string want = "op" + std::to_string(i + 1);
                    bool ok = false;
                    for (const auto& [name, value] : n.properties)
                        if (name == want && value == forms[i]) ok = true;
                    match = ok;
                }
                if (match) {
                    const char* token = cc.lemma == cc.form ? kLemmaPlaceholder : kFormPlaceholder;
                    std::vector<std::pair<std::string, std::string>> props;
                    bool placed = false;
                    for (auto& [name, value] : n.properties) {
                        if (name.size() > 2 && name.size() <= 12 && name.rfind("op", 0) == 0 &&
                            name.find_first_not_of("0123456789", 2) == std::string::npos) {
                            std::size_t idx = std::stoul(name.substr(2));
                            if (idx >= 1 && idx <= k) {
                                if (!placed) {
                                    props.emplace_back("op", token);
                                    placed = true;
                                }
                                continue;
                            }
                        }
                        props.emplace_back(name, value);
                    }
                    n.properties = std::move(props);
                }
            }
        }

        if (n.label) {
            for (auto [concat, token] : {std::pair<const std::string*, const char*>{&cc.lemma, kLemmaPlaceholder},
                                         {&cc.form, kFormPlaceholder}}) {
                auto sub = detail::substitute_token(*n.label, *concat, token, cc.lemma, cc.form);
                if (sub) {
                    n.label = *sub;
                    break;
                }
            }
        }
        for (auto& [name, value] : n.properties) {
            if (name == "op") continue;  // reserved for collapsed name properties
            if (value.empty()) continue;
            if (value.find(kLemmaPlaceholder) != std::string::npos ||
                value.find(kFormPlaceholder) != std::string::npos)
                continue;
            // whole-value matches only; exactness keeps resolution the inverse
            if (value == cc.lemma)
                value = kLemmaPlaceholder;
            else if (value == cc.form)
                value = kFormPlaceholder;
        }
    }
    return ig;
}

// ---- intermediate representation -> MRP graph ----

struct FromIntermediateOptions {
    // strict: a placeholder on an unanchored node is an error. Lenient mode
    // (used when reading out predicted parses) keeps the token literally.
    bool strict = true;
};

inline Graph from_intermediate(const IGraph& ig, const std::vector<TokenRow>& rows, const std::string& input,
                               FromIntermediateOptions options = {}) {
    if (ig.terminals.size() != rows.size())
        throw Error("graph " + ig.id + ": intermediate representation has " + std::to_string(ig.terminals.size()) +
                    " terminals but " + std::to_string(rows.size()) + " token rows");

    Graph g;
    g.id = ig.id;
    g.framework = ig.framework;
    g.flavor = ig.flavor;
    g.input = input;

    std::map<NodeId, std::size_t> terminal_row;
    for (std::size_t i = 0; i < ig.terminals.size(); ++i) terminal_row[ig.terminals[i]] = i;

    std::map<NodeId, std::vector<std::size_t>> node_rows;
    std::set<NodeId> tops_seen;
    for (const auto& e : ig.edges) {
        if (e.label_or_empty() == kAnchorEdge && terminal_row.count(e.target)) {
            auto& v = node_rows[e.source];
            if (std::find(v.begin(), v.end(), terminal_row[e.target]) == v.end())
                v.push_back(terminal_row[e.target]);
        } else if (e.label_or_empty() == kTopEdge && e.source == ig.virtual_root) {
            if (tops_seen.insert(e.target).second) g.tops.push_back(e.target);
        }
    }
    for (auto& [nid, v] : node_rows) std::sort(v.begin(), v.end());

    auto has_token = [](const std::string& s) {
        return s.find(kLemmaPlaceholder) != std::string::npos || s.find(kFormPlaceholder) != std::string::npos;
    };

    for (const auto& in : ig.nodes) {
        if (in.is_virtual) continue;
        Node n;
        n.id = in.id;
        auto rows_of = node_rows.count(in.id) ? node_rows[in.id] : std::vector<std::size_t>{};
        auto cc = detail::concats_for(rows_of, rows);
        auto resolve = [&](const std::string& s) -> std::string {
            if (!has_token(s)) return s;
            if (rows_of.empty()) {
                if (options.strict)
                    throw Error("graph " + ig.id + ": node " + std::to_string(in.id) +
                                " carries a placeholder but has no ANCHOR edge");
                return s;
            }
            return detail::resolve_tokens(s, cc.lemma, cc.form);
        };
        if (in.label) n.label = resolve(*in.label);
        for (const auto& [name, value] : in.properties) {
            if (name == "op" && (value == kLemmaPlaceholder || value == kFormPlaceholder) && !rows_of.empty()) {
                // expand a collapsed name property back to op1..opK
                std::string concat = value == kLemmaPlaceholder ? cc.lemma : cc.form;
                auto parts = split(concat, ' ');
                for (std::size_t i = 0; i < parts.size(); ++i)
                    n.properties.emplace_back("op" + std::to_string(i + 1), parts[i]);
            } else {
                n.properties.emplace_back(name, Value(resolve(value)));
            }
        }
        for (std::size_t i : rows_of) n.anchors.push_back(rows[i].anchor);
        g.nodes.push_back(std::move(n));
    }

    for (const auto& e : ig.edges) {
        if (e.label_or_empty() == kAnchorEdge && terminal_row.count(e.target)) continue;
        if (e.label_or_empty() == kTopEdge && e.source == ig.virtual_root) continue;
        Edge out;
        out.source = e.source;
        out.target = e.target;
        out.label = e.label;
        for (const auto& [name, value] : e.attributes) out.attributes.emplace_back(name, Value(value));
        g.edges.push_back(std::move(out));
    }
    return g;
}

// ---- invariant checking ----

/// Structural problems of an intermediate graph; empty means all invariants hold.
inline std::vector<std::string> check_igraph(const IGraph& ig) {
    std::vector<std::string> problems;
    std::set<NodeId> ids, terminal_ids(ig.terminals.begin(), ig.terminals.end());
    const INode* root = nullptr;
    for (const auto& n : ig.nodes) {
        if (!ids.insert(n.id).second) problems.push_back("duplicate node id " + std::to_string(n.id));
        if (n.id == ig.virtual_root) root = &n;
        if (n.is_virtual && (n.label || !n.properties.empty()))
            problems.push_back("virtual node " + std::to_string(n.id) + " carries a label or properties");
        if ((n.id == ig.virtual_root || terminal_ids.count(n.id)) && !n.is_virtual)
            problems.push_back("node " + std::to_string(n.id) + " should be flagged virtual");
    }
    if (!root) problems.push_back("virtual root missing from nodes");
    for (NodeId t : ig.terminals)
        if (!ids.count(t)) problems.push_back("terminal " + std::to_string(t) + " missing from nodes");

    std::map<NodeId, std::vector<NodeId>> out;
    for (const auto& e : ig.edges) {
        if (!ids.count(e.source) || !ids.count(e.target)) {
            problems.push_back("edge endpoint missing: " + std::to_string(e.source) + "->" +
                               std::to_string(e.target));
            continue;
        }
        if (e.target == ig.virtual_root) problems.push_back("virtual root has an incoming edge");
        if (e.label_or_empty() == kTopEdge && e.source != ig.virtual_root)
            problems.push_back("TOP edge does not originate at the virtual root");
        if (e.label_or_empty() == kAnchorEdge && !terminal_ids.count(e.target))
            problems.push_back("ANCHOR edge does not end at a terminal");
        if (terminal_ids.count(e.source)) problems.push_back("terminal has an outgoing edge");
        if (terminal_ids.count(e.target) && e.label_or_empty() != kAnchorEdge)
            problems.push_back("non-ANCHOR edge ends at a terminal");
        if (e.label_or_empty() != kTopEdge && e.label_or_empty() != kAnchorEdge)
            out[e.source].push_back(e.target);
    }

    // Kahn over the semantic subgraph.
    std::map<NodeId, int> indeg;
    for (const auto& [s, ts] : out)
        for (NodeId t : ts) ++indeg[t];
    std::vector<NodeId> queue;
    std::size_t seen = 0, semantic = 0;
    std::set<NodeId> in_semantic;
    for (const auto& [s, ts] : out) {
        in_semantic.insert(s);
        for (NodeId t : ts) in_semantic.insert(t);
    }
    semantic = in_semantic.size();
    for (NodeId n : in_semantic)
        if (!indeg.count(n)) queue.push_back(n);
    while (!queue.empty()) {
        NodeId n = queue.back();
        queue.pop_back();
        ++seen;
        for (NodeId t : out[n])
            if (--indeg[t] == 0) queue.push_back(t);
    }
    if (seen != semantic) problems.push_back("semantic subgraph contains a cycle");

    // A placeholder is resolvable only on an anchored node.
    std::set<NodeId> anchored;
    for (const auto& e : ig.edges)
        if (e.label_or_empty() == kAnchorEdge && terminal_ids.count(e.target)) anchored.insert(e.source);
    auto has_token = [](const std::string& s) {
        return s.find(kLemmaPlaceholder) != std::string::npos || s.find(kFormPlaceholder) != std::string::npos;
    };
    for (const auto& n : ig.nodes) {
        bool tokened = (n.label && has_token(*n.label));
        for (const auto& [name, value] : n.properties) tokened = tokened || has_token(value);
        if (tokened && !anchored.count(n.id))
            problems.push_back("node " + std::to_string(n.id) + " carries a placeholder but is not anchored");
    }
    return problems;
}

// ---- irep serialization (JSON lines, one intermediate graph per line) ----

inline Json igraph_to_json(const IGraph& ig) {
    Json j;
    j["id"] = ig.id;
    j["framework"] = ig.framework;
    j["flavor"] = ig.flavor;
    j["virtual-root"] = ig.virtual_root;
    j["terminals"] = ig.terminals;
    j["nodes"] = Json::array();
    for (const auto& n : ig.nodes) {
        Json nj;
        nj["id"] = n.id;
        if (n.label) nj["label"] = *n.label;
        if (!n.properties.empty()) {
            Json names = Json::array(), values = Json::array();
            for (const auto& [name, value] : n.properties) {
                names.push_back(name);
                values.push_back(value);
            }
            nj["properties"] = names;
            nj["values"] = values;
        }
        if (n.is_virtual) nj["virtual"] = true;
        j["nodes"].push_back(std::move(nj));
    }
    j["edges"] = Json::array();
    for (const auto& e : ig.edges) {
        Json ej;
        ej["source"] = e.source;
        ej["target"] = e.target;
        if (e.label) ej["label"] = *e.label;
        if (!e.attributes.empty()) {
            Json names = Json::array(), values = Json::array();
            for (const auto& [name, value] : e.attributes) {
                names.push_back(name);
                values.push_back(value);
            }
            ej["attributes"] = names;
            ej["values"] = values;
        }
        j["edges"].push_back(std::move(ej));
    }
    j["removed-edges"] = Json::array();
    for (const auto& e : ig.removed_cycle_edges) {
        Json ej;
        ej["source"] = e.source;
        ej["target"] = e.target;
        if (e.label) ej["label"] = *e.label;
        j["removed-edges"].push_back(std::move(ej));
    }
    return j;
}

inline IGraph igraph_from_json(const Json& j) {
    IGraph ig;
    ig.id = j.value("id", std::string());
    ig.framework = j.value("framework", std::string());
    ig.flavor = j.value("flavor", 0);
    ig.virtual_root = j.at("virtual-root").get<NodeId>();
    for (const auto& t : j.at("terminals")) ig.terminals.push_back(t.get<NodeId>());
    for (const auto& nj : j.at("nodes")) {
        INode n;
        n.id = nj.at("id").get<NodeId>();
        if (nj.contains("label")) n.label = nj.at("label").get<std::string>();
        if (nj.contains("properties")) {
            const auto& names = nj.at("properties");
            const auto& values = nj.at("values");
            for (std::size_t i = 0; i < names.size(); ++i)
                n.properties.emplace_back(names[i].get<std::string>(), values[i].get<std::string>());
        }
        n.is_virtual = nj.value("virtual", false);
        ig.nodes.push_back(std::move(n));
    }
    for (const auto& ej : j.at("edges")) {
        IEdge e;
        e.source = ej.at("source").get<NodeId>();
        e.target = ej.at("target").get<NodeId>();
        if (ej.contains("label")) e.label = ej.at("label").get<std::string>();
        if (ej.contains("attributes")) {
            const auto& names = ej.at("attributes");
            const auto& values = ej.at("values");
            for (std::size_t i = 0; i < names.size(); ++i)
                e.attributes.emplace_back(names[i].get<std::string>(), values[i].get<std::string>());
        }
        ig.edges.push_back(std::move(e));
    }
    if (j.contains("removed-edges")) {
        for (const auto& ej : j.at("removed-edges")) {
            Edge e;
            e.source = ej.at("source").get<NodeId>();
            e.target = ej.at("target").get<NodeId>();
            if (ej.contains("label")) e.label = ej.at("label").get<std::string>();
            ig.removed_cycle_edges.push_back(std::move(e));
        }
    }
    return ig;
}

}  // namespace mrparse
