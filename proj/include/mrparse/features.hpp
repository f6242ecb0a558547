#pragma once

#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "mrparse/companion.hpp"
#include "mrparse/transitions.hpp"

namespace mrparse {

// Bump when the template set below changes; stored in trained models so a
// model is never scored against features it was not trained on.
inline constexpr const char* kFeatureRegistryVersion = "fr1";

/// Sparse categorical (template, value) pairs plus dense numeric features.
struct FeatureVector {
    std::vector<std::pair<std::string, std::string>> categorical;
    std::vector<std::pair<std::string, double>> numeric;
};

/// Descend from a node along the alphabetically-first outgoing edge label
/// (ties by target creation index) until a terminal is reached; empty when
/// the walk ends in a non-terminal sink.
inline std::optional<NodeRef> head_terminal(NodeRef node, const ParserState& s) {
    NodeRef cur = node;
    std::set<NodeRef> visited;
    while (!s.nodes[static_cast<std::size_t>(cur)].is_terminal) {
        if (!visited.insert(cur).second) return std::nullopt;
        std::optional<std::size_t> best;
        for (std::size_t i = 0; i < s.edges.size(); ++i) {
            const auto& e = s.edges[i];
            if (e.source != cur) continue;
            if (!best) {
                best = i;
                continue;
            }
            const auto& b = s.edges[*best];
            if (std::tuple(e.label, e.target) < std::tuple(b.label, b.target)) best = i;
        }
        if (!best) return std::nullopt;
        cur = s.edges[*best].target;
    }
    return cur;
}

namespace detail {

// Terminal rows in a node's yield (all terminals reachable from it).
inline std::vector<int> yield_rows(NodeRef node, const ParserState& s) {
    std::set<int> rows;
    std::vector<NodeRef> queue{node};
    std::set<NodeRef> seen{node};
    while (!queue.empty()) {
        NodeRef cur = queue.back();
        queue.pop_back();
        const auto& n = s.nodes[static_cast<std::size_t>(cur)];
        if (n.is_terminal) rows.insert(n.row);
        for (const auto& e : s.edges)
            if (e.source == cur && seen.insert(e.target).second) queue.push_back(e.target);
    }
    return {rows.begin(), rows.end()};
}

// none / single / multiple discontinuities in the yield's row sequence.
inline std::string gap_type(NodeRef node, const ParserState& s) {
    auto rows = yield_rows(node, s);
    int gaps = 0;
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (rows[i] != rows[i - 1] + 1) ++gaps;
    return gaps == 0 ? "none" : gaps == 1 ? "single" : "multiple";
}

inline int node_height(NodeRef node, const ParserState& s, std::map<NodeRef, int>& memo) {
    auto it = memo.find(node);
    if (it != memo.end()) return it->second;
    memo[node] = 0;  // breaks ties on shared structure; graph is acyclic
    int h = 0;
    for (const auto& e : s.edges)
        if (e.source == node) h = std::max(h, 1 + node_height(e.target, s, memo));
    memo[node] = h;
    return h;
}

inline bool all_punct(const std::string& form) {
    if (form.empty()) return false;
    for (char c : form)
        if (std::isalnum(static_cast<unsigned char>(c))) return false;
    return true;
}

}  // namespace detail

/// State features for the transition classifier: for the top three stack and
/// first three buffer nodes, the head terminal's lemma/UPOS/XPOS, punctuation
/// flag, gap type, the node's own label / property count / adjacent edge
/// labels, plus height / parent / child counts; the last three actions, the
/// latest edge label, the terminal-to-node ratio of the graph, and an
/// optional framework identity for multitask training.
inline FeatureVector extract_features(const ParserState& s, const std::vector<TokenRow>& rows,
                                      const std::string& framework_feature = std::string()) {
    FeatureVector fv;
    auto cat = [&](std::string tmpl, std::string value) {
        fv.categorical.emplace_back(std::move(tmpl), std::move(value));
    };
    auto num = [&](std::string name, double v) { fv.numeric.emplace_back(std::move(name), v); };

    std::map<NodeRef, int> height_memo;
    auto window_node = [&](const std::string& prefix, std::optional<NodeRef> ref) {
        if (!ref) {
            for (const char* f : {"lemma", "upos", "xpos", "punct", "gap", "label", "nprops", "inlab", "outlab"})
                cat(prefix + "." + f, "none");
            num(prefix + ".height", 0);
            num(prefix + ".parents", 0);
            num(prefix + ".children", 0);
            return;
        }
        NodeRef r = *ref;
        const StateNode& n = s.nodes[static_cast<std::size_t>(r)];
        auto head = head_terminal(r, s);
        if (head && s.nodes[static_cast<std::size_t>(*head)].row >= 0 &&
            s.nodes[static_cast<std::size_t>(*head)].row < static_cast<int>(rows.size())) {
            const TokenRow& row = rows[static_cast<std::size_t>(s.nodes[static_cast<std::size_t>(*head)].row)];
            cat(prefix + ".lemma", row.lemma);
            cat(prefix + ".upos", row.upos);
            cat(prefix + ".xpos", row.xpos);
            cat(prefix + ".punct", (row.upos == "PUNCT" || detail::all_punct(row.form)) ? "1" : "0");
        } else {
            for (const char* f : {"lemma", "upos", "xpos", "punct"}) cat(prefix + "." + f, "none");
        }
        cat(prefix + ".gap", detail::gap_type(r, s));
        cat(prefix + ".label", n.label ? *n.label : "none");
        cat(prefix + ".nprops", std::to_string(n.properties.size()));
        std::string inlab = "none", outlab = "none";
        for (const auto& e : s.edges) {  // latest wins: edge log is ordered
            if (e.target == r) inlab = e.label;
            if (e.source == r) outlab = e.label;
        }
        cat(prefix + ".inlab", inlab);
        cat(prefix + ".outlab", outlab);
        int parents = 0, children = 0;
        for (const auto& e : s.edges) {
            parents += e.target == r;
            children += e.source == r;
        }
        num(prefix + ".height", detail::node_height(r, s, height_memo));
        num(prefix + ".parents", parents);
        num(prefix + ".children", children);
    };

    for (int i = 0; i < 3; ++i) {
        std::optional<NodeRef> ref;
        if (i < static_cast<int>(s.stack.size())) ref = s.stack[s.stack.size() - 1 - static_cast<std::size_t>(i)];
        window_node("s" + std::to_string(i), ref);
    }
    for (int i = 0; i < 3; ++i) {
        std::optional<NodeRef> ref;
        if (i < static_cast<int>(s.buffer.size())) ref = s.buffer[static_cast<std::size_t>(i)];
        window_node("b" + std::to_string(i), ref);
    }

    for (int i = 1; i <= 3; ++i) {
        std::string kind = "none", full = "none";
        if (i <= static_cast<int>(s.history.size())) {
            const Transition& t = s.history[s.history.size() - static_cast<std::size_t>(i)];
            kind = Transition::kind_name(t.kind);
            full = t.encode();
        }
        cat("a" + std::to_string(i), kind);
        cat("a" + std::to_string(i) + ".full", full);
    }
    cat("e0.label", s.edges.empty() ? "none" : s.edges.back().label);
    if (!framework_feature.empty()) cat("framework", framework_feature);

    num("ratio.terminals", s.nodes.empty() ? 0.0
                                           : static_cast<double>(s.terminals.size()) /
                                                 static_cast<double>(s.nodes.size()));
    // counts scaled down so they do not dominate the update norm
    num("stack.size", 0.1 * static_cast<double>(s.stack.size()));
    num("buffer.size", 0.1 * static_cast<double>(s.buffer.size()));
    num("graph.nodes", 0.1 * static_cast<double>(s.nodes.size()));
    num("graph.edges", 0.1 * static_cast<double>(s.edges.size()));
    num("bias", 1.0);
    return fv;
}

}  // namespace mrparse
