#pragma once

#include <set>
#include <string>
#include <vector>

#include "mrparse/profile.hpp"
#include "mrparse/transitions.hpp"

namespace mrparse {

namespace detail {

inline int top_edge_count(const ParserState& s) {
    int n = 0;
    for (const auto& e : s.edges)
        if (e.source == s.root && e.label == kTopEdge) ++n;
    return n;
}

inline bool state_has_edge(const ParserState& s, NodeRef src, NodeRef tgt, const std::string& label) {
    for (const auto& e : s.edges)
        if (e.source == src && e.target == tgt && e.label == label) return true;
    return false;
}

// Profile rules for creating an edge (src, tgt) labeled `label`. Keeps the
// built graph shaped like a well-formed intermediate representation: TOP only
// out of the root, ANCHOR only into terminals, semantic edges elsewhere.
inline bool edge_allowed(const ParserState& s, const FrameworkProfile& p, NodeRef src, NodeRef tgt,
                         const std::string& label, bool tgt_is_new) {
    bool src_root = s.is_root_node(src);
    bool tgt_terminal = !tgt_is_new && s.is_terminal_node(tgt);
    if (label == kTopEdge)
        return src_root && !tgt_terminal && detail::top_edge_count(s) < p.max_tops;
    if (label == kAnchorEdge) return p.allows_anchors && tgt_terminal && !src_root;
    if (src_root || tgt_terminal) return false;
    if (!p.allows_multigraph && !tgt_is_new && state_has_edge(s, src, tgt, label)) return false;
    return true;
}

}  // namespace detail

/// Whether a concrete transition passes both the legality preconditions and
/// the framework profile. The extra profile rules are what keeps a parse
/// valid for the framework: payload-class gating (labels, properties,
/// attributes), virtual-edge shape, the multigraph rule, and two termination
/// guards (the root is never reduced, and a framework with required node
/// labels may not reduce an unlabeled node).
inline Legality mask_allows(const ParserState& s, const FrameworkProfile& p, const Transition& t) {
    using K = Transition::Kind;
    Legality legal = is_legal(s, t);
    if (!legal) return legal;
    auto no = [](std::string reason) { return Legality{false, std::move(reason)}; };

    switch (t.kind) {
        case K::Label:
            if (!p.allows_node_labels) return no("profile forbids node labels");
            break;
        case K::Property:
            if (!p.allows_node_properties) return no("profile forbids node properties");
            break;
        case K::Attribute:
            if (!p.allows_edge_attributes) return no("profile forbids edge attributes");
            break;
        case K::Reduce: {
            if (s.is_root_node(s.top())) return no("cannot reduce the root");
            const StateNode& n = s.nodes[static_cast<std::size_t>(s.top())];
            if (p.required_node_labels && !n.is_terminal && !n.label)
                return no("profile requires a node label before reduce");
            break;
        }
        case K::Swap:
            if (s.is_root_node(s.second())) return no("cannot swap out the root");
            break;
        case K::Node:
            if (!detail::edge_allowed(s, p, -1, s.top(), *t.payload, false)) {
                // source is the new node, so TOP can never be created this way
                if (*t.payload == kTopEdge) return no("TOP edge must leave the root");
                if (*t.payload == kAnchorEdge) return no("ANCHOR edge must enter an anchored terminal");
                return no("semantic edge may not enter a terminal");
            }
            break;
        case K::Child:
            if (!detail::edge_allowed(s, p, s.top(), -1, *t.payload, true)) {
                if (*t.payload == kTopEdge) return no("TOP edge not allowed here");
                if (*t.payload == kAnchorEdge) return no("ANCHOR edge must enter a terminal");
                return no("semantic edge may not leave the root");
            }
            break;
        case K::LeftEdge:
            if (!detail::edge_allowed(s, p, s.top(), s.second(), *t.payload, false))
                return no("edge violates the profile");
            break;
        case K::RightEdge:
            if (!detail::edge_allowed(s, p, s.second(), s.top(), *t.payload, false))
                return no("edge violates the profile");
            break;
        default:
            break;
    }
    return {};
}

/// Kinds (with payload classes) available in a state under a profile. For
/// payload-free kinds presence means the transition itself is allowed; for
/// edge kinds it means at least one label from the vocabulary is allowed, and
/// for LABEL / PROPERTY / ATTRIBUTE that the payload classifier may be asked
/// for a value.
enum class PayloadClass { None, EdgeLabel, NodeLabel, PropertyPair, AttributePair };

struct MaskEntry {
    Transition::Kind kind;
    PayloadClass payload;
    bool operator<(const MaskEntry& o) const { return kind < o.kind; }
    bool operator==(const MaskEntry&) const = default;
};

/// Enumerate the concrete transition classes the classifier may choose from:
/// payload-free kinds as themselves, edge kinds once per allowed vocabulary
/// label, LABEL / PROPERTY / ATTRIBUTE as bare kinds (their payload is chosen
/// by the payload classifier over the profile vocabulary).
inline std::vector<Transition> masked_transition_classes(const ParserState& s, const FrameworkProfile& p) {
    using K = Transition::Kind;
    std::vector<Transition> out;
    for (K k : {K::Shift, K::Reduce, K::Swap, K::Finish}) {
        Transition t{k, std::nullopt};
        if (mask_allows(s, p, t)) out.push_back(t);
    }
    // representative payloads only probe legality; real values come from the
    // payload classifiers
    if (!p.node_labels.empty() && mask_allows(s, p, Transition::label(*p.node_labels.begin())))
        out.push_back({K::Label, std::string()});
    if (!p.properties.empty() && mask_allows(s, p, {K::Property, *p.properties.begin()}))
        out.push_back({K::Property, std::string()});
    if (!p.attributes.empty() && mask_allows(s, p, {K::Attribute, *p.attributes.begin()}))
        out.push_back({K::Attribute, std::string()});
    for (K k : {K::Node, K::Child, K::LeftEdge, K::RightEdge})
        for (const auto& label : p.edge_labels) {
            Transition t{k, label};
            if (mask_allows(s, p, t)) out.push_back(t);
        }
    return out;
}

inline std::set<MaskEntry> transition_mask(const ParserState& s, const FrameworkProfile& p) {
    using K = Transition::Kind;
    std::set<MaskEntry> mask;
    for (const auto& t : masked_transition_classes(s, p)) {
        PayloadClass pc = PayloadClass::None;
        if (t.kind == K::Node || t.kind == K::Child || t.kind == K::LeftEdge || t.kind == K::RightEdge)
            pc = PayloadClass::EdgeLabel;
        else if (t.kind == K::Label)
            pc = PayloadClass::NodeLabel;
        else if (t.kind == K::Property)
            pc = PayloadClass::PropertyPair;
        else if (t.kind == K::Attribute)
            pc = PayloadClass::AttributePair;
        mask.insert({t.kind, pc});
    }
    return mask;
}

/// Dead-end escape when the mask comes back empty: reduce a non-root stack
/// top, else shift, else finish.
inline Transition recovery_transition(const ParserState& s) {
    if (!s.stack.empty() && !s.is_root_node(s.top())) return Transition::reduce();
    if (!s.buffer.empty()) return Transition::shift();
    if (is_legal(s, Transition::finish())) return Transition::finish();
    throw Error("no recovery transition available");
}

}  // namespace mrparse
