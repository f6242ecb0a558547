#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mrparse/irep.hpp"
#include "mrparse/util.hpp"

namespace mrparse {

/// One parser action. Payload semantics by kind: edge label for NODE, CHILD,
/// LEFT-EDGE and RIGHT-EDGE; node label for LABEL; a name=value pair (split
/// at the first '=') for PROPERTY and ATTRIBUTE. The other kinds carry none.
struct Transition {
    enum class Kind { Shift, Reduce, Node, Child, Label, Property, LeftEdge, RightEdge, Attribute, Swap, Finish };

    Kind kind = Kind::Shift;
    std::optional<std::string> payload;

    static bool kind_has_payload(Kind k) {
        switch (k) {
            case Kind::Node:
            case Kind::Child:
            case Kind::Label:
            case Kind::Property:
            case Kind::LeftEdge:
            case Kind::RightEdge:
            case Kind::Attribute:
                return true;
            default:
                return false;
        }
    }

    static const char* kind_name(Kind k) {
        switch (k) {
            case Kind::Shift: return "SHIFT";
            case Kind::Reduce: return "REDUCE";
            case Kind::Node: return "NODE";
            case Kind::Child: return "CHILD";
            case Kind::Label: return "LABEL";
            case Kind::Property: return "PROPERTY";
            case Kind::LeftEdge: return "LEFT-EDGE";
            case Kind::RightEdge: return "RIGHT-EDGE";
            case Kind::Attribute: return "ATTRIBUTE";
            case Kind::Swap: return "SWAP";
            case Kind::Finish: return "FINISH";
        }
        return "?";
    }

    std::string encode() const {
        std::string s = kind_name(kind);
        if (payload) {
            s += '\t';
            s += *payload;
        }
        return s;
    }

    static Transition decode(const std::string& line) {
        auto tab = line.find('\t');
        std::string name = line.substr(0, tab);
        static const Kind all[] = {Kind::Shift,    Kind::Reduce,   Kind::Node,      Kind::Child,
                                   Kind::Label,    Kind::Property, Kind::LeftEdge,  Kind::RightEdge,
                                   Kind::Attribute, Kind::Swap,    Kind::Finish};
        for (Kind k : all) {
            if (name == kind_name(k)) {
                Transition t{k, std::nullopt};
                if (tab != std::string::npos) t.payload = line.substr(tab + 1);
                return t;
            }
        }
        throw Error("unknown transition: " + line);
    }

    bool operator==(const Transition&) const = default;
    bool operator<(const Transition& other) const { return encode() < other.encode(); }

    static Transition shift() { return {Kind::Shift, std::nullopt}; }
    static Transition reduce() { return {Kind::Reduce, std::nullopt}; }
    static Transition node(std::string label) { return {Kind::Node, std::move(label)}; }
    static Transition child(std::string label) { return {Kind::Child, std::move(label)}; }
    static Transition label(std::string value) { return {Kind::Label, std::move(value)}; }
    static Transition property(const std::string& name, const std::string& value) {
        return {Kind::Property, name + "=" + value};
    }
    static Transition left_edge(std::string label) { return {Kind::LeftEdge, std::move(label)}; }
    static Transition right_edge(std::string label) { return {Kind::RightEdge, std::move(label)}; }
    static Transition attribute(const std::string& name, const std::string& value) {
        return {Kind::Attribute, name + "=" + value};
    }
    static Transition swap() { return {Kind::Swap, std::nullopt}; }
    static Transition finish() { return {Kind::Finish, std::nullopt}; }
};

// name=value payload, split at the first '='; the value may contain '='.
inline std::pair<std::string, std::string> split_pair_payload(const std::string& payload) {
    auto eq = payload.find('=');
    if (eq == std::string::npos || eq == 0) throw Error("payload must be name=value: " + payload);
    return {payload.substr(0, eq), payload.substr(eq + 1)};
}

using NodeRef = int;  // index into ParserState::nodes; doubles as the creation index i(x)

struct StateNode {
    std::optional<std::string> label;
    std::vector<std::pair<std::string, std::string>> properties;
    bool is_root = false;
    bool is_terminal = false;
    int row = -1;  // token row for terminals

    void set_property(const std::string& name, const std::string& value) {
        for (auto& [n, v] : properties)
            if (n == name) {
                v = value;
                return;
            }
        properties.emplace_back(name, value);
    }
};

struct StateEdge {
    NodeRef source = 0;
    NodeRef target = 0;
    std::string label;
    std::vector<std::pair<std::string, std::string>> attributes;

    void set_attribute(const std::string& name, const std::string& value) {
        for (auto& [n, v] : attributes)
            if (n == name) {
                v = value;
                return;
            }
        attributes.emplace_back(name, value);
    }
};

/// Parser configuration: a stack of nodes being processed (top at the back),
/// a buffer of nodes to be processed (head at the front), and the graph built
/// so far as an ordered edge log (latest edge at the back).
struct ParserState {
    std::vector<StateNode> nodes;  // creation order; NodeRef indexes here
    std::vector<StateEdge> edges;
    std::vector<NodeRef> stack;
    std::vector<NodeRef> buffer;
    std::vector<Transition> history;
    std::vector<NodeRef> terminals;
    NodeRef root = 0;
    bool finished = false;

    NodeRef top() const { return stack.back(); }
    NodeRef second() const { return stack[stack.size() - 2]; }
    bool is_terminal_node(NodeRef r) const { return nodes[static_cast<std::size_t>(r)].is_terminal; }
    bool is_root_node(NodeRef r) const { return r == root; }

    // Directed reachability over the edges built so far. Virtual attachments
    // cannot participate: the root never has incoming edges and terminals
    // never have outgoing ones.
    bool has_path(NodeRef from, NodeRef to) const {
        if (from == to) return true;
        std::vector<bool> seen(nodes.size(), false);
        std::vector<NodeRef> queue{from};
        seen[static_cast<std::size_t>(from)] = true;
        while (!queue.empty()) {
            NodeRef n = queue.back();
            queue.pop_back();
            for (const auto& e : edges) {
                if (e.source != n || seen[static_cast<std::size_t>(e.target)]) continue;
                if (e.target == to) return true;
                seen[static_cast<std::size_t>(e.target)] = true;
                queue.push_back(e.target);
            }
        }
        return false;
    }
};

/// Start state: the root alone on the stack, one terminal per token row in
/// the buffer. Creation indices run root = 0, then the terminals in order.
inline ParserState initial_state(const std::vector<int>& token_rows) {
    ParserState s;
    s.nodes.push_back({std::nullopt, {}, true, false, -1});
    s.root = 0;
    s.stack.push_back(s.root);
    std::set<int> seen;
    for (int row : token_rows) {
        if (!seen.insert(row).second) throw Error("duplicate terminal ref: " + std::to_string(row));
        NodeRef r = static_cast<NodeRef>(s.nodes.size());
        s.nodes.push_back({std::nullopt, {}, false, true, row});
        s.terminals.push_back(r);
        s.buffer.push_back(r);
    }
    return s;
}

inline ParserState initial_state(std::size_t token_count) {
    std::vector<int> rows(token_count);
    for (std::size_t i = 0; i < token_count; ++i) rows[i] = static_cast<int>(i);
    return initial_state(rows);
}

struct Legality {
    bool ok = true;
    std::string reason;
    explicit operator bool() const { return ok; }
};

inline Legality is_legal(const ParserState& s, const Transition& t) {
    using K = Transition::Kind;
    auto no = [](std::string reason) { return Legality{false, std::move(reason)}; };

    if (s.finished) return no("terminal state");
    if (Transition::kind_has_payload(t.kind) != t.payload.has_value())
        return no(t.payload ? "unexpected payload" : "payload required");
    if (t.kind == K::Property || t.kind == K::Attribute) {
        auto eq = t.payload->find('=');
        if (eq == std::string::npos || eq == 0) return no("payload must be name=value");
    }

    switch (t.kind) {
        case K::Shift:
            if (s.buffer.empty()) return no("empty buffer");
            return {};
        case K::Reduce:
            if (s.stack.empty()) return no("empty stack");
            return {};
        case K::Node:
            if (s.stack.empty()) return no("empty stack");
            if (s.is_root_node(s.top())) return no("stack top is the root");
            return {};
        case K::Child:
            if (s.stack.empty()) return no("empty stack");
            if (s.is_terminal_node(s.top())) return no("stack top is a terminal");
            return {};
        case K::Label:
            if (s.stack.empty()) return no("empty stack");
            if (s.is_root_node(s.top())) return no("stack top is the root");
            if (s.is_terminal_node(s.top())) return no("stack top is a terminal");
            if (s.nodes[static_cast<std::size_t>(s.top())].label) return no("node already labeled");
            return {};
        case K::Property:
            if (s.stack.empty()) return no("empty stack");
            if (s.is_root_node(s.top())) return no("stack top is the root");
            if (s.is_terminal_node(s.top())) return no("stack top is a terminal");
            return {};
        case K::LeftEdge: {
            if (s.stack.size() < 2) return no("need two stack items");
            NodeRef x = s.top(), y = s.second();
            if (s.is_terminal_node(x)) return no("stack top is a terminal");
            if (s.is_root_node(y)) return no("edge target is the root");
            if (s.has_path(y, x)) return no("would create a cycle");
            return {};
        }
        case K::RightEdge: {
            if (s.stack.size() < 2) return no("need two stack items");
            NodeRef x = s.second(), y = s.top();
            if (s.is_terminal_node(x)) return no("second stack item is a terminal");
            if (s.is_root_node(y)) return no("edge target is the root");
            if (s.has_path(y, x)) return no("would create a cycle");
            return {};
        }
        case K::Attribute: {
            if (s.edges.empty()) return no("no edges yet");
            const StateEdge& latest = s.edges.back();
            if (s.is_root_node(latest.source)) return no("latest edge leaves the root");
            if (s.is_terminal_node(latest.target)) return no("latest edge enters a terminal");
            return {};
        }
        case K::Swap: {
            if (s.stack.size() < 2) return no("need two stack items");
            if (s.second() >= s.top()) return no("swap index order");
            return {};
        }
        case K::Finish:
            if (s.stack.size() != 1 || !s.is_root_node(s.top())) return no("stack is not [root]");
            if (!s.buffer.empty()) return no("buffer not empty");
            return {};
    }
    return no("unknown transition kind");
}

/// Apply one transition, returning the successor state. Throws on an illegal
/// transition, carrying is_legal's reason.
inline ParserState apply(const ParserState& state, const Transition& t) {
    using K = Transition::Kind;
    if (Legality l = is_legal(state, t); !l)
        throw Error(std::string("illegal ") + Transition::kind_name(t.kind) + ": " + l.reason);

    ParserState s = state;
    switch (t.kind) {
        case K::Shift:
            s.stack.push_back(s.buffer.front());
            s.buffer.erase(s.buffer.begin());
            break;
        case K::Reduce:
            s.stack.pop_back();
            break;
        case K::Node: {
            NodeRef y = static_cast<NodeRef>(s.nodes.size());
            s.nodes.push_back({});
            s.buffer.insert(s.buffer.begin(), y);
            s.edges.push_back({y, s.top(), *t.payload, {}});
            break;
        }
        case K::Child: {
            NodeRef y = static_cast<NodeRef>(s.nodes.size());
            s.nodes.push_back({});
            s.buffer.insert(s.buffer.begin(), y);
            s.edges.push_back({s.top(), y, *t.payload, {}});
            break;
        }
        case K::Label:
            s.nodes[static_cast<std::size_t>(s.top())].label = *t.payload;
            break;
        case K::Property: {
            auto [name, value] = split_pair_payload(*t.payload);
            s.nodes[static_cast<std::size_t>(s.top())].set_property(name, value);
            break;
        }
        case K::LeftEdge:
            s.edges.push_back({s.top(), s.second(), *t.payload, {}});
            break;
        case K::RightEdge:
            s.edges.push_back({s.second(), s.top(), *t.payload, {}});
            break;
        case K::Attribute: {
            auto [name, value] = split_pair_payload(*t.payload);
            s.edges.back().set_attribute(name, value);
            break;
        }
        case K::Swap: {
            NodeRef x = s.second();
            s.stack.erase(s.stack.end() - 2);
            s.buffer.insert(s.buffer.begin(), x);
            break;
        }
        case K::Finish:
            s.finished = true;
            s.stack.clear();
            s.buffer.clear();
            break;
    }
    s.history.push_back(t);
    return s;
}

inline bool is_terminal(const ParserState& s) { return s.finished; }

/// Read the finished state out as an intermediate graph. Node ids are the
/// creation indices; the root and the token nodes are marked virtual.
inline IGraph extract_igraph(const ParserState& s) {
    if (!s.finished) throw Error("extract_igraph: parser state is not terminal");
    IGraph ig;
    ig.virtual_root = s.root;
    for (NodeRef t : s.terminals) ig.terminals.push_back(t);
    for (std::size_t i = 0; i < s.nodes.size(); ++i) {
        const StateNode& n = s.nodes[i];
        ig.nodes.push_back({static_cast<NodeId>(i), n.label, n.properties, n.is_root || n.is_terminal});
    }
    for (const auto& e : s.edges)
        ig.edges.push_back({e.source, e.target, e.label, e.attributes});
    return ig;
}

}  // namespace mrparse
