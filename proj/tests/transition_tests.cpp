#include "test_support.hpp"

#include "mrparse/transitions.hpp"

using namespace ts;
using K = Transition::Kind;

namespace {

// [root, t0, t1, t2] in the buffer.
ParserState three_tokens() { return initial_state(std::size_t(3)); }

// Stack [root, n] where n is a freshly created non-terminal (built by
// shifting t0, creating a parent from it, reducing t0 and shifting n).
ParserState nonterminal_on_top() {
    ParserState s = three_tokens();
    s = apply(s, Transition::shift());
    s = apply(s, Transition::node("ANCHOR"));
    s = apply(s, Transition::reduce());
    s = apply(s, Transition::shift());
    return s;
}

}  // namespace

// ---- the eleven table rows ----

TEST_CASE("table row: SHIFT moves the buffer head onto the stack") {
    ParserState before = three_tokens();
    ParserState after = apply(before, Transition::shift());
    CHECK(after.stack.size() == 2);
    CHECK(after.stack.back() == before.buffer.front());
    CHECK(after.buffer.size() == 2);
    CHECK(after.nodes.size() == before.nodes.size());
    CHECK(after.edges.empty());
}

TEST_CASE("table row: REDUCE pops the stack") {
    ParserState before = apply(three_tokens(), Transition::shift());
    ParserState after = apply(before, Transition::reduce());
    CHECK(after.stack.size() == 1);
    CHECK(after.buffer == before.buffer);
    CHECK(after.nodes.size() == before.nodes.size());
}

TEST_CASE("table row: NODE creates a parent at the buffer head") {
    ParserState before = apply(three_tokens(), Transition::shift());
    NodeRef x = before.top();
    ParserState after = apply(before, Transition::node("time"));
    NodeRef y = static_cast<NodeRef>(before.nodes.size());
    CHECK(after.nodes.size() == before.nodes.size() + 1);
    CHECK(after.buffer.front() == y);
    CHECK(after.stack == before.stack);
    REQUIRE(after.edges.size() == 1);
    CHECK(after.edges.back().source == y);
    CHECK(after.edges.back().target == x);
    CHECK(after.edges.back().label == "time");
    CHECK_FALSE(after.nodes[static_cast<std::size_t>(y)].label.has_value());
}

TEST_CASE("table row: CHILD creates a child at the buffer head") {
    ParserState before = nonterminal_on_top();
    NodeRef x = before.top();
    ParserState after = apply(before, Transition::child("op1"));
    NodeRef y = static_cast<NodeRef>(before.nodes.size());
    CHECK(after.buffer.front() == y);
    REQUIRE(!after.edges.empty());
    CHECK(after.edges.back().source == x);
    CHECK(after.edges.back().target == y);
    CHECK(after.edges.back().label == "op1");
}

TEST_CASE("table row: LABEL labels the stack top") {
    ParserState before = nonterminal_on_top();
    ParserState after = apply(before, Transition::label("after"));
    CHECK(after.nodes[static_cast<std::size_t>(after.top())].label == "after");
    CHECK(after.stack == before.stack);
    CHECK(after.buffer == before.buffer);
    CHECK(after.edges.size() == before.edges.size());
}

TEST_CASE("table row: PROPERTY adds a property to the stack top") {
    ParserState before = nonterminal_on_top();
    ParserState after = apply(before, Transition::property("frame", "v-1"));
    const auto& props = after.nodes[static_cast<std::size_t>(after.top())].properties;
    REQUIRE(props.size() == 1);
    CHECK(props[0] == std::pair<std::string, std::string>{"frame", "v-1"});
}

TEST_CASE("table row: LEFT-EDGE points from the top to the second") {
    ParserState s = nonterminal_on_top();     // [root, n]
    s = apply(s, Transition::shift());        // [root, n, t1]
    s = apply(s, Transition::node("ANCHOR"));  // creates m over t1
    s = apply(s, Transition::reduce());       // [root, n]
    s = apply(s, Transition::shift());        // [root, n, m]
    NodeRef y = s.second(), x = s.top();
    ParserState after = apply(s, Transition::left_edge("ARG0"));
    CHECK(after.edges.back().source == x);
    CHECK(after.edges.back().target == y);
    CHECK(after.edges.back().label == "ARG0");
    CHECK(after.stack == s.stack);
    CHECK(after.buffer == s.buffer);
}

TEST_CASE("table row: RIGHT-EDGE points from the second to the top") {
    ParserState s = nonterminal_on_top();
    s = apply(s, Transition::shift());
    s = apply(s, Transition::node("ANCHOR"));
    s = apply(s, Transition::reduce());
    s = apply(s, Transition::shift());  // [root, n, m]
    NodeRef x = s.second(), y = s.top();
    ParserState after = apply(s, Transition::right_edge("ARG1"));
    CHECK(after.edges.back().source == x);
    CHECK(after.edges.back().target == y);
    CHECK(after.edges.back().label == "ARG1");
}

TEST_CASE("table row: ATTRIBUTE decorates the latest edge") {
    ParserState s = nonterminal_on_top();
    s = apply(s, Transition::shift());
    s = apply(s, Transition::node("ANCHOR"));
    s = apply(s, Transition::reduce());
    s = apply(s, Transition::shift());
    s = apply(s, Transition::left_edge("A"));
    ParserState after = apply(s, Transition::attribute("remote", "true"));
    REQUIRE(!after.edges.empty());
    const StateEdge& e = after.edges.back();
    REQUIRE(e.attributes.size() == 1);
    CHECK(e.attributes[0] == std::pair<std::string, std::string>{"remote", "true"});
    CHECK(e.label == "A");
}

TEST_CASE("table row: SWAP sends the second to the buffer head and keeps the top") {
    ParserState s = three_tokens();
    s = apply(s, Transition::shift());
    s = apply(s, Transition::shift());  // [root, t0, t1]
    NodeRef x = s.second(), y = s.top();
    ParserState after = apply(s, Transition::swap());
    REQUIRE(after.stack.size() == 2);
    CHECK(after.stack.back() == y);
    CHECK(after.buffer.front() == x);
    CHECK(after.buffer.size() == s.buffer.size() + 1);
}

TEST_CASE("table row: FINISH empties the configuration and is terminal") {
    ParserState s = initial_state(std::size_t(0));
    CHECK_FALSE(is_terminal(s));
    ParserState after = apply(s, Transition::finish());
    CHECK(is_terminal(after));
    CHECK(after.stack.empty());
    CHECK(after.buffer.empty());
    CHECK_THROWS_AS(apply(after, Transition::shift()), Error);
}

// ---- caption preconditions ----

TEST_CASE("SHIFT needs a nonempty buffer") {
    ParserState s = initial_state(std::size_t(0));
    Legality l = is_legal(s, Transition::shift());
    CHECK_FALSE(l.ok);
    CHECK(l.reason == "empty buffer");
}

TEST_CASE("SWAP requires ascending creation indices") {
    ParserState s = three_tokens();
    s = apply(s, Transition::shift());
    s = apply(s, Transition::shift());
    s = apply(s, Transition::swap());   // [root, t1], buffer [t0, t2]
    s = apply(s, Transition::shift());  // [root, t1, t0]: i(second) > i(top)
    Legality l = is_legal(s, Transition::swap());
    CHECK_FALSE(l.ok);
    CHECK(l.reason == "swap index order");
}

TEST_CASE("edges that would close a directed path are illegal") {
    ParserState s = nonterminal_on_top();  // n over t0 via ANCHOR... [root, n]
    s = apply(s, Transition::shift());
    s = apply(s, Transition::node("ANCHOR"));
    s = apply(s, Transition::reduce());
    s = apply(s, Transition::shift());            // [root, n, m]
    s = apply(s, Transition::right_edge("rel"));  // n -> m
    Legality l = is_legal(s, Transition::left_edge("back"));  // would add m -> n
    CHECK_FALSE(l.ok);
    CHECK(l.reason == "would create a cycle");
    // the reverse direction stays legal: a parallel n -> m edge
    CHECK(is_legal(s, Transition::right_edge("other")).ok);
}

TEST_CASE("NODE may not create a parent over the root") {
    ParserState s = three_tokens();  // stack [root]
    Legality l = is_legal(s, Transition::node("X"));
    CHECK_FALSE(l.ok);
    CHECK(l.reason == "stack top is the root");
}

TEST_CASE("CHILD may not create a child under a token") {
    ParserState s = apply(three_tokens(), Transition::shift());
    Legality l = is_legal(s, Transition::child("X"));
    CHECK_FALSE(l.ok);
    CHECK(l.reason == "stack top is a terminal");
}

TEST_CASE("LABEL is barred from the root, tokens and relabeling") {
    ParserState s = three_tokens();
    CHECK(is_legal(s, Transition::label("x")).reason == "stack top is the root");
    s = apply(s, Transition::shift());
    CHECK(is_legal(s, Transition::label("x")).reason == "stack top is a terminal");
    ParserState n = nonterminal_on_top();
    n = apply(n, Transition::label("first"));
    CHECK(is_legal(n, Transition::label("second")).reason == "node already labeled");
}

TEST_CASE("PROPERTY is barred from the root and tokens") {
    ParserState s = three_tokens();
    CHECK(is_legal(s, Transition::property("a", "b")).reason == "stack top is the root");
    s = apply(s, Transition::shift());
    CHECK(is_legal(s, Transition::property("a", "b")).reason == "stack top is a terminal");
}

TEST_CASE("edge transitions need two stack items and a non-root target") {
    ParserState s = three_tokens();  // stack is [root] alone
    CHECK(is_legal(s, Transition::left_edge("x")).reason == "need two stack items");
    ParserState n = nonterminal_on_top();  // [root, n]: second is the root
    CHECK(is_legal(n, Transition::left_edge("x")).reason == "edge target is the root");
    // and a terminal can never be an edge source
    ParserState t = three_tokens();
    t = apply(t, Transition::shift());
    t = apply(t, Transition::shift());  // [root, t0, t1]
    CHECK(is_legal(t, Transition::left_edge("x")).reason == "stack top is a terminal");
    CHECK(is_legal(t, Transition::right_edge("x")).reason == "second stack item is a terminal");
}

TEST_CASE("ATTRIBUTE needs a latest edge with a non-root source and non-token target") {
    ParserState s = three_tokens();
    CHECK(is_legal(s, Transition::attribute("a", "b")).reason == "no edges yet");
    ParserState t = apply(s, Transition::shift());
    t = apply(t, Transition::node("ANCHOR"));  // latest edge enters t0
    CHECK(is_legal(t, Transition::attribute("a", "b")).reason == "latest edge enters a terminal");
}

TEST_CASE("FINISH needs the stack to be exactly the root and an empty buffer") {
    ParserState s = three_tokens();
    CHECK(is_legal(s, Transition::finish()).reason == "buffer not empty");
    ParserState t = apply(s, Transition::shift());
    CHECK(is_legal(t, Transition::finish()).reason == "stack is not [root]");
}

TEST_CASE("payload presence must match the transition kind") {
    ParserState s = three_tokens();
    CHECK(is_legal(s, Transition{K::Shift, std::string("x")}).reason == "unexpected payload");
    CHECK(is_legal(s, Transition{K::Node, std::nullopt}).reason == "payload required");
    CHECK(is_legal(apply(s, Transition::shift()), Transition{K::Property, std::string("novalue")}).reason ==
          "payload must be name=value");
}

// ---- state mechanics ----

TEST_CASE("initial_state with no tokens holds only the root") {
    ParserState s = initial_state(std::size_t(0));
    REQUIRE(s.stack.size() == 1);
    CHECK(s.is_root_node(s.top()));
    CHECK(s.buffer.empty());
    CHECK(s.nodes.size() == 1);
}

TEST_CASE("initial_state numbers the root and tokens consecutively") {
    ParserState s = three_tokens();
    CHECK(s.buffer.size() == 3);
    CHECK(s.root == 0);
    CHECK(s.terminals == std::vector<NodeRef>{1, 2, 3});
}

TEST_CASE("identical token forms still get distinct refs") {
    ParserState s = initial_state(std::vector<int>{0, 1});  // two tokens, forms may match
    CHECK(s.terminals[0] != s.terminals[1]);
    CHECK_THROWS_AS(initial_state(std::vector<int>{0, 0}), Error);
}

TEST_CASE("property payloads split at the first equals sign only") {
    ParserState s = nonterminal_on_top();
    s = apply(s, Transition::property("wiki", "Q60=NYC=x"));
    const auto& props = s.nodes[static_cast<std::size_t>(s.top())].properties;
    REQUIRE(props.size() == 1);
    CHECK(props[0].first == "wiki");
    CHECK(props[0].second == "Q60=NYC=x");
    // setting the same name again overwrites
    s = apply(s, Transition::property("wiki", "Q61"));
    CHECK(s.nodes[static_cast<std::size_t>(s.top())].properties.size() == 1);
    CHECK(s.nodes[static_cast<std::size_t>(s.top())].properties[0].second == "Q61");
}

TEST_CASE("node count equals terminals plus root plus creations") {
    ParserState s = nonterminal_on_top();
    s = apply(s, Transition::child("c"));
    int creations = 0;
    for (const auto& t : s.history) creations += (t.kind == K::Node || t.kind == K::Child);
    CHECK(s.nodes.size() == s.terminals.size() + 1 + static_cast<std::size_t>(creations));
}

TEST_CASE("replaying a history is deterministic") {
    ParserState s = three_tokens();
    s = apply(s, Transition::shift());
    s = apply(s, Transition::shift());
    s = apply(s, Transition::swap());
    s = apply(s, Transition::shift());
    s = apply(s, Transition::node("ANCHOR"));
    auto history = s.history;
    ParserState r = initial_state(s.terminals.size());
    for (const auto& t : history) r = apply(r, t);
    CHECK(r.stack == s.stack);
    CHECK(r.buffer == s.buffer);
    CHECK(r.edges.size() == s.edges.size());
    CHECK(r.nodes.size() == s.nodes.size());
}

TEST_CASE("stack and buffer sizes change exactly as the table prescribes") {
    auto deltas = [](const ParserState& before, const ParserState& after) {
        return std::pair<int, int>{static_cast<int>(after.stack.size()) - static_cast<int>(before.stack.size()),
                                   static_cast<int>(after.buffer.size()) - static_cast<int>(before.buffer.size())};
    };
    ParserState s = three_tokens();
    CHECK(deltas(s, apply(s, Transition::shift())) == std::pair<int, int>{1, -1});
    ParserState shifted = apply(s, Transition::shift());
    CHECK(deltas(shifted, apply(shifted, Transition::reduce())) == std::pair<int, int>{-1, 0});
    CHECK(deltas(shifted, apply(shifted, Transition::node("x"))) == std::pair<int, int>{0, 1});
    ParserState n = nonterminal_on_top();
    CHECK(deltas(n, apply(n, Transition::child("x"))) == std::pair<int, int>{0, 1});
    CHECK(deltas(n, apply(n, Transition::label("x"))) == std::pair<int, int>{0, 0});
    ParserState two = apply(apply(three_tokens(), Transition::shift()), Transition::shift());
    CHECK(deltas(two, apply(two, Transition::swap())) == std::pair<int, int>{-1, 1});
}

TEST_CASE("extract_igraph requires a terminal state") {
    ParserState s = three_tokens();
    CHECK_THROWS_AS(extract_igraph(s), Error);
    ParserState done = apply(initial_state(std::size_t(0)), Transition::finish());
    IGraph ig = extract_igraph(done);
    CHECK(ig.nodes.size() == 1);
    CHECK(ig.terminals.empty());
}

TEST_CASE("extract_igraph reads out created structure exactly") {
    ParserState s = initial_state(std::size_t(1));
    s = apply(s, Transition::shift());
    s = apply(s, Transition::node("ANCHOR"));
    s = apply(s, Transition::reduce());
    s = apply(s, Transition::shift());
    s = apply(s, Transition::label("thing"));
    s = apply(s, Transition::right_edge("TOP"));  // second is the root here
    s = apply(s, Transition::reduce());
    s = apply(s, Transition::finish());
    IGraph ig = extract_igraph(s);
    CHECK(ig.nodes.size() == 3);
    CHECK(ig.edges.size() == 2);
    const INode* n = ig.find_node(2);
    REQUIRE(n != nullptr);
    CHECK(n->label == "thing");
    CHECK(check_igraph(ig).empty());
}

TEST_CASE("transition text lines round-trip") {
    std::vector<Transition> all = {
        Transition::shift(),         Transition::reduce(),        Transition::node("time"),
        Transition::child("op1"),    Transition::label("after"),  Transition::property("k", "v=1"),
        Transition::left_edge("A"),  Transition::right_edge("P"), Transition::attribute("remote", "true"),
        Transition::swap(),          Transition::finish()};
    for (const auto& t : all) CHECK(Transition::decode(t.encode()) == t);
    CHECK_THROWS_AS(Transition::decode("NONSENSE"), Error);
}
