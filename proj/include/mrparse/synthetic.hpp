#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include "mrparse/companion.hpp"
#include "mrparse/graph.hpp"
#include "mrparse/irep.hpp"
#include "mrparse/profile.hpp"
#include "mrparse/util.hpp"

namespace mrparse {

/// Seeded generators for miniature per-framework corpora. Licensed MRP data
/// cannot ship with the repository, so tests and the bundled data directory
/// use these instead: small sentences with companion token rows and gold
/// graphs exercising each framework profile's structure (hierarchy, shared
/// argument reentrancies, multi-token names, multigraph edges, cycles).

struct Lexeme {
    const char* form;
    const char* lemma;
    const char* upos;
    const char* xpos;
};

namespace synth_detail {

inline const std::vector<Lexeme>& determiners() {
    static const std::vector<Lexeme> v = {{"the", "the", "DET", "DT"}, {"a", "a", "DET", "DT"}};
    return v;
}
inline const std::vector<Lexeme>& nouns() {
    static const std::vector<Lexeme> v = {{"fox", "fox", "NOUN", "NN"},       {"prince", "prince", "NOUN", "NN"},
                                          {"rose", "rose", "NOUN", "NN"},     {"king", "king", "NOUN", "NN"},
                                          {"garden", "garden", "NOUN", "NN"}, {"star", "star", "NOUN", "NN"},
                                          {"lamp", "lamp", "NOUN", "NN"},     {"desert", "desert", "NOUN", "NN"}};
    return v;
}
inline const std::vector<Lexeme>& verbs() {
    static const std::vector<Lexeme> v = {{"gazed", "gaze", "VERB", "VBD"},
                                          {"moved", "move", "VERB", "VBD"},
                                          {"smiled", "smile", "VERB", "VBD"},
                                          {"traveled", "travel", "VERB", "VBD"},
                                          {"graduated", "graduate", "VERB", "VBD"}};
    return v;
}
inline const std::vector<Lexeme>& adjectives() {
    static const std::vector<Lexeme> v = {{"little", "little", "ADJ", "JJ"},
                                          {"golden", "golden", "ADJ", "JJ"},
                                          {"actual", "actual", "ADJ", "JJ"}};
    return v;
}
inline const std::vector<Lexeme>& adpositions() {
    static const std::vector<Lexeme> v = {{"at", "at", "ADP", "IN"}, {"to", "to", "ADP", "IN"},
                                          {"in", "in", "ADP", "IN"}};
    return v;
}
inline const std::vector<Lexeme>& proper_nouns() {
    static const std::vector<Lexeme> v = {{"John", "John", "PROPN", "NNP"},   {"Mary", "Mary", "PROPN", "NNP"},
                                          {"Paris", "Paris", "PROPN", "NNP"}, {"New", "New", "PROPN", "NNP"},
                                          {"York", "York", "PROPN", "NNP"},   {"City", "City", "PROPN", "NNP"}};
    return v;
}

struct Token {
    Lexeme lex;
    Anchor anchor;
};

struct Sentence {
    std::vector<Token> tokens;
    std::string input;
    // token indices by coarse role, filled by the pattern builder
    std::vector<std::size_t> noun_heads;  // nouns and name-final proper nouns
    std::vector<std::size_t> name_runs_start;
    std::vector<std::size_t> name_runs_len;
    std::size_t verb = 0;
};

inline void push_token(Sentence& s, const Lexeme& lex) {
    std::int64_t from = static_cast<std::int64_t>(utf8_length(s.input));
    if (!s.input.empty()) {
        s.input += ' ';
        ++from;
    }
    s.input += lex.form;
    s.tokens.push_back({lex, {from, from + static_cast<std::int64_t>(utf8_length(lex.form))}});
}

// Small clause patterns; every sentence has one verb and 1-2 argument
// phrases, optionally a prepositional phrase or a proper-name run.
inline Sentence make_sentence(Rng& rng) {
    Sentence s;
    int pattern = static_cast<int>(rng.below(4));
    auto np = [&](bool allow_adj) {
        push_token(s, rng.pick(determiners()));
        if (allow_adj && rng.chance(0.4)) push_token(s, rng.pick(adjectives()));
        push_token(s, rng.pick(nouns()));
        s.noun_heads.push_back(s.tokens.size() - 1);
    };
    auto name = [&](std::size_t len) {
        s.name_runs_start.push_back(s.tokens.size());
        s.name_runs_len.push_back(len);
        std::size_t start = rng.below(proper_nouns().size() - len + 1);
        for (std::size_t i = 0; i < len; ++i) push_token(s, proper_nouns()[start + i]);
        s.noun_heads.push_back(s.tokens.size() - 1);
    };
    switch (pattern) {
        case 0:
            np(true);
            s.verb = s.tokens.size();
            push_token(s, rng.pick(verbs()));
            push_token(s, rng.pick(adpositions()));
            np(false);
            break;
        case 1:
            np(true);
            s.verb = s.tokens.size();
            push_token(s, rng.pick(verbs()));
            break;
        case 2:
            name(1 + rng.below(2));
            s.verb = s.tokens.size();
            push_token(s, rng.pick(verbs()));
            push_token(s, rng.pick(adpositions()));
            name(1 + rng.below(3));
            break;
        default:
            np(false);
            push_token(s, {",", ",", "PUNCT", ","});
            s.verb = s.tokens.size();
            push_token(s, rng.pick(verbs()));
            np(true);
            break;
    }
    return s;
}

inline Graph companion_graph(const Sentence& s, const std::string& id) {
    Graph g;
    g.id = id;
    g.framework = "ud";
    g.flavor = 0;
    g.input = s.input;
    for (std::size_t i = 0; i < s.tokens.size(); ++i) {
        Node n;
        n.id = static_cast<NodeId>(i);
        n.label = s.tokens[i].lex.form;
        n.properties = {{"lemma", Value(s.tokens[i].lex.lemma)},
                        {"upos", Value(s.tokens[i].lex.upos)},
                        {"xpos", Value(s.tokens[i].lex.xpos)}};
        n.anchors = {s.tokens[i].anchor};
        g.nodes.push_back(std::move(n));
    }
    return g;
}

// Add a cycle by reversing some parent-child relation with an extra edge.
inline void plant_cycle(Graph& g, const std::string& label) {
    if (g.edges.empty()) return;
    const Edge& e = g.edges.front();
    g.edges.push_back({e.target, e.source, label, {}, {}});
}

}  // namespace synth_detail

struct SyntheticPair {
    Graph gold;
    Graph companion;
    std::vector<TokenRow> rows;
};

/// One synthetic (gold graph, companion) pair. `framework` selects the
/// profile-specific structure; `cyclic` forces a planted cycle (ptg / drg
/// only; other frameworks ignore it).
inline SyntheticPair make_synthetic(const std::string& framework, std::uint64_t seed, std::size_t index,
                                    bool cyclic = false) {
    using namespace synth_detail;
    Rng rng(derive_seed(seed, framework + "-" + std::to_string(index)));
    Sentence s = make_sentence(rng);

    char idbuf[64];
    std::snprintf(idbuf, sizeof idbuf, "%s-%04zu", framework.c_str(), index);
    std::string id = idbuf;

    Graph g;
    g.id = id;
    g.framework = framework;
    g.input = s.input;
    NodeId next = 0;
    auto add_node = [&](std::optional<std::string> label, std::vector<Anchor> anchors) {
        Node n;
        n.id = next++;
        n.label = std::move(label);
        n.anchors = std::move(anchors);
        g.nodes.push_back(std::move(n));
        return g.nodes.back().id;
    };
    auto tok_anchor = [&](std::size_t i) { return s.tokens[i].anchor; };
    auto edge = [&](NodeId src, NodeId tgt, const std::string& label) {
        g.edges.push_back({src, tgt, label, {}, {}});
    };

    if (framework == "ucca") {
        g.flavor = 1;
        NodeId scene = add_node(std::nullopt, {});
        g.tops = {scene};
        std::vector<NodeId> participants;
        for (std::size_t i = 0; i < s.tokens.size(); ++i) {
            const char* upos = s.tokens[i].lex.upos;
            NodeId leaf = add_node(std::nullopt, {tok_anchor(i)});
            if (std::string(upos) == "NOUN" || std::string(upos) == "PROPN") {
                participants.push_back(leaf);
                edge(scene, leaf, "A");
            } else if (std::string(upos) == "VERB") {
                edge(scene, leaf, "P");
            } else if (std::string(upos) == "DET") {
                edge(scene, leaf, "F");
            } else if (std::string(upos) == "ADJ") {
                edge(scene, leaf, "D");
            } else if (std::string(upos) == "PUNCT") {
                edge(scene, leaf, "U");
            } else {
                edge(scene, leaf, "R");
            }
        }
        if (!participants.empty() && rng.chance(0.2)) {
            // remote participant: a reentrant edge flagged with an attribute
            // (label differs from the primary edge, so no parallel triple)
            g.edges.push_back({scene, participants.front(), "D", {{"remote", Value(true)}}, {}});
        }
    } else if (framework == "ptg") {
        g.flavor = 1;
        NodeId vnode = add_node(s.tokens[s.verb].lex.lemma, {tok_anchor(s.verb)});
        g.nodes.back().properties = {{"sempos", Value("v")}};
        g.tops = {vnode};
        const char* roles[] = {"ACT", "PAT", "ADDR"};
        std::size_t r = 0;
        std::vector<NodeId> args;
        for (std::size_t i : s.noun_heads) {
            NodeId nnode = add_node(s.tokens[i].lex.lemma, {tok_anchor(i)});
            g.nodes.back().properties = {{"sempos", Value("n.denot")}};
            edge(vnode, nnode, roles[std::min<std::size_t>(r++, 2)]);
            args.push_back(nnode);
        }
        for (std::size_t i = 0; i < s.tokens.size(); ++i) {
            const std::string upos = s.tokens[i].lex.upos;
            if (upos == "ADJ") {
                NodeId anode = add_node(s.tokens[i].lex.lemma, {tok_anchor(i)});
                g.nodes.back().properties = {{"sempos", Value("adj.denot")}};
                if (!args.empty()) edge(args.front(), anode, "RSTR");
                else edge(vnode, anode, "RSTR");
            }
        }
        if (!args.empty() && rng.chance(0.2))
            edge(vnode, args.front(), "PAT.member");  // parallel edge, distinct label
        if (!args.empty() && rng.chance(0.1))
            edge(vnode, args.front(), "ACT");  // identical triple: PTG is a multigraph
        if (!g.edges.empty() && rng.chance(0.25)) {
            auto& e = g.edges.front();
            g.edges.push_back({e.target, e.source, "coref.gram", {}, {}});
            cyclic = false;  // already cyclic
        }
        if (cyclic) plant_cycle(g, "coref.gram");
    } else if (framework == "eds") {
        g.flavor = 1;
        NodeId vnode = add_node("_" + std::string(s.tokens[s.verb].lex.lemma) + "_v_1", {tok_anchor(s.verb)});
        g.tops = {vnode};
        const char* roles[] = {"ARG1", "ARG2", "ARG3"};
        std::size_t r = 0;
        std::vector<NodeId> heads;
        for (std::size_t i : s.noun_heads) {
            std::string label = s.tokens[i].lex.upos == std::string("PROPN")
                                    ? "named"
                                    : "_" + std::string(s.tokens[i].lex.lemma) + "_n_1";
            NodeId nnode = add_node(label, {tok_anchor(i)});
            if (s.tokens[i].lex.upos == std::string("PROPN"))
                g.nodes.back().properties = {{"carg", Value(s.tokens[i].lex.form)}};
            edge(vnode, nnode, roles[std::min<std::size_t>(r++, 2)]);
            heads.push_back(nnode);
        }
        for (std::size_t i = 0; i < s.tokens.size(); ++i) {
            const std::string upos = s.tokens[i].lex.upos;
            if (upos == "DET" && !heads.empty()) {
                NodeId q = add_node("udef_q", {tok_anchor(i)});
                edge(q, heads.front(), "BV");
            } else if (upos == "ADJ" && !heads.empty()) {
                NodeId a = add_node("_" + std::string(s.tokens[i].lex.lemma) + "_a_1", {tok_anchor(i)});
                edge(a, heads.front(), "ARG1");  // shares the noun: reentrancy
            }
        }
    } else if (framework == "amr") {
        g.flavor = 2;
        NodeId vnode = add_node(std::string(s.tokens[s.verb].lex.lemma) + "-01", {tok_anchor(s.verb)});
        g.tops = {vnode};
        const char* roles[] = {"ARG0", "ARG1", "ARG2"};
        std::size_t r = 0;
        std::vector<NodeId> concepts;
        for (std::size_t k = 0; k < s.name_runs_start.size(); ++k) {
            std::size_t start = s.name_runs_start[k], len = s.name_runs_len[k];
            NodeId entity = add_node(k == 0 ? "person" : "city", {});
            std::vector<Anchor> span_anchors;
            for (std::size_t i = 0; i < len; ++i) span_anchors.push_back(tok_anchor(start + i));
            NodeId nm = add_node("name", std::move(span_anchors));
            for (std::size_t i = 0; i < len; ++i)
                g.nodes.back().set_property("op" + std::to_string(i + 1), Value(s.tokens[start + i].lex.form));
            edge(entity, nm, "name");
            edge(vnode, entity, roles[std::min<std::size_t>(r++, 2)]);
            concepts.push_back(entity);
        }
        for (std::size_t i : s.noun_heads) {
            if (s.tokens[i].lex.upos != std::string("NOUN")) continue;
            NodeId c = add_node(s.tokens[i].lex.lemma, {tok_anchor(i)});
            edge(vnode, c, roles[std::min<std::size_t>(r++, 2)]);
            concepts.push_back(c);
        }
        if (rng.chance(0.35) && !concepts.empty()) {
            NodeId extra = add_node("after", {});
            NodeId ev = add_node("graduate-01", {});
            edge(vnode, extra, "time");
            edge(extra, ev, "op1");
            edge(ev, concepts.front(), "ARG0");  // reentrant shared argument
        }
        if (rng.chance(0.3)) g.nodes[0].set_property("polarity", Value("-"));
    } else if (framework == "drg") {
        g.flavor = 2;
        NodeId box = add_node("box", {});
        g.tops = {box};
        NodeId ev = add_node(std::string(s.tokens[s.verb].lex.lemma) + ".v.01", {tok_anchor(s.verb)});
        edge(box, ev, "in");
        const char* roles[] = {"Agent", "Theme", "Time"};
        std::size_t r = 0;
        for (std::size_t i : s.noun_heads) {
            NodeId c = add_node(std::string(s.tokens[i].lex.lemma) + ".n.01", {tok_anchor(i)});
            edge(box, c, "in");
            edge(ev, c, roles[std::min<std::size_t>(r++, 2)]);
        }
        if (cyclic) plant_cycle(g, "in");
    } else {
        throw Error("no synthetic generator for framework: " + framework);
    }

    SyntheticPair pair;
    pair.companion = companion_graph(s, id);
    pair.rows = companion_to_rows(pair.companion);
    pair.gold = std::move(g);
    return pair;
}

inline std::vector<SyntheticPair> make_corpus(const std::string& framework, std::size_t count,
                                              std::uint64_t seed) {
    std::vector<SyntheticPair> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(make_synthetic(framework, seed, i));
    return out;
}

/// A corpus with an exact planted number of cyclic graphs (ptg structure),
/// deterministically interleaved.
inline std::vector<SyntheticPair> make_cyclic_planted_corpus(std::size_t total, std::size_t cyclic_count,
                                                             std::uint64_t seed) {
    std::vector<bool> plan(total, false);
    for (std::size_t i = 0; i < cyclic_count; ++i) plan[i] = true;
    Rng rng(derive_seed(seed, "cyclic-plan"));
    rng.shuffle(plan);
    std::vector<SyntheticPair> out;
    out.reserve(total);
    for (std::size_t i = 0; i < total; ++i) {
        SyntheticPair p = make_synthetic("ptg", seed, i, plan[i]);
        if (plan[i] && find_cycles(p.gold).empty())
            synth_detail::plant_cycle(p.gold, "coref.gram");
        if (!plan[i]) {
            // the ptg generator may have added its own coreference cycle
            auto [acyclic, removed] = break_cycles(p.gold);
            p.gold = acyclic;
        }
        out.push_back(std::move(p));
    }
    return out;
}

}  // namespace mrparse
