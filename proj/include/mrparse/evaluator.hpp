#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "mrparse/graph.hpp"

namespace mrparse {

using Correspondence = std::map<NodeId, std::int64_t>;  // node id -> marker

/// Canonical anchor form used for tuple comparison: the union of covered
/// character positions minus whitespace, re-emitted as maximal spans. This
/// makes token-wise and merged-span anchorings of the same text compare equal.
inline std::vector<Anchor> normalized_anchor_spans(const std::vector<Anchor>& anchors, const std::string& input) {
    std::vector<bool> space;
    {
        std::size_t n = utf8_length(input);
        space.assign(n, false);
        std::size_t cp = 0;
        for (std::size_t i = 0; i < input.size(); ++i) {
            unsigned char c = static_cast<unsigned char>(input[i]);
            if ((c & 0xC0) != 0x80) {
                space[cp] = (c == ' ' || c == '\t' || c == '\n' || c == '\r');
                ++cp;
            }
        }
    }
    auto len = static_cast<std::int64_t>(space.size());
    std::vector<bool> covered(space.size(), false);
    for (const auto& a : anchors) {
        std::int64_t from = std::max<std::int64_t>(a.from, 0);
        std::int64_t to = std::min(a.to, len);
        for (std::int64_t i = from; i < to; ++i)
            if (!space[static_cast<std::size_t>(i)]) covered[static_cast<std::size_t>(i)] = true;
    }
    std::vector<Anchor> out;
    std::int64_t start = -1;
    for (std::int64_t i = 0; i <= len; ++i) {
        bool on = i < len && covered[static_cast<std::size_t>(i)];
        if (on && start < 0) start = i;
        if (!on && start >= 0) {
            out.push_back({start, i});
            start = -1;
        }
    }
    return out;
}

/// A graph decomposed into the comparable tuple classes, under a node
/// renaming. Nodes missing from the correspondence get fresh markers that
/// can never match the other side.
struct TupleBag {
    std::set<std::int64_t> tops;
    std::set<std::pair<std::int64_t, std::string>> labels;
    std::set<std::tuple<std::int64_t, std::string, std::string>> properties;
    std::set<std::pair<std::int64_t, Anchor>> anchors;
    std::set<std::tuple<std::int64_t, std::int64_t, std::string>> edges;
    std::set<std::tuple<std::int64_t, std::int64_t, std::string, std::string, std::string>> attributes;

    std::size_t size() const {
        return tops.size() + labels.size() + properties.size() + anchors.size() + edges.size() + attributes.size();
    }
};

inline TupleBag tuples(const Graph& g, const Correspondence& correspondence) {
    TupleBag bag;
    std::map<NodeId, std::int64_t> marker;
    std::int64_t next_fresh = std::numeric_limits<std::int64_t>::min() / 2;
    for (const auto& n : g.nodes) {
        auto it = correspondence.find(n.id);
        marker[n.id] = it != correspondence.end() ? it->second : next_fresh++;
    }
    for (NodeId t : g.tops)
        if (marker.count(t)) bag.tops.insert(marker[t]);
    for (const auto& n : g.nodes) {
        std::int64_t m = marker[n.id];
        if (n.label) bag.labels.insert({m, *n.label});
        for (const auto& [name, value] : n.properties) bag.properties.insert({m, name, value_string(value)});
        for (const auto& a : normalized_anchor_spans(n.anchors, g.input)) bag.anchors.insert({m, a});
    }
    for (const auto& e : g.edges) {
        if (!marker.count(e.source) || !marker.count(e.target)) continue;
        std::int64_t s = marker[e.source], t = marker[e.target];
        bag.edges.insert({s, t, e.label_or_empty()});
        for (const auto& [name, value] : e.attributes)
            bag.attributes.insert({s, t, e.label_or_empty(), name, value_string(value)});
    }
    return bag;
}

inline Correspondence identity_correspondence(const Graph& g) {
    Correspondence c;
    for (const auto& n : g.nodes) c[n.id] = n.id;
    return c;
}

struct ClassScore {
    std::size_t gold = 0;
    std::size_t system = 0;
    std::size_t matched = 0;
    double precision = 0, recall = 0, f1 = 0;

    void finish() {
        if (gold == 0 && system == 0) {
            precision = recall = f1 = 1.0;
            return;
        }
        precision = system ? static_cast<double>(matched) / static_cast<double>(system) : 0.0;
        recall = gold ? static_cast<double>(matched) / static_cast<double>(gold) : 0.0;
        f1 = (precision + recall) > 0 ? 2 * precision * recall / (precision + recall) : 0.0;
    }
};

inline const std::vector<std::string>& tuple_class_names() {
    static const std::vector<std::string> names = {"tops", "labels", "properties", "anchors", "edges", "attributes"};
    return names;
}

struct ScoreReport {
    std::map<std::string, ClassScore> classes;
    ClassScore overall;
    double macro_f1 = 0;
    std::map<NodeId, NodeId> correspondence;  // system node -> gold node
    int restarts = 0;
    int iterations = 0;
    std::uint64_t seed = 0;

    Json to_json() const {
        Json j;
        auto cls = [](const ClassScore& c) {
            return Json{{"gold", c.gold},   {"system", c.system},       {"matched", c.matched},
                        {"p", c.precision}, {"r", c.recall},            {"f", c.f1}};
        };
        for (const auto& name : tuple_class_names()) j[name] = cls(classes.at(name));
        j["all"] = cls(overall);
        j["macro-f"] = macro_f1;
        Json corr = Json::object();
        for (const auto& [sys, gold] : correspondence) corr[std::to_string(sys)] = gold;
        j["correspondence"] = corr;
        j["search"] = Json{{"restarts", restarts}, {"iterations", iterations}, {"seed", seed}};
        return j;
    }
};

namespace detail {

template <typename T>
std::size_t intersection_size(const std::set<T>& a, const std::set<T>& b) {
    const std::set<T>& small = a.size() <= b.size() ? a : b;
    const std::set<T>& large = a.size() <= b.size() ? b : a;
    std::size_t n = 0;
    for (const auto& x : small) n += large.count(x);
    return n;
}

struct BagCounts {
    std::array<std::size_t, 6> gold{}, system{}, matched{};
    std::size_t total_matched = 0;
};

inline BagCounts count_overlap(const TupleBag& gold, const TupleBag& system) {
    BagCounts c;
    auto fill = [&](int k, auto member) {
        c.gold[k] = (gold.*member).size();
        c.system[k] = (system.*member).size();
        c.matched[k] = intersection_size(gold.*member, system.*member);
    };
    fill(0, &TupleBag::tops);
    fill(1, &TupleBag::labels);
    fill(2, &TupleBag::properties);
    fill(3, &TupleBag::anchors);
    fill(4, &TupleBag::edges);
    fill(5, &TupleBag::attributes);
    for (int k = 0; k < 6; ++k) c.total_matched += c.matched[k];
    return c;
}

// Similarity prior used to initialize a restart: rough local evidence that
// two nodes correspond, perturbed by the restart's RNG.
inline double node_similarity(const Graph& ga, const Node& a, const Graph& gb, const Node& b) {
    double s = 0;
    if (a.label && b.label && *a.label == *b.label) s += 3;
    std::set<std::pair<std::string, std::string>> props;
    for (const auto& [n, v] : a.properties) props.insert({n, value_string(v)});
    for (const auto& [n, v] : b.properties) s += props.count({n, value_string(v)});
    auto na = normalized_anchor_spans(a.anchors, ga.input);
    auto nb = normalized_anchor_spans(b.anchors, gb.input);
    std::set<Anchor> sa(na.begin(), na.end());
    for (const auto& x : nb) s += 2 * sa.count(x);
    return s;
}

}  // namespace detail

/// MRP F-score between a gold and a system graph. Searches for an injective
/// system-to-gold node correspondence maximizing total tuple overlap:
/// restart 0 is the identity mapping on shared node ids, further restarts
/// start from a perturbed greedy similarity matching, and each restart is
/// improved by single-node reassignment and pairwise image-swap moves until
/// the per-restart iteration budget runs out. Deterministic given the seed.
inline ScoreReport score_pair(const Graph& gold, const Graph& system, int restarts = 10, int iterations = 5000,
                              std::uint64_t seed = 1) {
    if (restarts < 1) throw Error("score_pair: restarts must be >= 1");
    if (iterations < 0) throw Error("score_pair: iterations must be >= 0");

    const std::size_t ns = system.nodes.size(), ng = gold.nodes.size();
    TupleBag gold_bag = tuples(gold, identity_correspondence(gold));

    // mapping[i] = gold node index for system node index i, or -1.
    auto evaluate = [&](const std::vector<int>& mapping) {
        Correspondence c;
        for (std::size_t i = 0; i < ns; ++i)
            if (mapping[i] >= 0) c[system.nodes[i].id] = gold.nodes[static_cast<std::size_t>(mapping[i])].id;
        return detail::count_overlap(gold_bag, tuples(system, c));
    };

    std::vector<int> best_mapping(ns, -1);
    detail::BagCounts best = evaluate(best_mapping);
    bool have_best = false;

    auto consider = [&](const std::vector<int>& mapping, const detail::BagCounts& counts) {
        if (!have_best || counts.total_matched > best.total_matched) {
            best = counts;
            best_mapping = mapping;
            have_best = true;
        }
    };

    std::size_t perfect = gold_bag.size();
    std::map<NodeId, std::size_t> gold_index;
    for (std::size_t j = 0; j < ng; ++j) gold_index[gold.nodes[j].id] = j;

    for (int r = 0; r < restarts; ++r) {
        std::vector<int> mapping(ns, -1);
        std::vector<bool> used(ng, false);
        if (r == 0) {
            // Identity on shared ids: guarantees self-comparison is perfect.
            for (std::size_t i = 0; i < ns; ++i) {
                auto it = gold_index.find(system.nodes[i].id);
                if (it != gold_index.end()) {
                    mapping[i] = static_cast<int>(it->second);
                    used[it->second] = true;
                }
            }
        } else {
            // Perturbation grows with the restart index: early restarts stay
            // close to the greedy similarity matching, later ones wander to
            // escape its basin.
            Rng rng(derive_seed(seed, "restart-" + std::to_string(r)));
            double amplitude = 1.0 + 2.0 * static_cast<double>(r);
            std::vector<std::tuple<double, std::size_t, std::size_t>> cand;
            for (std::size_t i = 0; i < ns; ++i)
                for (std::size_t j = 0; j < ng; ++j)
                    cand.emplace_back(-(detail::node_similarity(system, system.nodes[i], gold, gold.nodes[j]) +
                                        amplitude * rng.real()),
                                      i, j);
            std::sort(cand.begin(), cand.end());
            for (const auto& [negsim, i, j] : cand)
                if (mapping[i] < 0 && !used[j]) {
                    mapping[i] = static_cast<int>(j);
                    used[j] = true;
                }
        }

        int budget = iterations;
        detail::BagCounts counts = evaluate(mapping);
        --budget;
        // First-improvement hill climbing over single-node reassignments
        // (displacing an owner swaps the two images) and unassignments. On a
        // plateau, a bounded number of seeded sideways steps walk to a fresh
        // neighborhood instead of giving up.
        Rng side_rng(derive_seed(seed, "sideways-" + std::to_string(r)));
        int sideways_left = static_cast<int>(4 * (ns + 1));
        bool progress = true;
        while (progress && budget > 0 && counts.total_matched != perfect) {
            progress = false;
            std::vector<std::vector<int>> plateau;
            for (std::size_t i = 0; i < ns && budget > 0 && !progress; ++i) {
                for (int j = -1; j < static_cast<int>(ng) && budget > 0 && !progress; ++j) {
                    if (mapping[i] == j) continue;
                    std::vector<int> trial = mapping;
                    if (j >= 0) {
                        int owner = -1;
                        for (std::size_t k = 0; k < ns; ++k)
                            if (trial[k] == j) owner = static_cast<int>(k);
                        if (owner >= 0) trial[static_cast<std::size_t>(owner)] = trial[i];
                    }
                    trial[i] = j;
                    detail::BagCounts tc = evaluate(trial);
                    --budget;
                    if (tc.total_matched > counts.total_matched) {
                        mapping = std::move(trial);
                        counts = tc;
                        progress = true;
                    } else if (tc.total_matched == counts.total_matched) {
                        plateau.push_back(std::move(trial));
                    }
                }
            }
            if (!progress && sideways_left > 0 && !plateau.empty() && budget > 0) {
                mapping = plateau[side_rng.below(plateau.size())];
                --sideways_left;
                progress = true;
            }
        }
        consider(mapping, counts);
        if (best.total_matched == perfect && have_best) break;  // cannot improve
    }

    ScoreReport report;
    report.restarts = restarts;
    report.iterations = iterations;
    report.seed = seed;
    for (std::size_t i = 0; i < ns; ++i)
        if (best_mapping[i] >= 0)
            report.correspondence[system.nodes[i].id] = gold.nodes[static_cast<std::size_t>(best_mapping[i])].id;

    double macro_sum = 0;
    const auto& names = tuple_class_names();
    for (std::size_t k = 0; k < names.size(); ++k) {
        ClassScore cs;
        cs.gold = best.gold[k];
        cs.system = best.system[k];
        cs.matched = best.matched[k];
        cs.finish();
        macro_sum += cs.f1;
        report.overall.gold += cs.gold;
        report.overall.system += cs.system;
        report.overall.matched += cs.matched;
        report.classes[names[k]] = cs;
    }
    report.overall.finish();
    report.macro_f1 = macro_sum / static_cast<double>(names.size());
    return report;
}

/// Micro-averaged score across a corpus, pairing graphs by id. Every system
/// graph id must exist in the gold corpus; gold graphs without a system
/// counterpart are scored against an empty graph.
inline ScoreReport score_corpus(const std::vector<Graph>& golds, const std::vector<Graph>& systems,
                                int restarts = 10, int iterations = 5000, std::uint64_t seed = 1) {
    std::map<std::string, const Graph*> gold_by_id, system_by_id;
    for (const auto& g : golds)
        if (!gold_by_id.emplace(g.id, &g).second) throw Error("duplicate gold graph id: " + g.id);
    for (const auto& s : systems) {
        if (!system_by_id.emplace(s.id, &s).second) throw Error("duplicate system graph id: " + s.id);
        if (!gold_by_id.count(s.id)) throw Error("system graph id not present in gold corpus: " + s.id);
    }

    ScoreReport totals;
    totals.restarts = restarts;
    totals.iterations = iterations;
    totals.seed = seed;
    for (const auto& name : tuple_class_names()) totals.classes[name] = ClassScore{};

    static const Graph empty_graph{};
    for (const auto& g : golds) {
        auto it = system_by_id.find(g.id);
        const Graph& sys = it != system_by_id.end() ? *it->second : empty_graph;
        ScoreReport r = score_pair(g, sys, restarts, iterations, derive_seed(seed, "graph-" + g.id));
        for (const auto& name : tuple_class_names()) {
            totals.classes[name].gold += r.classes[name].gold;
            totals.classes[name].system += r.classes[name].system;
            totals.classes[name].matched += r.classes[name].matched;
        }
    }
    double macro_sum = 0;
    for (const auto& name : tuple_class_names()) {
        auto& cs = totals.classes[name];
        cs.finish();
        macro_sum += cs.f1;
        totals.overall.gold += cs.gold;
        totals.overall.system += cs.system;
        totals.overall.matched += cs.matched;
    }
    totals.overall.finish();
    totals.macro_f1 = macro_sum / static_cast<double>(tuple_class_names().size());
    return totals;
}

}  // namespace mrparse
