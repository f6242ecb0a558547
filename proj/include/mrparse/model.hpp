#pragma once

#include <cstdint>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "mrparse/constraints.hpp"
#include "mrparse/evaluator.hpp"
#include "mrparse/features.hpp"
#include "mrparse/oracle.hpp"
#include "mrparse/profile.hpp"

namespace mrparse {

namespace detail {

inline std::uint64_t feature_bucket(const std::string& tmpl, const std::string& value) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&](const std::string& s) {
        for (char c : s) {
            h ^= static_cast<unsigned char>(c);
            h *= 0x100000001b3ULL;
        }
        h ^= 0x1f;
        h *= 0x100000001b3ULL;
    };
    mix(tmpl);
    mix(value);
    return h;
}

}  // namespace detail

/// A multi-class linear scorer over hashed categorical features and named
/// numeric features. Weights are the averaged-perceptron final weights.
struct LinearModel {
    std::map<std::string, std::unordered_map<std::uint64_t, double>> sparse;  // class -> bucket -> w
    std::map<std::string, std::map<std::string, double>> dense;               // class -> feature -> w

    double score(const std::string& cls, const FeatureVector& fv) const {
        double s = 0;
        auto sp = sparse.find(cls);
        if (sp != sparse.end()) {
            for (const auto& [tmpl, value] : fv.categorical) {
                auto it = sp->second.find(detail::feature_bucket(tmpl, value));
                if (it != sp->second.end()) s += it->second;
            }
        }
        auto de = dense.find(cls);
        if (de != dense.end()) {
            for (const auto& [name, value] : fv.numeric) {
                auto it = de->second.find(name);
                if (it != de->second.end()) s += it->second * value;
            }
        }
        return s;
    }

    // argmax with deterministic lexicographic tie-break
    std::string best(const std::vector<std::string>& classes, const FeatureVector& fv) const {
        std::string winner;
        double best_score = 0;
        bool first = true;
        for (const auto& cls : classes) {
            double sc = score(cls, fv);
            if (first || sc > best_score || (sc == best_score && cls < winner)) {
                winner = cls;
                best_score = sc;
                first = false;
            }
        }
        return winner;
    }

    Json to_json() const {
        Json j;
        Json sp = Json::object();
        for (const auto& [cls, buckets] : sparse) {
            std::map<std::uint64_t, double> sorted(buckets.begin(), buckets.end());
            Json b = Json::object();
            for (const auto& [bucket, w] : sorted)
                if (w != 0) b[std::to_string(bucket)] = w;
            sp[cls] = std::move(b);
        }
        j["sparse"] = std::move(sp);
        Json de = Json::object();
        for (const auto& [cls, feats] : dense) {
            Json f = Json::object();
            for (const auto& [name, w] : feats)
                if (w != 0) f[name] = w;
            de[cls] = std::move(f);
        }
        j["dense"] = std::move(de);
        return j;
    }

    static LinearModel from_json(const Json& j) {
        LinearModel m;
        for (auto it = j.at("sparse").begin(); it != j.at("sparse").end(); ++it)
            for (auto b = it.value().begin(); b != it.value().end(); ++b)
                m.sparse[it.key()][std::stoull(b.key())] = b.value().get<double>();
        for (auto it = j.at("dense").begin(); it != j.at("dense").end(); ++it)
            for (auto f = it.value().begin(); f != it.value().end(); ++f)
                m.dense[it.key()][f.key()] = f.value().get<double>();
        return m;
    }
};

/// Trained parser: framework profile with learned vocabularies, the
/// transition classifier, and one payload classifier per decoration kind.
struct Model {
    int version = 1;
    std::string feature_registry = kFeatureRegistryVersion;
    FrameworkProfile profile;
    LinearModel transitions;
    LinearModel label_payloads;
    LinearModel property_payloads;
    LinearModel attribute_payloads;
    std::uint64_t seed = 0;
    int epochs = 0;
    int skipped_sentences = 0;
    bool multitask = false;
    Json metadata = Json::object();

    Json to_json() const {
        Json j;
        j["format"] = "mrparse-model";
        j["version"] = version;
        j["feature-registry"] = feature_registry;
        j["profile"] = profile.to_json();
        j["transitions"] = transitions.to_json();
        // payload tables only for the classes the profile allows
        if (profile.allows_node_labels) j["label-payloads"] = label_payloads.to_json();
        if (profile.allows_node_properties) j["property-payloads"] = property_payloads.to_json();
        if (profile.allows_edge_attributes) j["attribute-payloads"] = attribute_payloads.to_json();
        j["seed"] = seed;
        j["epochs"] = epochs;
        j["skipped-sentences"] = skipped_sentences;
        j["multitask"] = multitask;
        j["metadata"] = metadata;
        return j;
    }

    static Model from_json(const Json& j) {
        if (j.value("format", std::string()) != "mrparse-model") throw Error("not a model file");
        Model m;
        m.version = j.at("version").get<int>();
        m.feature_registry = j.at("feature-registry").get<std::string>();
        if (m.feature_registry != kFeatureRegistryVersion)
            throw Error("model feature registry " + m.feature_registry + " does not match " +
                        kFeatureRegistryVersion);
        m.profile = FrameworkProfile::from_json(j.at("profile"));
        m.transitions = LinearModel::from_json(j.at("transitions"));
        if (j.contains("label-payloads")) m.label_payloads = LinearModel::from_json(j.at("label-payloads"));
        if (j.contains("property-payloads"))
            m.property_payloads = LinearModel::from_json(j.at("property-payloads"));
        if (j.contains("attribute-payloads"))
            m.attribute_payloads = LinearModel::from_json(j.at("attribute-payloads"));
        m.seed = j.at("seed").get<std::uint64_t>();
        m.epochs = j.at("epochs").get<int>();
        m.skipped_sentences = j.at("skipped-sentences").get<int>();
        m.multitask = j.value("multitask", false);
        m.metadata = j.value("metadata", Json::object());
        return m;
    }
};

inline void save_model(const Model& m, std::ostream& out) { out << m.to_json().dump(1) << '\n'; }

inline Model load_model(std::istream& in) { return Model::from_json(Json::parse(in)); }

// The transition-classifier class of a concrete transition: edge kinds carry
// their label, decoration kinds are collapsed (payload chosen separately).
inline std::string transition_class(const Transition& t) {
    using K = Transition::Kind;
    if (t.kind == K::Label || t.kind == K::Property || t.kind == K::Attribute)
        return Transition::kind_name(t.kind);
    return t.encode();
}

struct TrainConfig {
    int epochs = 10;
    std::uint64_t seed = 1;
    bool multitask = false;
    std::ostream* log = nullptr;  // warnings and per-epoch notes
};

struct TrainItem {
    Graph graph;
    std::vector<TokenRow> rows;
};

namespace detail {

// Averaged passive-aggressive (1-best MIRA) bookkeeping for one LinearModel:
// the update magnitude is the hinge loss against the strongest wrong class,
// scaled by the feature norm, which separates small corpora in few epochs.
struct AveragedTrainer {
    LinearModel current;
    std::map<std::string, std::unordered_map<std::uint64_t, double>> sparse_acc;
    std::map<std::string, std::map<std::string, double>> dense_acc;
    long long steps = 0;

    explicit AveragedTrainer(LinearModel init = {}) : current(std::move(init)) {}

    void update(const std::string& gold_cls, const std::vector<std::string>& classes,
                const FeatureVector& fv) {
        ++steps;
        double gold_score = current.score(gold_cls, fv);
        std::string rival;
        double rival_score = 0;
        bool first = true;
        for (const auto& cls : classes) {
            if (cls == gold_cls) continue;
            double sc = current.score(cls, fv);
            if (first || sc > rival_score || (sc == rival_score && cls < rival)) {
                rival = cls;
                rival_score = sc;
                first = false;
            }
        }
        if (first) return;  // nothing to separate from
        double loss = 1.0 - (gold_score - rival_score);
        if (loss <= 0) return;
        double norm = 0;
        norm += static_cast<double>(fv.categorical.size());
        for (const auto& [name, value] : fv.numeric) norm += value * value;
        double tau = loss / (2.0 * norm);
        apply_delta(gold_cls, fv, tau);
        apply_delta(rival, fv, -tau);
    }

    void apply_delta(const std::string& cls, const FeatureVector& fv, double tau) {
        for (const auto& [tmpl, value] : fv.categorical) {
            std::uint64_t b = feature_bucket(tmpl, value);
            current.sparse[cls][b] += tau;
            sparse_acc[cls][b] += static_cast<double>(steps) * tau;
        }
        for (const auto& [name, value] : fv.numeric) {
            current.dense[cls][name] += tau * value;
            dense_acc[cls][name] += static_cast<double>(steps) * tau * value;
        }
    }

    // w_avg = w - acc / (steps + 1)
    LinearModel averaged() const {
        LinearModel avg = current;
        double denom = static_cast<double>(steps + 1);
        for (auto& [cls, buckets] : avg.sparse) {
            auto acc_it = sparse_acc.find(cls);
            if (acc_it == sparse_acc.end()) continue;
            for (auto& [b, w] : buckets) {
                auto a = acc_it->second.find(b);
                if (a != acc_it->second.end()) w -= a->second / denom;
            }
        }
        for (auto& [cls, feats] : avg.dense) {
            auto acc_it = dense_acc.find(cls);
            if (acc_it == dense_acc.end()) continue;
            for (auto& [name, w] : feats) {
                auto a = acc_it->second.find(name);
                if (a != acc_it->second.end()) w -= a->second / denom;
            }
        }
        return avg;
    }

    // Model selection between the averaged and the final weight vector:
    // whichever makes fewer mistakes under `count_errors`, ties to averaged.
    template <typename CountErrors>
    LinearModel select(CountErrors count_errors) const {
        LinearModel avg = averaged();
        std::size_t avg_errors = count_errors(avg);
        if (avg_errors == 0) return avg;
        std::size_t cur_errors = count_errors(current);
        return cur_errors < avg_errors ? current : avg;
    }
};

inline std::vector<std::string> payload_classes(const std::set<std::string>& vocab) {
    return {vocab.begin(), vocab.end()};
}

}  // namespace detail

/// Choose the next transition: argmax of the transition classifier over the
/// masked classes, payload filled in by the corresponding payload classifier.
/// An empty mask falls back to the recovery rule, so a transition is always
/// produced and is always mask-allowed.
inline Transition predict(const Model& m, const ParserState& s, const std::vector<TokenRow>& rows) {
    using K = Transition::Kind;
    auto classes = masked_transition_classes(s, m.profile);
    if (classes.empty()) return recovery_transition(s);

    FeatureVector fv = extract_features(s, rows, m.multitask ? m.profile.framework : std::string());
    std::vector<std::string> keys;
    keys.reserve(classes.size());
    for (const auto& t : classes) keys.push_back(transition_class(t));
    std::string cls = m.transitions.best(keys, fv);
    Transition t = Transition::decode(cls);
    if (t.kind == K::Label)
        t.payload = m.label_payloads.best(detail::payload_classes(m.profile.node_labels), fv);
    else if (t.kind == K::Property)
        t.payload = m.property_payloads.best(detail::payload_classes(m.profile.properties), fv);
    else if (t.kind == K::Attribute)
        t.payload = m.attribute_payloads.best(detail::payload_classes(m.profile.attributes), fv);
    return t;
}

struct ParseResult {
    Graph graph;
    bool truncated = false;
    std::size_t steps = 0;
};

/// Greedy parse of one sentence: run predict/apply until the terminal state
/// or the step budget (10 * (2n + 10)) runs out, then read the graph out of
/// the intermediate representation. On budget exhaustion the state is drained
/// to a terminal one and the best-effort graph is flagged truncated.
inline ParseResult parse(const Model& m, const std::vector<TokenRow>& rows, const std::string& graph_id,
                         const std::string& input) {
    ParseResult result;
    std::size_t budget = 10 * (2 * rows.size() + 10);
    ParserState s = initial_state(rows.size());
    while (!s.finished && result.steps < budget) {
        s = apply(s, predict(m, s, rows));
        ++result.steps;
    }
    if (!s.finished) {
        result.truncated = true;
        while (!(s.stack.size() == 1 && s.is_root_node(s.top()) && s.buffer.empty())) {
            if (!s.stack.empty() && !s.is_root_node(s.top())) {
                // keep the drained graph profile-valid: required labels are
                // filled from the payload classifier before the node goes
                const StateNode& top = s.nodes[static_cast<std::size_t>(s.top())];
                if (m.profile.required_node_labels && !top.is_terminal && !top.label &&
                    !m.profile.node_labels.empty()) {
                    FeatureVector fv =
                        extract_features(s, rows, m.multitask ? m.profile.framework : std::string());
                    s = apply(s, Transition::label(m.label_payloads.best(
                                     detail::payload_classes(m.profile.node_labels), fv)));
                }
                s = apply(s, Transition::reduce());
            } else {
                s = apply(s, Transition::shift());
            }
        }
        s = apply(s, Transition::finish());
    }
    IGraph ig = extract_igraph(s);
    ig.id = graph_id;
    ig.framework = m.profile.framework;
    ig.flavor = m.profile.flavor;
    FromIntermediateOptions lenient;
    lenient.strict = false;
    result.graph = from_intermediate(ig, rows, input, lenient);
    return result;
}

/// Train a parser on (graph, token rows) pairs: vocabularies are collected
/// from the oracle's view of the data, then an averaged perceptron is fit on
/// the gold transition sequences (teacher forcing). Sentences the oracle
/// cannot compile are skipped with a warning and counted in the metadata.
inline Model train(const std::vector<TrainItem>& corpus, const FrameworkProfile& base_profile,
                   const TrainConfig& config, const Model* init = nullptr) {
    if (corpus.empty()) throw Error("no training data");

    Model m;
    if (init) m = *init;
    m.profile = init ? init->profile : base_profile;
    m.seed = config.seed;
    m.multitask = config.multitask;

    struct Compiled {
        std::vector<TokenRow> rows;
        std::vector<Transition> sequence;
    };
    std::vector<Compiled> compiled;
    int skipped = 0;
    for (const auto& item : corpus) {
        try {
            IGraph gold = to_intermediate(item.graph, item.rows, m.profile);
            for (const auto& n : gold.nodes) {
                if (n.label) m.profile.node_labels.insert(*n.label);
                for (const auto& [name, value] : n.properties) m.profile.properties.insert(name + "=" + value);
            }
            for (const auto& e : gold.edges) {
                m.profile.edge_labels.insert(e.label_or_empty());
                for (const auto& [name, value] : e.attributes) m.profile.attributes.insert(name + "=" + value);
            }
            compiled.push_back({item.rows, gold_sequence(gold, item.rows)});
        } catch (const Error& e) {
            ++skipped;
            if (config.log) *config.log << "warning: skipping graph " << item.graph.id << ": " << e.what() << '\n';
        }
    }
    if (compiled.empty()) throw Error("no training data: every sentence failed oracle compilation");

    detail::AveragedTrainer transitions(init ? init->transitions : LinearModel{});
    detail::AveragedTrainer labels(init ? init->label_payloads : LinearModel{});
    detail::AveragedTrainer properties(init ? init->property_payloads : LinearModel{});
    detail::AveragedTrainer attributes(init ? init->attribute_payloads : LinearModel{});

    Rng shuffle_rng(derive_seed(config.seed, "epoch-shuffle"));
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        std::vector<std::size_t> order(compiled.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        shuffle_rng.shuffle(order);
        for (std::size_t idx : order) {
            const Compiled& c = compiled[idx];
            ParserState s = initial_state(c.rows.size());
            for (const Transition& gold : c.sequence) {
                FeatureVector fv =
                    extract_features(s, c.rows, m.multitask ? m.profile.framework : std::string());
                auto classes = masked_transition_classes(s, m.profile);
                std::vector<std::string> keys;
                keys.reserve(classes.size());
                for (const auto& t : classes) keys.push_back(transition_class(t));
                std::string gold_cls = transition_class(gold);
                if (!keys.empty()) transitions.update(gold_cls, keys, fv);

                using K = Transition::Kind;
                if (gold.kind == K::Label)
                    labels.update(*gold.payload, detail::payload_classes(m.profile.node_labels), fv);
                else if (gold.kind == K::Property)
                    properties.update(*gold.payload, detail::payload_classes(m.profile.properties), fv);
                else if (gold.kind == K::Attribute)
                    attributes.update(*gold.payload, detail::payload_classes(m.profile.attributes), fv);
                s = apply(s, gold);
            }
        }
    }

    // Pick averaged or final weights per classifier by teacher-forced
    // accuracy on the gold paths.
    auto gold_path_errors = [&](const LinearModel& transition_weights, const LinearModel* label_weights,
                                const LinearModel* property_weights, const LinearModel* attribute_weights) {
        std::size_t errors = 0;
        for (const Compiled& c : compiled) {
            ParserState s = initial_state(c.rows.size());
            for (const Transition& gold : c.sequence) {
                FeatureVector fv =
                    extract_features(s, c.rows, m.multitask ? m.profile.framework : std::string());
                using K = Transition::Kind;
                if (label_weights || property_weights || attribute_weights) {
                    if (gold.kind == K::Label && label_weights)
                        errors += label_weights->best(detail::payload_classes(m.profile.node_labels), fv) !=
                                  *gold.payload;
                    if (gold.kind == K::Property && property_weights)
                        errors += property_weights->best(detail::payload_classes(m.profile.properties), fv) !=
                                  *gold.payload;
                    if (gold.kind == K::Attribute && attribute_weights)
                        errors += attribute_weights->best(detail::payload_classes(m.profile.attributes), fv) !=
                                  *gold.payload;
                } else {
                    auto classes = masked_transition_classes(s, m.profile);
                    std::vector<std::string> keys;
                    keys.reserve(classes.size());
                    for (const auto& t : classes) keys.push_back(transition_class(t));
                    if (!keys.empty())
                        errors += transition_weights.best(keys, fv) != transition_class(gold);
                }
                s = apply(s, gold);
            }
        }
        return errors;
    };
    m.transitions = transitions.select(
        [&](const LinearModel& w) { return gold_path_errors(w, nullptr, nullptr, nullptr); });
    m.label_payloads =
        labels.select([&](const LinearModel& w) { return gold_path_errors(w, &w, nullptr, nullptr); });
    m.property_payloads =
        properties.select([&](const LinearModel& w) { return gold_path_errors(w, nullptr, &w, nullptr); });
    m.attribute_payloads =
        attributes.select([&](const LinearModel& w) { return gold_path_errors(w, nullptr, nullptr, &w); });
    m.epochs = (init ? init->epochs : 0) + config.epochs;
    m.skipped_sentences = (init ? init->skipped_sentences : 0) + skipped;
    m.metadata["trained-sentences"] = compiled.size();
    return m;
}

}  // namespace mrparse
