#pragma once

#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mrparse/graph.hpp"

namespace mrparse {

namespace detail {

inline void read_pairs(const Json& j, const char* names_key, const char* values_key,
                       std::vector<std::pair<std::string, Value>>& out, const std::string& where) {
    if (!j.contains(names_key)) {
        if (j.contains(values_key)) throw Error(where + ": '" + values_key + "' without '" + names_key + "'");
        return;
    }
    const Json& names = j.at(names_key);
    const Json& values = j.contains(values_key) ? j.at(values_key) : Json::array();
    if (!names.is_array() || !values.is_array() || names.size() != values.size())
        throw Error(where + ": '" + names_key + "' and '" + values_key + "' must be parallel arrays");
    for (std::size_t i = 0; i < names.size(); ++i)
        out.emplace_back(names[i].get<std::string>(), values[i]);
}

inline Anchor read_anchor(const Json& j, const std::string& where) {
    if (!j.is_object() || !j.contains("from") || !j.contains("to"))
        throw Error(where + ": anchor must be an object with 'from' and 'to'");
    return Anchor{j.at("from").get<std::int64_t>(), j.at("to").get<std::int64_t>()};
}

inline Json collect_extra(const Json& j, const std::set<std::string>& known) {
    Json extra = Json::object();
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key())) extra[it.key()] = it.value();
    return extra;
}

}  // namespace detail

inline Graph graph_from_json(const Json& j) {
    Graph g;
    if (j.contains("id")) {
        const Json& id = j.at("id");
        g.id = id.is_string() ? id.get<std::string>() : id.dump();
    }
    if (j.contains("framework")) g.framework = j.at("framework").get<std::string>();
    if (j.contains("flavor")) g.flavor = j.at("flavor").get<int>();
    if (j.contains("input")) g.input = j.at("input").get<std::string>();
    if (j.contains("tops"))
        for (const auto& t : j.at("tops")) g.tops.push_back(t.get<NodeId>());
    std::string where = "graph " + g.id;
    if (j.contains("nodes")) {
        for (const auto& nj : j.at("nodes")) {
            Node n;
            n.id = nj.at("id").get<NodeId>();
            if (nj.contains("label")) n.label = nj.at("label").get<std::string>();
            detail::read_pairs(nj, "properties", "values", n.properties, where);
            if (nj.contains("anchors"))
                for (const auto& aj : nj.at("anchors")) n.anchors.push_back(detail::read_anchor(aj, where));
            n.extra = detail::collect_extra(nj, {"id", "label", "properties", "values", "anchors"});
            g.nodes.push_back(std::move(n));
        }
    }
    if (j.contains("edges")) {
        for (const auto& ej : j.at("edges")) {
            Edge e;
            e.source = ej.at("source").get<NodeId>();
            e.target = ej.at("target").get<NodeId>();
            if (ej.contains("label")) e.label = ej.at("label").get<std::string>();
            detail::read_pairs(ej, "attributes", "values", e.attributes, where);
            e.extra = detail::collect_extra(ej, {"source", "target", "label", "attributes", "values"});
            g.edges.push_back(std::move(e));
        }
    }
    g.extra = detail::collect_extra(j, {"id", "framework", "flavor", "input", "tops", "nodes", "edges"});

    // Referential integrity is checked on the way in; everything else is
    // reported by validate().
    std::set<NodeId> ids;
    for (const auto& n : g.nodes)
        if (!ids.insert(n.id).second) throw Error(where + ": duplicate node id " + std::to_string(n.id));
    for (const auto& e : g.edges) {
        if (!ids.count(e.source))
            throw Error(where + ": edge references missing node id " + std::to_string(e.source));
        if (!ids.count(e.target))
            throw Error(where + ": edge references missing node id " + std::to_string(e.target));
    }
    for (NodeId t : g.tops)
        if (!ids.count(t)) throw Error(where + ": top references missing node id " + std::to_string(t));
    return g;
}

inline Json graph_to_json(const Graph& g) {
    Json j;
    j["id"] = g.id;
    j["flavor"] = g.flavor;
    j["framework"] = g.framework;
    for (auto it = g.extra.begin(); it != g.extra.end(); ++it) j[it.key()] = it.value();
    j["input"] = g.input;
    j["tops"] = g.tops;
    j["nodes"] = Json::array();
    for (const auto& n : g.nodes) {
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
        if (!n.anchors.empty()) {
            Json anchors = Json::array();
            for (const auto& a : n.anchors) anchors.push_back(Json{{"from", a.from}, {"to", a.to}});
            nj["anchors"] = anchors;
        }
        for (auto it = n.extra.begin(); it != n.extra.end(); ++it) nj[it.key()] = it.value();
        j["nodes"].push_back(std::move(nj));
    }
    j["edges"] = Json::array();
    for (const auto& e : g.edges) {
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
        for (auto it = e.extra.begin(); it != e.extra.end(); ++it) ej[it.key()] = it.value();
        j["edges"].push_back(std::move(ej));
    }
    return j;
}

/// Read an MRP JSON-lines stream, one graph per line. Blank lines are
/// skipped. Malformed JSON reports the 1-based line number.
inline std::vector<Graph> read_mrp(std::istream& in) {
    std::vector<Graph> graphs;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        Json j;
        try {
            j = Json::parse(line);
        } catch (const Json::parse_error& e) {
            throw Error("line " + std::to_string(line_no) + ": " + e.what());
        }
        try {
            graphs.push_back(graph_from_json(j));
        } catch (const Json::exception& e) {
            throw Error("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return graphs;
}

inline void write_mrp(const std::vector<Graph>& graphs, std::ostream& out) {
    for (const auto& g : graphs) {
        out << graph_to_json(g).dump() << '\n';
        if (!out) throw Error("write failure on MRP output stream");
    }
}

// Debug aid: GraphViz rendering of a graph.
inline std::string to_dot(const Graph& g) {
    std::ostringstream out;
    out << "digraph \"" << g.id << "\" {\n  rankdir=TB;\n";
    std::set<NodeId> tops(g.tops.begin(), g.tops.end());
    for (const auto& n : g.nodes) {
        out << "  n" << n.id << " [label=\"" << n.id;
        if (n.label) out << "\\n" << *n.label;
        for (const auto& [name, value] : n.properties) out << "\\n" << name << "=" << value_string(value);
        out << "\"";
        if (tops.count(n.id)) out << ", penwidth=2";
        out << "];\n";
    }
    for (const auto& e : g.edges) {
        out << "  n" << e.source << " -> n" << e.target;
        if (e.label) {
            out << " [label=\"" << *e.label;
            for (const auto& [name, value] : e.attributes) out << "\\n" << name << "=" << value_string(value);
            out << "\"]";
        }
        out << ";\n";
    }
    out << "}\n";
    return out.str();
}

}  // namespace mrparse
