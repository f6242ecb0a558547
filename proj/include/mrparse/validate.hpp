#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "mrparse/graph.hpp"
#include "mrparse/profile.hpp"

namespace mrparse {

struct Finding {
    std::string code;
    std::string message;
    bool operator==(const Finding&) const = default;
};

struct ValidationReport {
    std::string graph_id;
    std::vector<Finding> findings;
    bool ok() const { return findings.empty(); }
};

/// Check a graph against the data-model invariants and a framework profile.
/// Never throws; every problem becomes a finding.
inline ValidationReport validate(const Graph& g, const FrameworkProfile& profile) {
    ValidationReport report;
    report.graph_id = g.id;
    auto add = [&](std::string code, std::string message) {
        report.findings.push_back({std::move(code), std::move(message)});
    };

    std::set<NodeId> ids;
    for (const auto& n : g.nodes)
        if (!ids.insert(n.id).second)
            add("duplicate-node-id", "duplicate node id " + std::to_string(n.id));
    for (const auto& e : g.edges) {
        if (!ids.count(e.source))
            add("dangling-edge", "edge source " + std::to_string(e.source) + " does not exist");
        if (!ids.count(e.target))
            add("dangling-edge", "edge target " + std::to_string(e.target) + " does not exist");
    }
    for (NodeId t : g.tops)
        if (!ids.count(t)) add("dangling-top", "top " + std::to_string(t) + " does not exist");

    auto input_len = static_cast<std::int64_t>(utf8_length(g.input));
    for (const auto& n : g.nodes) {
        std::string at = " on node " + std::to_string(n.id);
        for (const auto& a : n.anchors) {
            if (a.from >= a.to)
                add("empty-anchor", "anchor [" + std::to_string(a.from) + ", " + std::to_string(a.to) + ")" + at +
                                        " is empty or reversed");
            if (a.from < 0 || a.to > input_len)
                add("anchor-out-of-range", "anchor [" + std::to_string(a.from) + ", " + std::to_string(a.to) + ")" +
                                               at + " exceeds input length " + std::to_string(input_len));
        }
        std::set<std::string> prop_names;
        for (const auto& [name, value] : n.properties)
            if (!prop_names.insert(name).second)
                add("duplicate-property", "duplicate property '" + name + "'" + at);

        if (n.label && !profile.allows_node_labels)
            add("node-labels-forbidden", "node labels forbidden" + at);
        if (!n.label && profile.required_node_labels)
            add("node-label-missing", "node label required" + at);
        if (!n.properties.empty() && !profile.allows_node_properties)
            add("node-properties-forbidden", "node properties forbidden" + at);
        if (!n.anchors.empty() && !profile.allows_anchors)
            add("anchors-forbidden", "anchors forbidden" + at);
    }

    std::map<std::tuple<NodeId, NodeId, std::string>, int> triples;
    for (const auto& e : g.edges) {
        std::string at = " on edge " + std::to_string(e.source) + "->" + std::to_string(e.target);
        if (!e.attributes.empty() && !profile.allows_edge_attributes)
            add("edge-attributes-forbidden", "edge attributes forbidden" + at);
        if (!profile.allows_multigraph &&
            ++triples[{e.source, e.target, e.label_or_empty()}] == 2)
            add("multigraph-forbidden",
                "parallel edge with identical label '" + e.label_or_empty() + "'" + at);
    }

    if (static_cast<int>(g.tops.size()) > profile.max_tops)
        add("too-many-tops", "graph has " + std::to_string(g.tops.size()) + " tops, profile allows " +
                                 std::to_string(profile.max_tops));
    std::set<NodeId> seen_tops;
    for (NodeId t : g.tops)
        if (!seen_tops.insert(t).second)
            add("duplicate-top", "top " + std::to_string(t) + " listed twice");

    return report;
}

}  // namespace mrparse
