#pragma once

#include <json.hpp>

#include <fstream>
#include <set>
#include <string>

#include "mrparse/util.hpp"

namespace mrparse {

using Json = nlohmann::ordered_json;

/// Declarative per-framework constraint set. Structural flags describe what a
/// framework's graphs may contain; vocabularies are learned from training data
/// and travel with the model file.
struct FrameworkProfile {
    std::string framework;
    int flavor = 0;
    bool allows_node_labels = true;
    bool allows_node_properties = true;
    bool allows_edge_attributes = false;
    bool allows_anchors = true;
    bool allows_multigraph = false;
    int max_tops = 1;
    bool required_node_labels = false;
    bool collapse_name_ops = false;

    std::set<std::string> edge_labels;
    std::set<std::string> node_labels;
    std::set<std::string> properties;  // name=value strings
    std::set<std::string> attributes;  // name=value strings

    Json to_json() const {
        Json j;
        j["framework"] = framework;
        j["flavor"] = flavor;
        j["allows-node-labels"] = allows_node_labels;
        j["allows-node-properties"] = allows_node_properties;
        j["allows-edge-attributes"] = allows_edge_attributes;
        j["allows-anchors"] = allows_anchors;
        j["allows-multigraph"] = allows_multigraph;
        j["max-tops"] = max_tops;
        j["required-node-labels"] = required_node_labels;
        j["collapse-name-ops"] = collapse_name_ops;
        j["edge-labels"] = edge_labels;
        j["node-labels"] = node_labels;
        j["properties"] = properties;
        j["attributes"] = attributes;
        return j;
    }

    void apply_json(const Json& j) {
        if (j.contains("framework")) framework = j.at("framework").get<std::string>();
        if (j.contains("flavor")) flavor = j.at("flavor").get<int>();
        if (j.contains("allows-node-labels")) allows_node_labels = j.at("allows-node-labels").get<bool>();
        if (j.contains("allows-node-properties")) allows_node_properties = j.at("allows-node-properties").get<bool>();
        if (j.contains("allows-edge-attributes")) allows_edge_attributes = j.at("allows-edge-attributes").get<bool>();
        if (j.contains("allows-anchors")) allows_anchors = j.at("allows-anchors").get<bool>();
        if (j.contains("allows-multigraph")) allows_multigraph = j.at("allows-multigraph").get<bool>();
        if (j.contains("max-tops")) max_tops = j.at("max-tops").get<int>();
        if (j.contains("required-node-labels")) required_node_labels = j.at("required-node-labels").get<bool>();
        if (j.contains("collapse-name-ops")) collapse_name_ops = j.at("collapse-name-ops").get<bool>();
        for (auto [key, field] : {std::pair<const char*, std::set<std::string>*>{"edge-labels", &edge_labels},
                                  {"node-labels", &node_labels},
                                  {"properties", &properties},
                                  {"attributes", &attributes}}) {
            if (j.contains(key)) {
                field->clear();
                for (const auto& v : j.at(key)) field->insert(v.get<std::string>());
            }
        }
        if (required_node_labels && !allows_node_labels)
            throw Error("profile " + framework + ": required-node-labels without allows-node-labels");
    }

    static FrameworkProfile from_json(const Json& j) {
        FrameworkProfile p;
        p.apply_json(j);
        return p;
    }
};

/// Static profile for a known framework tag. Structural flags follow the MRP
/// framework definitions; max-tops values and the anchor allowances for the
/// nominally unanchored frameworks (amr, drg, which may carry alignment-derived
/// anchors) are externally sourced defaults and can be overridden via a profile
/// config file.
inline FrameworkProfile profile_for(const std::string& framework) {
    FrameworkProfile p;
    p.framework = framework;
    if (framework == "dm") {
        p.flavor = 0;
        p.required_node_labels = true;
    } else if (framework == "psd") {
        p.flavor = 0;
        p.required_node_labels = true;
        p.max_tops = 4;
    } else if (framework == "eds") {
        p.flavor = 1;
        p.required_node_labels = true;
    } else if (framework == "ptg") {
        p.flavor = 1;
        p.required_node_labels = true;
        p.allows_edge_attributes = true;
        p.allows_multigraph = true;
        p.max_tops = 2;
    } else if (framework == "ucca") {
        p.flavor = 1;
        p.allows_node_labels = false;
        p.allows_node_properties = false;
        p.allows_edge_attributes = true;  // remote edges
    } else if (framework == "amr") {
        p.flavor = 2;
        p.required_node_labels = true;
        p.collapse_name_ops = true;
    } else if (framework == "drg") {
        p.flavor = 2;
        p.required_node_labels = true;
        p.allows_node_properties = false;
        p.max_tops = 2;
    } else {
        throw Error("unknown framework: " + framework);
    }
    return p;
}

/// Overlay overrides from a config file: a JSON object keyed by framework tag,
/// each value holding any subset of the profile fields.
inline FrameworkProfile profile_for(const std::string& framework, const std::string& config_path) {
    FrameworkProfile p = profile_for(framework);
    if (config_path.empty()) return p;
    std::ifstream in(config_path);
    if (!in) throw Error("cannot open profile config: " + config_path);
    Json j = Json::parse(in);
    if (j.contains(framework)) p.apply_json(j.at(framework));
    return p;
}

}  // namespace mrparse
