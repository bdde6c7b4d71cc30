#include "ladrag/graph_query.hpp"

#include <algorithm>
#include <regex>
#include <set>

#include "ladrag/errors.hpp"

namespace ladrag {

using nlohmann::json;

Direction direction_from_label(const std::string& label) {
    if (label == "out") return Direction::out;
    if (label == "in") return Direction::in;
    if (label == "both") return Direction::both;
    throw QueryError("unknown direction \"" + label + "\" (expected out, in, or both)");
}

std::string to_string(Direction direction) {
    switch (direction) {
        case Direction::out: return "out";
        case Direction::in: return "in";
        case Direction::both: return "both";
    }
    return "both";
}

namespace {

Filter filter_from_json(const json& jf) {
    if (!jf.is_object() || !jf.contains("field")) {
        throw QueryError("filter must be an object with a \"field\" key: " + jf.dump());
    }
    const std::string field = jf.at("field").get<std::string>();
    Filter f;
    if (field == "element_type") {
        if (!jf.contains("in") || !jf.at("in").is_array() || jf.at("in").empty()) {
            throw QueryError("element_type filter needs a non-empty \"in\" array: " + jf.dump());
        }
        f.kind = Filter::Kind::element_type_in;
        for (const auto& label : jf.at("in")) {
            f.types.push_back(element_type_from_label(label.get<std::string>()));
        }
    } else if (field == "page") {
        f.kind = Filter::Kind::page_range;
        if (!jf.contains("min") && !jf.contains("max")) {
            throw QueryError("page filter needs \"min\" and/or \"max\": " + jf.dump());
        }
        f.page_min = jf.value("min", 1);
        f.page_max = jf.value("max", std::numeric_limits<int>::max());
        if (f.page_min > f.page_max) {
            throw QueryError("page filter has min > max: " + jf.dump());
        }
    } else if (field == "content") {
        const bool has_contains = jf.contains("contains");
        const bool has_regex = jf.contains("regex");
        if (has_contains == has_regex) {
            throw QueryError("content filter needs exactly one of \"contains\"/\"regex\": " +
                             jf.dump());
        }
        f.kind = has_contains ? Filter::Kind::content_contains : Filter::Kind::content_regex;
        f.text = has_contains ? jf.at("contains").get<std::string>()
                              : jf.at("regex").get<std::string>();
        if (f.kind == Filter::Kind::content_regex) {
            try {
                std::regex probe(f.text);
            } catch (const std::regex_error& e) {
                throw QueryError("content regex does not compile (" + std::string(e.what()) +
                                 "): " + jf.dump());
            }
        }
    } else if (field == "visual_attributes") {
        if (!jf.contains("key") || !jf.contains("value")) {
            throw QueryError("visual_attributes filter needs \"key\" and \"value\": " + jf.dump());
        }
        f.kind = Filter::Kind::visual_attr_equals;
        f.key = jf.at("key").get<std::string>();
        f.value = jf.at("value").get<std::string>();
    } else {
        throw QueryError("unknown filter field \"" + field + "\": " + jf.dump());
    }
    return f;
}

json filter_to_json(const Filter& f) {
    switch (f.kind) {
        case Filter::Kind::element_type_in: {
            json types = json::array();
            for (auto t : f.types) types.push_back(to_string(t));
            return json{{"field", "element_type"}, {"in", std::move(types)}};
        }
        case Filter::Kind::page_range:
            return json{{"field", "page"}, {"min", f.page_min}, {"max", f.page_max}};
        case Filter::Kind::content_contains:
            return json{{"field", "content"}, {"contains", f.text}};
        case Filter::Kind::content_regex:
            return json{{"field", "content"}, {"regex", f.text}};
        case Filter::Kind::visual_attr_equals:
            return json{{"field", "visual_attributes"}, {"key", f.key}, {"value", f.value}};
    }
    return json::object();
}

// Regexes compile once per execution, not per node.
struct CompiledFilter {
    const Filter* filter;
    std::optional<std::regex> regex;
};

std::vector<CompiledFilter> compile_filters(const std::vector<Filter>& filters) {
    std::vector<CompiledFilter> out;
    out.reserve(filters.size());
    for (const auto& f : filters) {
        CompiledFilter cf{&f, std::nullopt};
        if (f.kind == Filter::Kind::content_regex) {
            try {
                cf.regex.emplace(f.text);
            } catch (const std::regex_error& e) {
                throw QueryError("content regex does not compile (" + std::string(e.what()) +
                                 "): " + f.text);
            }
        }
        out.push_back(std::move(cf));
    }
    return out;
}

bool filter_matches(const CompiledFilter& cf, const GraphNode& node) {
    const Filter& f = *cf.filter;
    switch (f.kind) {
        case Filter::Kind::element_type_in:
            return std::find(f.types.begin(), f.types.end(), node.element_type) != f.types.end();
        case Filter::Kind::page_range:
            return node.page >= f.page_min && node.page <= f.page_max;
        case Filter::Kind::content_contains:
            return node.content.find(f.text) != std::string::npos;
        case Filter::Kind::content_regex:
            return std::regex_search(node.content, *cf.regex);
        case Filter::Kind::visual_attr_equals: {
            auto it = node.visual_attributes.find(f.key);
            return it != node.visual_attributes.end() && it->second == f.value;
        }
    }
    return false;
}

}  // namespace

GraphQuery GraphQuery::from_json(const json& j, int max_depth) {
    if (!j.is_object()) throw QueryError("query must be a JSON object");
    GraphQuery q;
    if (j.contains("filters")) {
        if (!j.at("filters").is_array()) throw QueryError("\"filters\" must be an array");
        for (const auto& jf : j.at("filters")) q.filters.push_back(filter_from_json(jf));
    }
    if (j.contains("traverse") && !j.at("traverse").is_null()) {
        const auto& jt = j.at("traverse");
        Traverse t;
        if (jt.contains("edge_type") && !jt.at("edge_type").is_null()) {
            const std::string label = jt.at("edge_type").get<std::string>();
            auto edge_type = edge_type_from_label(label);
            if (!edge_type) {
                throw QueryError("traverse names unknown edge_type \"" + label + "\"");
            }
            t.edge_type = *edge_type;
        }
        t.direction = direction_from_label(jt.value("direction", "both"));
        t.depth = jt.value("depth", 1);
        if (t.depth < 1 || t.depth > max_depth) {
            throw QueryError("traverse depth " + std::to_string(t.depth) + " outside [1, " +
                             std::to_string(max_depth) + "]");
        }
        q.traverse = t;
    }
    if (j.contains("limit") && !j.at("limit").is_null()) {
        const int limit = j.at("limit").get<int>();
        if (limit < 1) throw QueryError("limit must be >= 1");
        q.limit = limit;
    }
    if (q.filters.empty() && !q.traverse) {
        throw QueryError("query needs at least one filter or a traverse clause");
    }
    return q;
}

json GraphQuery::to_json() const {
    json j = json::object();
    json filters = json::array();
    for (const auto& f : this->filters) filters.push_back(filter_to_json(f));
    j["filters"] = std::move(filters);
    if (traverse) {
        json jt = json::object();
        if (traverse->edge_type) jt["edge_type"] = to_string(*traverse->edge_type);
        jt["direction"] = to_string(traverse->direction);
        jt["depth"] = traverse->depth;
        j["traverse"] = std::move(jt);
    }
    if (limit) j["limit"] = *limit;
    return j;
}

std::vector<NodeId> execute_query(const DocumentGraph& graph, const GraphQuery& query) {
    if (query.filters.empty() && !query.traverse) {
        throw QueryError("query needs at least one filter or a traverse clause");
    }

    const auto compiled = compile_filters(query.filters);
    std::set<NodeId> selected;
    for (const auto& [id, node] : graph.nodes) {
        bool match = true;
        for (const auto& cf : compiled) {
            if (!filter_matches(cf, node)) {
                match = false;
                break;
            }
        }
        if (match) selected.insert(id);
    }

    if (query.traverse) {
        const Traverse& t = *query.traverse;
        std::set<NodeId> frontier = selected;
        for (int step = 0; step < t.depth && !frontier.empty(); ++step) {
            std::set<NodeId> next;
            for (const auto& edge : graph.edges) {
                if (t.edge_type && edge.edge_type != *t.edge_type) continue;
                const bool forward = t.direction != Direction::in;
                const bool backward = t.direction != Direction::out;
                if (forward && frontier.contains(edge.src) && !selected.contains(edge.dst)) {
                    next.insert(edge.dst);
                }
                if (backward && frontier.contains(edge.dst) && !selected.contains(edge.src)) {
                    next.insert(edge.src);
                }
            }
            selected.insert(next.begin(), next.end());
            frontier = std::move(next);
        }
    }

    std::vector<NodeId> result(selected.begin(), selected.end());  // set order = (page, index)
    if (query.limit && result.size() > static_cast<std::size_t>(*query.limit)) {
        result.resize(static_cast<std::size_t>(*query.limit));
    }
    return result;
}

std::vector<NodeId> neighbors(const DocumentGraph& graph, const NodeId& node,
                              std::optional<EdgeType> edge_type, Direction direction) {
    if (!graph.has_node(node)) throw UnknownNodeError("unknown node " + node.str());

    std::set<NodeId> out;
    for (const auto& edge : graph.edges) {
        if (edge_type && edge.edge_type != *edge_type) continue;
        if (direction != Direction::in && edge.src == node) out.insert(edge.dst);
        if (direction != Direction::out && edge.dst == node) out.insert(edge.src);
    }
    return {out.begin(), out.end()};
}

std::vector<NodeId> contextualize(const DocumentGraph& graph, const NodeId& node,
                                  const ContextualizePolicy& policy) {
    if (!graph.has_node(node)) throw UnknownNodeError("unknown node " + node.str());
    if (policy.include_community && !graph.communities) {
        throw PreconditionError("contextualize requires a computed community partition");
    }

    std::set<NodeId> out{node};
    if (policy.include_community) {
        const auto& assignment = graph.communities->assignment;
        const int community = assignment.at(node);
        for (const auto& [id, c] : assignment) {
            if (c == community) out.insert(id);
        }
    }
    for (EdgeType edge_type : policy.neighbor_edges) {
        for (const auto& id : neighbors(graph, node, edge_type, Direction::both)) {
            out.insert(id);
        }
    }
    return {out.begin(), out.end()};
}

}  // namespace ladrag
