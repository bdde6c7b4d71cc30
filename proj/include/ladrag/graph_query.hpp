#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ladrag/graph_model.hpp"

namespace ladrag {

inline constexpr int kDefaultMaxTraverseDepth = 3;

enum class Direction { out, in, both };

Direction direction_from_label(const std::string& label);  // QueryError on unknown
std::string to_string(Direction direction);

// One predicate over node fields. Filters AND together.
struct Filter {
    enum class Kind {
        element_type_in,
        page_range,
        content_contains,
        content_regex,
        visual_attr_equals,
    };

    Kind kind = Kind::element_type_in;
    std::vector<ElementType> types;          // element_type_in
    int page_min = 1;                        // page_range
    int page_max = 1;
    std::string text;                        // content_contains / content_regex
    std::string key, value;                  // visual_attr_equals
};

struct Traverse {
    std::optional<EdgeType> edge_type;  // nullopt: any edge type
    Direction direction = Direction::both;
    int depth = 1;
};

// Declarative query: filters select a seed set, traverse (optional) expands
// it along edges, limit caps the sorted result. Wire format documented in
// docs/query_dsl.md.
struct GraphQuery {
    std::vector<Filter> filters;
    std::optional<Traverse> traverse;
    std::optional<int> limit;

    // QueryError names the offending predicate on malformed input.
    static GraphQuery from_json(const nlohmann::json& j,
                                int max_depth = kDefaultMaxTraverseDepth);
    nlohmann::json to_json() const;
};

// Filters, then traversal expansion, then limit; result sorted by
// (page, NodeId). Deterministic. QueryError if the query has neither
// filters nor traverse, or a regex fails to compile.
std::vector<NodeId> execute_query(const DocumentGraph& graph, const GraphQuery& query);

// Adjacent node ids under an optional edge-type filter, sorted.
std::vector<NodeId> neighbors(const DocumentGraph& graph, const NodeId& node,
                              std::optional<EdgeType> edge_type, Direction direction);

struct ContextualizePolicy {
    bool include_community = true;
    std::vector<EdgeType> neighbor_edges = {EdgeType::same_section, EdgeType::continues_on};
};

// Union of the node's full community and its 1-hop neighbors across the
// policy's edge types (both directions), sorted by (page, NodeId). Always
// contains the seed. Requires communities to be computed.
std::vector<NodeId> contextualize(const DocumentGraph& graph, const NodeId& node,
                                  const ContextualizePolicy& policy = {});

}  // namespace ladrag
