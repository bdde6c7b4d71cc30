#pragma once

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ladrag {

inline constexpr int kGraphSchemaVersion = 1;

// Node identifier, rendered as "p{page}_e{index}". Ordering is numeric by
// (page, index), so sorting by NodeId is sorting by (page, position).
struct NodeId {
    int page = 0;
    int index = 0;

    static NodeId parse(const std::string& text);  // throws ParseError
    static std::optional<NodeId> try_parse(const std::string& text);
    std::string str() const;

    auto operator<=>(const NodeId&) const = default;
};

enum class ElementType {
    paragraph,
    figure,
    table,
    chart,
    section_header,
    title,
    footnote,
    caption,
    list,
    other,
};

// Unknown labels map to `other`; matching is case-insensitive and tolerant
// of separators ("section header", "section-header").
ElementType element_type_from_label(const std::string& label);
std::string to_string(ElementType type);
const std::vector<ElementType>& all_element_types();

enum class EdgeType {
    refers_to,
    same_section,
    continues_on,
    caption_of,
    reading_order_next,
};

// Normalization table for free-form relation labels. Returns nullopt for
// labels outside the closed enum; callers drop those with a warning.
std::optional<EdgeType> edge_type_from_label(const std::string& label);
std::string to_string(EdgeType type);
const std::vector<EdgeType>& all_edge_types();

enum class Provenance { intra_page, inter_page };

std::string to_string(Provenance p);

struct BoundingBox {
    double x0 = 0.0;
    double y0 = 0.0;
    double x1 = 0.0;
    double y1 = 0.0;

    // x0 <= x1, y0 <= y1, all within [0, 1]. y grows downward.
    bool valid() const;

    bool operator==(const BoundingBox&) const = default;
};

struct GraphNode {
    NodeId id;
    int page = 1;
    ElementType element_type = ElementType::other;
    BoundingBox bbox;
    std::string content;   // extractive text or semantic caption
    std::string summary;   // self-contained description; unit of neural indexing
    std::map<std::string, std::string> visual_attributes;

    bool operator==(const GraphNode&) const = default;
};

struct GraphEdge {
    NodeId src;
    NodeId dst;
    EdgeType edge_type = EdgeType::refers_to;
    Provenance provenance = Provenance::intra_page;
    std::string note;  // optional free text

    bool operator==(const GraphEdge&) const = default;
};

struct CommunityPartition {
    std::map<NodeId, int> assignment;
    double modularity = 0.0;

    bool operator==(const CommunityPartition&) const = default;
};

// The symbolic index. Immutable after construction: ingestion builds it once,
// everything downstream only reads.
struct DocumentGraph {
    std::string doc_id;
    int page_count = 0;
    int schema_version = kGraphSchemaVersion;
    std::map<NodeId, GraphNode> nodes;
    std::vector<GraphEdge> edges;
    std::optional<CommunityPartition> communities;

    const GraphNode* find(const NodeId& id) const;
    bool has_node(const NodeId& id) const { return nodes.contains(id); }

    bool operator==(const DocumentGraph&) const = default;
};

enum class ViolationKind {
    id_key_mismatch,
    id_page_mismatch,
    page_out_of_range,
    bad_bbox,
    empty_summary,
    self_loop,
    dangling_edge,
    provenance_mismatch,
    community_missing_node,
    community_unknown_node,
    community_not_contiguous,
};

std::string to_string(ViolationKind kind);

// Violations are data, not faults: validate_graph never throws.
struct Violation {
    ViolationKind kind;
    std::string subject;  // offending node or edge id
    std::string detail;
};

std::vector<Violation> validate_graph(const DocumentGraph& graph);

// Running memory accumulated during sequential ingestion.
struct SectionEntry {
    std::string title;
    int depth = 1;
    NodeId start_node;

    bool operator==(const SectionEntry&) const = default;
};

struct UnresolvedRef {
    NodeId src;
    std::string target_description;

    bool operator==(const UnresolvedRef&) const = default;
};

struct RunningMemory {
    std::vector<SectionEntry> section_stack;
    std::map<std::string, std::vector<NodeId>> entities;  // name -> mentions
    std::vector<UnresolvedRef> unresolved_refs;
    std::vector<std::string> themes;

    // Pushing depth d pops all entries with depth >= d.
    void push_section(const std::string& title, int depth, NodeId start_node);

    // Highest page any entry points at; 0 for a fresh memory. Memory must
    // never reference a page beyond the last ingested one.
    int max_referenced_page() const;

    bool operator==(const RunningMemory&) const = default;
};

}  // namespace ladrag
