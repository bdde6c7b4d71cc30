#include "ladrag/graph_model.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>

#include "ladrag/errors.hpp"

namespace ladrag {

namespace {

std::string normalize_label(const std::string& label) {
    std::string out;
    out.reserve(label.size());
    for (char c : label) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        } else if (!out.empty() && out.back() != '_') {
            out.push_back('_');
        }
    }
    while (!out.empty() && out.back() == '_') out.pop_back();
    return out;
}

}  // namespace

std::optional<NodeId> NodeId::try_parse(const std::string& text) {
    // "p{page}_e{index}", page >= 1, index >= 0, no leading zeros padding rules
    if (text.size() < 4 || text[0] != 'p') return std::nullopt;
    auto sep = text.find("_e");
    if (sep == std::string::npos || sep == 1) return std::nullopt;
    int page = 0;
    int index = 0;
    const char* first = text.data() + 1;
    const char* last = text.data() + sep;
    auto r1 = std::from_chars(first, last, page);
    if (r1.ec != std::errc() || r1.ptr != last) return std::nullopt;
    first = text.data() + sep + 2;
    last = text.data() + text.size();
    if (first == last) return std::nullopt;
    auto r2 = std::from_chars(first, last, index);
    if (r2.ec != std::errc() || r2.ptr != last) return std::nullopt;
    if (page < 1 || index < 0) return std::nullopt;
    return NodeId{page, index};
}

NodeId NodeId::parse(const std::string& text) {
    auto id = try_parse(text);
    if (!id) throw ParseError("invalid node id: \"" + text + "\"");
    return *id;
}

std::string NodeId::str() const {
    return "p" + std::to_string(page) + "_e" + std::to_string(index);
}

ElementType element_type_from_label(const std::string& label) {
    const std::string n = normalize_label(label);
    if (n == "paragraph" || n == "text" || n == "text_block") return ElementType::paragraph;
    if (n == "figure" || n == "image" || n == "picture" || n == "photo") return ElementType::figure;
    if (n == "table") return ElementType::table;
    if (n == "chart" || n == "graph" || n == "plot" || n == "diagram") return ElementType::chart;
    if (n == "section_header" || n == "header" || n == "heading" || n == "subheading" ||
        n == "section_title" || n == "subsection_header")
        return ElementType::section_header;
    if (n == "title" || n == "document_title") return ElementType::title;
    if (n == "footnote") return ElementType::footnote;
    if (n == "caption" || n == "figure_caption" || n == "table_caption") return ElementType::caption;
    if (n == "list" || n == "list_item" || n == "bullet_list") return ElementType::list;
    return ElementType::other;
}

std::string to_string(ElementType type) {
    switch (type) {
        case ElementType::paragraph: return "paragraph";
        case ElementType::figure: return "figure";
        case ElementType::table: return "table";
        case ElementType::chart: return "chart";
        case ElementType::section_header: return "section_header";
        case ElementType::title: return "title";
        case ElementType::footnote: return "footnote";
        case ElementType::caption: return "caption";
        case ElementType::list: return "list";
        case ElementType::other: return "other";
    }
    return "other";
}

const std::vector<ElementType>& all_element_types() {
    static const std::vector<ElementType> kTypes = {
        ElementType::paragraph, ElementType::figure,         ElementType::table,
        ElementType::chart,     ElementType::section_header, ElementType::title,
        ElementType::footnote,  ElementType::caption,        ElementType::list,
        ElementType::other,
    };
    return kTypes;
}

std::optional<EdgeType> edge_type_from_label(const std::string& label) {
    const std::string n = normalize_label(label);
    if (n == "refers_to" || n == "reference" || n == "references" || n == "refers" ||
        n == "referenced_by" || n == "mentions" || n == "cites")
        return EdgeType::refers_to;
    if (n == "same_section" || n == "in_section" || n == "section_member" || n == "belongs_to_section")
        return EdgeType::same_section;
    if (n == "continues_on" || n == "continues" || n == "continuation" || n == "continued_on" ||
        n == "cross_page_continuation" || n == "continuation_of")
        return EdgeType::continues_on;
    if (n == "caption_of" || n == "caption" || n == "captioned_by" || n == "captions")
        return EdgeType::caption_of;
    if (n == "reading_order_next" || n == "reading_order" || n == "next" || n == "follows")
        return EdgeType::reading_order_next;
    return std::nullopt;
}

std::string to_string(EdgeType type) {
    switch (type) {
        case EdgeType::refers_to: return "refers_to";
        case EdgeType::same_section: return "same_section";
        case EdgeType::continues_on: return "continues_on";
        case EdgeType::caption_of: return "caption_of";
        case EdgeType::reading_order_next: return "reading_order_next";
    }
    return "refers_to";
}

const std::vector<EdgeType>& all_edge_types() {
    static const std::vector<EdgeType> kTypes = {
        EdgeType::refers_to,  EdgeType::same_section,       EdgeType::continues_on,
        EdgeType::caption_of, EdgeType::reading_order_next,
    };
    return kTypes;
}

std::string to_string(Provenance p) {
    return p == Provenance::intra_page ? "intra_page" : "inter_page";
}

bool BoundingBox::valid() const {
    auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
    return in_unit(x0) && in_unit(y0) && in_unit(x1) && in_unit(y1) && x0 <= x1 && y0 <= y1;
}

const GraphNode* DocumentGraph::find(const NodeId& id) const {
    auto it = nodes.find(id);
    return it == nodes.end() ? nullptr : &it->second;
}

std::string to_string(ViolationKind kind) {
    switch (kind) {
        case ViolationKind::id_key_mismatch: return "id_key_mismatch";
        case ViolationKind::id_page_mismatch: return "id_page_mismatch";
        case ViolationKind::page_out_of_range: return "page_out_of_range";
        case ViolationKind::bad_bbox: return "bad_bbox";
        case ViolationKind::empty_summary: return "empty_summary";
        case ViolationKind::self_loop: return "self_loop";
        case ViolationKind::dangling_edge: return "dangling_edge";
        case ViolationKind::provenance_mismatch: return "provenance_mismatch";
        case ViolationKind::community_missing_node: return "community_missing_node";
        case ViolationKind::community_unknown_node: return "community_unknown_node";
        case ViolationKind::community_not_contiguous: return "community_not_contiguous";
    }
    return "unknown";
}

std::vector<Violation> validate_graph(const DocumentGraph& graph) {
    std::vector<Violation> out;

    for (const auto& [key, node] : graph.nodes) {
        const std::string id = node.id.str();
        if (key != node.id) {
            out.push_back({ViolationKind::id_key_mismatch, id,
                           "node stored under key " + key.str()});
        }
        if (node.id.page != node.page) {
            out.push_back({ViolationKind::id_page_mismatch, id,
                           "id encodes page " + std::to_string(node.id.page) +
                               " but node.page is " + std::to_string(node.page)});
        }
        if (node.page < 1 || node.page > graph.page_count) {
            out.push_back({ViolationKind::page_out_of_range, id,
                           "page " + std::to_string(node.page) + " outside [1, " +
                               std::to_string(graph.page_count) + "]"});
        }
        if (!node.bbox.valid()) {
            out.push_back({ViolationKind::bad_bbox, id, "bbox coordinates invalid"});
        }
        if (node.summary.empty()) {
            out.push_back({ViolationKind::empty_summary, id, "summary must be non-empty"});
        }
    }

    for (const auto& edge : graph.edges) {
        const std::string edge_name = edge.src.str() + "->" + edge.dst.str();
        if (edge.src == edge.dst) {
            out.push_back({ViolationKind::self_loop, edge_name, "src equals dst"});
            continue;
        }
        const GraphNode* src = graph.find(edge.src);
        const GraphNode* dst = graph.find(edge.dst);
        if (!src) {
            out.push_back({ViolationKind::dangling_edge, edge.src.str(),
                           "edge " + edge_name + " references missing src"});
        }
        if (!dst) {
            out.push_back({ViolationKind::dangling_edge, edge.dst.str(),
                           "edge " + edge_name + " references missing dst"});
        }
        if (src && dst) {
            const bool crosses = src->page != dst->page;
            const bool marked_inter = edge.provenance == Provenance::inter_page;
            if (crosses != marked_inter) {
                out.push_back({ViolationKind::provenance_mismatch, edge_name,
                               "provenance " + to_string(edge.provenance) +
                                   " does not match page span"});
            }
        }
    }

    if (graph.communities) {
        const auto& assignment = graph.communities->assignment;
        std::set<int> indices;
        for (const auto& [id, community] : assignment) {
            indices.insert(community);
            if (!graph.has_node(id)) {
                out.push_back({ViolationKind::community_unknown_node, id.str(),
                               "community assignment for a node not in the graph"});
            }
        }
        for (const auto& [id, node] : graph.nodes) {
            if (!assignment.contains(id)) {
                out.push_back({ViolationKind::community_missing_node, id.str(),
                               "node has no community assignment"});
            }
        }
        int expected = 0;
        for (int index : indices) {
            if (index != expected++) {
                out.push_back({ViolationKind::community_not_contiguous, std::to_string(index),
                               "community indices must be contiguous from 0"});
                break;
            }
        }
    }

    return out;
}

void RunningMemory::push_section(const std::string& title, int depth, NodeId start_node) {
    while (!section_stack.empty() && section_stack.back().depth >= depth) {
        section_stack.pop_back();
    }
    section_stack.push_back({title, depth, start_node});
}

int RunningMemory::max_referenced_page() const {
    int page = 0;
    for (const auto& entry : section_stack) page = std::max(page, entry.start_node.page);
    for (const auto& [name, mentions] : entities) {
        for (const auto& id : mentions) page = std::max(page, id.page);
    }
    for (const auto& ref : unresolved_refs) page = std::max(page, ref.src.page);
    return page;
}

}  // namespace ladrag
