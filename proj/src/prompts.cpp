#include "ladrag/prompts.hpp"

#include <map>
#include <sstream>

#include <json.hpp>

#include "ladrag/graph_io.hpp"

namespace ladrag {
namespace prompts {

using nlohmann::json;

std::string page_extraction_system() {
    return R"(You are a document layout analyst. You receive one page of a document as an image and must extract every visible element on it.

Respond with a single JSON array and nothing else. Each entry describes one element, in reading order:
{
  "element_type": one of "paragraph", "figure", "table", "chart", "section_header", "title", "footnote", "caption", "list", "other",
  "bbox": [x0, y0, x1, y1] with coordinates normalized to [0, 1], y growing downward,
  "content": the element's displayed text, or a faithful description for figures and charts,
  "summary": a self-contained sentence or two that makes the element fully interpretable without seeing the rest of the page,
  "visual_attributes": an object of string properties such as "font_size", "color", "emphasis"; include "header_level" ("1", "2", ...) for section headers when apparent
}

The summary must stand on its own: name the subject, do not use pronouns that depend on surrounding elements. Do not wrap the JSON in markdown fences.)";
}

std::string page_extraction_user(int page_number) {
    return "Extract all elements from page " + std::to_string(page_number) +
           ", which is attached as an image. Reply with the JSON array only.";
}

std::string memory_update_system() {
    return R"(You maintain the running memory of a document being read page by page. The memory tracks entities under discussion, references that have not been resolved yet, and high-level themes.

You receive the current memory and the elements of the newest page. Respond with a single JSON object and nothing else:
{
  "entities": {"entity name": ["node_id", ...]},        // new mentions to merge in
  "unresolved_refs_added": [{"src": "node_id", "target_description": "..."}],
  "unresolved_refs_resolved": [{"src": "node_id", "target_description": "..."}],
  "themes_added": ["..."]
}

Rules: node ids must come from the provided elements or the existing memory; never invent ids or point at pages that have not been read yet. Record an unresolved ref when an element mentions something that has not appeared (e.g. "see Figure 3" before Figure 3 exists). Report a resolution only when this page supplies the missing target. Use empty containers when nothing changed. No markdown fences.)";
}

std::string memory_update_user(const RunningMemory& memory,
                               const std::vector<GraphNode>& new_nodes) {
    json nodes = json::array();
    for (const auto& node : new_nodes) nodes.push_back(node_to_json(node));
    json j{
        {"memory", memory_to_json(memory)},
        {"new_page_elements", std::move(nodes)},
    };
    return "Update the memory for the newest page.\n" + j.dump(2);
}

std::string edge_extraction_system() {
    return R"(You link elements of the newest document page to the rest of the document. Reading-order, caption, and section edges are derived mechanically elsewhere; you only report two relation kinds:

- "refers_to": an element explicitly references another element (a paragraph citing a figure, a footnote pointing at a section, a mention resolving an earlier unresolved reference).
- "continues_on": an element is the direct continuation of an element on an earlier page (a list, table, or section spilling over a page break).

Respond with a single JSON array and nothing else:
[{"src": "node_id", "dst": "node_id", "relation": "refers_to" | "continues_on", "note": "short justification"}]

Both ids must name existing elements (the new page's elements or earlier nodes listed in the context). src is the referring/continuing element. Return [] when there is nothing to link. No markdown fences.)";
}

std::string edge_extraction_user(const RunningMemory& memory,
                                 const std::vector<GraphNode>& new_nodes,
                                 const DocumentGraph& graph_so_far) {
    json nodes = json::array();
    for (const auto& node : new_nodes) nodes.push_back(node_to_json(node));

    // Earlier nodes, compact: id, page, type, first part of the summary.
    json earlier = json::array();
    for (const auto& [id, node] : graph_so_far.nodes) {
        bool is_new = false;
        for (const auto& n : new_nodes) {
            if (n.id == id) {
                is_new = true;
                break;
            }
        }
        if (is_new) continue;
        earlier.push_back({
            {"id", id.str()},
            {"page", node.page},
            {"element_type", to_string(node.element_type)},
            {"summary", node.summary.substr(0, 200)},
        });
    }

    json j{
        {"memory", memory_to_json(memory)},
        {"new_page_elements", std::move(nodes)},
        {"earlier_nodes", std::move(earlier)},
    };
    return "Report refers_to and continues_on relations for the newest page.\n" + j.dump(2);
}

std::string agent_system(const DocumentGraph& graph, bool enable_graph_query,
                         bool enable_contextualize, int max_traverse_depth) {
    std::map<std::string, int> type_counts;
    for (const auto& [id, node] : graph.nodes) ++type_counts[to_string(node.element_type)];
    json stats{
        {"doc_id", graph.doc_id},
        {"page_count", graph.page_count},
        {"node_count", graph.nodes.size()},
        {"edge_count", graph.edges.size()},
        {"element_types", json(type_counts)},
    };
    if (graph.communities) {
        int communities = 0;
        for (const auto& [id, c] : graph.communities->assignment) {
            communities = std::max(communities, c + 1);
        }
        stats["community_count"] = communities;
    }

    std::ostringstream out;
    out << R"(You are a retrieval agent gathering evidence from a document to answer a question. The document was indexed two ways: a dense semantic index over element summaries, and a document graph whose nodes are page elements (with type, page, content, layout) and whose edges capture references, section membership, cross-page continuations, captions, and reading order.

Document statistics:
)" << stats.dump(2)
        << R"(

You interact by emitting exactly one JSON object per turn, no other text, no markdown fences:
{"tool": "<tool name>", "args": {...}}

Available tools:
)";
    out << R"(- neuro_semantic_search: {"query": "free text", "k": <integer, at least 1>}
  Returns the k elements whose summaries are most similar to the query.
)";
    if (enable_graph_query) {
        out << R"(- symbolic_graph_query: {"query": {"filters": [...], "traverse": {...}, "limit": <int>}}
  Structured search over the document graph. Filters (ANDed):
    {"field": "element_type", "in": ["figure", "table", "chart", "paragraph", "section_header", "title", "footnote", "caption", "list", "other"]}
    {"field": "page", "min": <int>, "max": <int>}
    {"field": "content", "contains": "substring"}  or  {"field": "content", "regex": "pattern"}
    {"field": "visual_attributes", "key": "...", "value": "..."}
  Optional traverse expands the filtered set along edges:
    {"edge_type": "refers_to" | "same_section" | "continues_on" | "caption_of" | "reading_order_next" (omit for any), "direction": "out" | "in" | "both", "depth": 1..)"
            << max_traverse_depth << R"(}
  At least one filter or a traverse clause is required.
)";
    }
    if (enable_contextualize) {
        out << R"(- contextualize: {"node": "node_id"}
  Expands a node into its structurally related group: its graph community plus direct section/continuation neighbors. Use it when evidence likely spans adjacent elements or pages (sections continuing across page breaks, figure groups).
)";
    }
    out << R"(- finish: {"evidence": ["node_id", ...], "rationale": "why this set is sufficient"}
  Ends retrieval. List every element needed to answer the question; only ids already seen in tool results are accepted.

Strategy: plan first. Choose semantic search for topical questions, the graph for structural ones (counting figures, locating sections, following references), and combine them when the question needs both. Keep issuing tool calls until the evidence is complete but not bloated, then call finish.)";
    return out.str();
}

std::string repair_notice(const std::string& reason) {
    return "Your previous reply could not be used: " + reason +
           ". Reply again with exactly one valid JSON value in the requested shape, with no "
           "surrounding text and no markdown fences.";
}

}  // namespace prompts
}  // namespace ladrag
