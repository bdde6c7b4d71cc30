#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ladrag/gateway.hpp"
#include "ladrag/graph_model.hpp"
#include "ladrag/louvain.hpp"
#include "ladrag/neural_index.hpp"

namespace ladrag {

// One page of input: either a rendered image for the model to parse, or
// pre-extracted elements (ids unassigned) that bypass the model entirely.
struct PageInput {
    int page_number = 1;
    std::optional<std::string> image;
    std::optional<std::vector<GraphNode>> pre_extracted;

    bool valid() const { return image.has_value() != pre_extracted.has_value(); }
};

struct IngestionReport {
    std::string doc_id;
    int pages_processed = 0;
    int nodes_created = 0;
    std::map<EdgeType, int> edges_created;
    long llm_calls = 0;
    std::vector<std::string> warnings;
};

struct IngestionOptions {
    bool fail_fast = false;    // default: skip a failed page and record a warning
    bool build_index = true;   // embed node summaries into a neural index
    LouvainOptions louvain;
};

struct IngestionResult {
    DocumentGraph graph;
    IngestionReport report;
    std::optional<NeuralIndex> index;
};

// Extracts the page's elements and assigns ids p{page}_e{i} in reading
// order. Pre-extracted pages skip the model. PageParseError when the model
// output stays unparseable after one repair retry.
std::vector<GraphNode> parse_page(const PageInput& page, Gateway& gateway);

// Folds a page's nodes into the running memory: the section stack follows
// section_header nodes (rule-based); entities, unresolved refs, and themes
// come from the model when a chat backend is available. Memory never points
// at pages beyond the newest one.
RunningMemory update_memory(const RunningMemory& memory, const std::vector<GraphNode>& new_nodes,
                            Gateway& gateway);

struct EdgeExtraction {
    std::vector<GraphEdge> edges;
    std::vector<std::string> warnings;
};

// Rule-based intra-page structure plus model-reported refers_to /
// continues_on relations:
//   - reading_order_next chains consecutive nodes on the page
//   - caption_of links a caption to the nearest figure/table/chart above it
//   - same_section links each node to the section header currently in scope
//     (the page's own headers as they appear, else the stack top from earlier
//     pages, which yields inter-page section edges)
// `memory` is the state before this page; edges with unmappable relation
// labels or invalid endpoints are dropped into warnings.
EdgeExtraction extract_edges(const RunningMemory& memory, const std::vector<GraphNode>& new_nodes,
                             const DocumentGraph& graph_so_far, Gateway& gateway);

// Full sequential pass: parse, link, remember, then community detection and
// (optionally) neural indexing. Pages must be strictly ascending starting at
// page 1. Without a chat backend the pipeline is fully rule-based and
// deterministic for pre-extracted input.
IngestionResult ingest_document(const std::string& doc_id, const std::vector<PageInput>& pages,
                                Gateway& gateway, const IngestionOptions& options = {});

// Pre-extracted input file: a JSON array of pages, each an array of element
// objects shaped like GraphNode minus the id.
std::vector<PageInput> load_pre_extracted(const std::filesystem::path& path);

// Section header depth: explicit "header_level" attribute wins; otherwise
// font size bands (>=20 depth 1, >=14 depth 2, else 3); missing data means
// depth 1 (shallowest).
int infer_section_depth(const GraphNode& node);

}  // namespace ladrag
