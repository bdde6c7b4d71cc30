#pragma once

#include <random>
#include <string>
#include <vector>

#include "ladrag/graph_model.hpp"

namespace ladrag::testsupport {

inline GraphNode make_node(int page, int index, ElementType type = ElementType::paragraph,
                           std::string summary = "", BoundingBox bbox = {0.1, 0.1, 0.9, 0.2}) {
    GraphNode node;
    node.id = NodeId{page, index};
    node.page = page;
    node.element_type = type;
    node.bbox = bbox;
    node.content = summary.empty() ? "content " + node.id.str() : summary;
    node.summary = summary.empty() ? "summary for " + node.id.str() : std::move(summary);
    return node;
}

inline GraphEdge make_edge(NodeId src, NodeId dst, EdgeType type) {
    GraphEdge edge;
    edge.src = src;
    edge.dst = dst;
    edge.edge_type = type;
    edge.provenance = src.page == dst.page ? Provenance::intra_page : Provenance::inter_page;
    return edge;
}

inline DocumentGraph make_graph(std::vector<GraphNode> nodes, std::vector<GraphEdge> edges,
                                const std::string& doc_id = "test") {
    DocumentGraph g;
    g.doc_id = doc_id;
    for (auto& node : nodes) {
        g.page_count = std::max(g.page_count, node.page);
        g.nodes.emplace(node.id, std::move(node));
    }
    g.edges = std::move(edges);
    return g;
}

// A single-page graph whose node i is NodeId{1, i}; edges given as index
// pairs. Handy for the Louvain fixtures.
inline DocumentGraph index_graph(int n, const std::vector<std::pair<int, int>>& edges) {
    std::vector<GraphNode> nodes;
    for (int i = 0; i < n; ++i) nodes.push_back(make_node(1, i));
    std::vector<GraphEdge> graph_edges;
    for (auto [a, b] : edges) {
        graph_edges.push_back(make_edge(NodeId{1, a}, NodeId{1, b}, EdgeType::refers_to));
    }
    return make_graph(std::move(nodes), std::move(graph_edges));
}

// Enumerates all set partitions of {0..n-1} as restricted growth strings and
// reports the maximum modularity over them. Independent of the Louvain code
// path: works directly on the index-pair edge list.
double brute_force_best_modularity(int n, const std::vector<std::pair<int, int>>& edges);
double brute_force_modularity(int n, const std::vector<std::pair<int, int>>& edges,
                              const std::vector<int>& assignment);

}  // namespace ladrag::testsupport
