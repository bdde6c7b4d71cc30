#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "ladrag/bm25.hpp"
#include "ladrag/gateway.hpp"
#include "ladrag/graph_model.hpp"

namespace ladrag {

// Dense index over node summaries. One unit-norm vector per graph node;
// searches must use the same embedder that built the index.
struct NeuralIndex {
    std::string doc_id;
    int dimension = 0;
    std::string embedder_name;
    std::map<NodeId, EmbeddingVector> entries;

    std::size_t size() const { return entries.size(); }
};

NeuralIndex build_neural_index(const DocumentGraph& graph, Gateway& gateway);

// Exact top-k by cosine similarity (dot product of unit vectors). Ties break
// by ascending NodeId. k greater than the index size returns everything.
std::vector<ScoredHit> semantic_search(const NeuralIndex& index, const std::string& query, int k,
                                       Gateway& gateway);

// Max-pooling element scores to pages: a page ranks by its best element.
// Ties break by ascending page number.
std::vector<int> page_topk(const std::vector<ScoredHit>& hits, const DocumentGraph& graph,
                           int k_pages);

void save_neural_index(const NeuralIndex& index, const std::filesystem::path& path);
NeuralIndex load_neural_index(const std::filesystem::path& path);

}  // namespace ladrag
