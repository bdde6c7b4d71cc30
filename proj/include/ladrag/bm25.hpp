#pragma once

#include <map>
#include <string>
#include <vector>

#include "ladrag/graph_model.hpp"

namespace ladrag {

// Hits are sorted by score descending, ties broken by ascending NodeId.
struct ScoredHit {
    NodeId node;
    double score = 0.0;

    bool operator==(const ScoredHit&) const = default;
};

void sort_hits(std::vector<ScoredHit>& hits);

inline constexpr double kBm25K1 = 1.5;
inline constexpr double kBm25B = 0.75;

// Okapi BM25 over node summaries. Tokenizer: lowercase, split on
// non-alphanumerics, drop empties (see text.hpp).
struct Bm25Index {
    std::string doc_id;
    double k1 = kBm25K1;
    double b = kBm25B;
    std::map<std::string, std::vector<std::pair<NodeId, int>>> postings;  // term -> (node, tf)
    std::map<NodeId, int> doc_lengths;
    double avgdl = 0.0;

    std::size_t size() const { return doc_lengths.size(); }
};

// IDF(t) = ln(1 + (N - df + 0.5) / (df + 0.5))
double bm25_idf(std::size_t corpus_size, std::size_t doc_freq);

Bm25Index build_bm25_index(const DocumentGraph& graph, double k1 = kBm25K1, double b = kBm25B);

// Score summed over query token occurrences; only nodes matching at least
// one term are returned. EmptyIndexError on an empty index, PreconditionError
// for k < 1.
std::vector<ScoredHit> bm25_search(const Bm25Index& index, const std::string& query, int k);

}  // namespace ladrag
