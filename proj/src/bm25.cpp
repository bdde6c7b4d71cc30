#include "ladrag/bm25.hpp"

#include <algorithm>
#include <cmath>

#include "ladrag/errors.hpp"
#include "ladrag/text.hpp"

namespace ladrag {

void sort_hits(std::vector<ScoredHit>& hits) {
    std::sort(hits.begin(), hits.end(), [](const ScoredHit& a, const ScoredHit& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.node < b.node;
    });
}

double bm25_idf(std::size_t corpus_size, std::size_t doc_freq) {
    const double n = static_cast<double>(corpus_size);
    const double df = static_cast<double>(doc_freq);
    return std::log(1.0 + (n - df + 0.5) / (df + 0.5));
}

Bm25Index build_bm25_index(const DocumentGraph& graph, double k1, double b) {
    Bm25Index index;
    index.doc_id = graph.doc_id;
    index.k1 = k1;
    index.b = b;

    long total_len = 0;
    for (const auto& [id, node] : graph.nodes) {
        const auto tokens = tokenize(node.summary);
        index.doc_lengths[id] = static_cast<int>(tokens.size());
        total_len += static_cast<long>(tokens.size());

        std::map<std::string, int> freqs;
        for (const auto& token : tokens) ++freqs[token];
        for (const auto& [term, tf] : freqs) {
            index.postings[term].emplace_back(id, tf);
        }
    }
    index.avgdl = index.doc_lengths.empty()
                      ? 0.0
                      : static_cast<double>(total_len) / static_cast<double>(index.doc_lengths.size());
    return index;
}

std::vector<ScoredHit> bm25_search(const Bm25Index& index, const std::string& query, int k) {
    if (k < 1) throw PreconditionError("bm25_search requires k >= 1");
    if (index.size() == 0) throw EmptyIndexError("bm25 index is empty");

    std::map<NodeId, double> scores;
    const std::size_t n = index.size();
    for (const auto& term : tokenize(query)) {
        auto it = index.postings.find(term);
        if (it == index.postings.end()) continue;
        const double idf = bm25_idf(n, it->second.size());
        for (const auto& [node, tf] : it->second) {
            const double dl = static_cast<double>(index.doc_lengths.at(node));
            const double denom =
                static_cast<double>(tf) +
                index.k1 * (1.0 - index.b + index.b * dl / index.avgdl);
            scores[node] += idf * (static_cast<double>(tf) * (index.k1 + 1.0)) / denom;
        }
    }

    std::vector<ScoredHit> hits;
    hits.reserve(scores.size());
    for (const auto& [node, score] : scores) hits.push_back({node, score});
    sort_hits(hits);
    if (hits.size() > static_cast<std::size_t>(k)) hits.resize(static_cast<std::size_t>(k));
    return hits;
}

}  // namespace ladrag
