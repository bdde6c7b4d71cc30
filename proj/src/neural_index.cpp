#include "ladrag/neural_index.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "ladrag/errors.hpp"
#include "ladrag/graph_io.hpp"

namespace ladrag {

using nlohmann::json;

namespace {

constexpr double kNormTolerance = 1e-6;

void check_unit_norms(const NeuralIndex& index) {
    for (const auto& [id, vec] : index.entries) {
        if (std::abs(vec.norm() - 1.0) > kNormTolerance) {
            throw ValidationError("index vector for " + id.str() + " is not unit norm");
        }
    }
}

}  // namespace

NeuralIndex build_neural_index(const DocumentGraph& graph, Gateway& gateway) {
    auto violations = validate_graph(graph);
    if (!violations.empty()) {
        throw ValidationError("cannot index an invalid graph (" +
                              std::to_string(violations.size()) + " violations, first: " +
                              to_string(violations.front().kind) + " " +
                              violations.front().subject + ")");
    }

    NeuralIndex index;
    index.doc_id = graph.doc_id;
    index.dimension = gateway.embedder().dimension();
    index.embedder_name = gateway.embedder().name();
    if (graph.nodes.empty()) return index;

    std::vector<NodeId> ids;
    std::vector<std::string> summaries;
    ids.reserve(graph.nodes.size());
    summaries.reserve(graph.nodes.size());
    for (const auto& [id, node] : graph.nodes) {
        ids.push_back(id);
        summaries.push_back(node.summary);
    }

    auto vectors = gateway.embed(summaries);
    for (std::size_t i = 0; i < ids.size(); ++i) {
        auto& v = vectors[i];
        const double norm = v.norm();
        if (norm > 0.0 && std::abs(norm - 1.0) > kNormTolerance) {
            for (double& x : v.values) x /= norm;
        }
        index.entries[ids[i]] = std::move(v);
    }
    check_unit_norms(index);
    return index;
}

std::vector<ScoredHit> semantic_search(const NeuralIndex& index, const std::string& query, int k,
                                       Gateway& gateway) {
    if (k < 1) throw PreconditionError("semantic_search requires k >= 1");
    if (index.size() == 0) throw EmptyIndexError("neural index is empty");
    if (gateway.embedder().dimension() != index.dimension ||
        gateway.embedder().name() != index.embedder_name) {
        throw ConfigError("gateway embedder (" + gateway.embedder().name() + "/" +
                          std::to_string(gateway.embedder().dimension()) +
                          ") does not match index (" + index.embedder_name + "/" +
                          std::to_string(index.dimension) + ")");
    }

    const EmbeddingVector query_vec = gateway.embed({query}).front();
    std::vector<ScoredHit> hits;
    hits.reserve(index.size());
    for (const auto& [id, vec] : index.entries) {
        hits.push_back({id, query_vec.dot(vec)});
    }
    sort_hits(hits);
    if (hits.size() > static_cast<std::size_t>(k)) hits.resize(static_cast<std::size_t>(k));
    return hits;
}

std::vector<int> page_topk(const std::vector<ScoredHit>& hits, const DocumentGraph& graph,
                           int k_pages) {
    std::map<int, double> best;
    for (const auto& hit : hits) {
        const GraphNode* node = graph.find(hit.node);
        const int page = node ? node->page : hit.node.page;
        auto [it, inserted] = best.emplace(page, hit.score);
        if (!inserted && hit.score > it->second) it->second = hit.score;
    }

    std::vector<std::pair<int, double>> pages(best.begin(), best.end());
    std::sort(pages.begin(), pages.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });

    std::vector<int> out;
    for (const auto& [page, score] : pages) {
        if (static_cast<int>(out.size()) >= k_pages) break;
        out.push_back(page);
    }
    return out;
}

void save_neural_index(const NeuralIndex& index, const std::filesystem::path& path) {
    json entries = json::object();
    for (const auto& [id, vec] : index.entries) {
        entries[id.str()] = vec.values;
    }
    const json j{
        {"doc_id", index.doc_id},
        {"dimension", index.dimension},
        {"embedder", index.embedder_name},
        {"entries", std::move(entries)},
    };
    write_file(path, j.dump());
}

NeuralIndex load_neural_index(const std::filesystem::path& path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw ParseError("index " + path.string() + ": " + e.what());
    }
    NeuralIndex index;
    try {
        index.doc_id = j.at("doc_id").get<std::string>();
        index.dimension = j.at("dimension").get<int>();
        index.embedder_name = j.at("embedder").get<std::string>();
        for (const auto& [key, value] : j.at("entries").items()) {
            EmbeddingVector v;
            v.values = value.get<std::vector<double>>();
            v.dimension = static_cast<int>(v.values.size());
            if (v.dimension != index.dimension) {
                throw ValidationError("index entry " + key + " has dimension " +
                                      std::to_string(v.dimension));
            }
            index.entries[NodeId::parse(key)] = std::move(v);
        }
    } catch (const json::exception& e) {
        throw ParseError("index " + path.string() + " shape: " + e.what());
    }
    check_unit_norms(index);
    return index;
}

}  // namespace ladrag
