#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "ladrag/agent.hpp"
#include "ladrag/graph_model.hpp"
#include "ladrag/neural_index.hpp"

namespace ladrag {

struct QaRecord {
    std::string question_id;
    std::string doc_id;
    std::string question;
    std::set<int> evidence_pages;  // gold P
    std::vector<std::string> evidence_sources;
    std::string answer;
};

struct EvalRecord {
    std::string question_id;
    std::string retriever_name;
    std::vector<int> retrieved_pages;  // sorted
    int pr = 0;
    double ipr = 0.0;
    long llm_calls = 0;
    long tokens = 0;
};

// PR = 1 iff gold is a subset of retrieved. Empty gold counts as recalled
// (vacuous subset).
int perfect_recall(const std::set<int>& gold, const std::set<int>& retrieved);

// IPR = |retrieved \ gold| / |retrieved|; 0 when nothing was retrieved.
double irrelevant_pages_ratio(const std::set<int>& gold, const std::set<int>& retrieved);

// mean(PR) / mean(IPR); +infinity when mean IPR is 0 (rendered as "inf" in
// reports). PreconditionError on empty input.
double composite_ratio(const std::vector<EvalRecord>& records);

std::vector<QaRecord> load_dataset(const std::filesystem::path& path);  // JSONL

// Graph/index lookup by doc_id inside a directory laid out as
// <dir>/<doc_id>.graph.json and <dir>/<doc_id>.idx.json.
class ArtifactStore {
public:
    explicit ArtifactStore(std::filesystem::path dir) : dir_(std::move(dir)) {}

    const DocumentGraph& graph(const std::string& doc_id);
    const NeuralIndex& index(const std::string& doc_id);

    void put(const std::string& doc_id, DocumentGraph graph, NeuralIndex index);

private:
    std::filesystem::path dir_;
    std::map<std::string, DocumentGraph> graphs_;
    std::map<std::string, NeuralIndex> indices_;
};

enum class BaselineRetriever { bm25, dense };

BaselineRetriever baseline_from_label(const std::string& label);

// Fixed top-k page retrieval for one question under a baseline retriever:
// score every node, pool to pages by best element, take the first k pages.
std::vector<int> baseline_retrieve_pages(BaselineRetriever retriever, const QaRecord& record,
                                         const DocumentGraph& graph, const NeuralIndex& index,
                                         Gateway& gateway, int k);

struct SweepPoint {
    int k = 0;
    double mean_pr = 0.0;
    double mean_ipr = 0.0;
};

// PR/IPR means for k = 1..k_max. Mean PR is non-decreasing in k.
std::vector<SweepPoint> sweep_topk(const std::vector<QaRecord>& dataset, ArtifactStore& store,
                                   BaselineRetriever retriever, int k_max, Gateway& gateway);

struct RetrieverSpec {
    std::string name = "bm25";  // ladrag | bm25 | dense | oracle
    int top_k = 5;
    AgentConfig agent;
};

struct EvalSummary {
    std::string retriever_name;
    int questions = 0;
    double mean_pr = 0.0;
    double mean_ipr = 0.0;
    double composite = 0.0;  // +inf encodes the zero-noise sentinel
    double mean_llm_calls = 0.0;
    long total_tokens = 0;
    std::map<std::string, int> call_histogram;   // llm calls per query, bucketed
    std::map<std::string, int> token_histogram;  // completion tokens per call, bucketed

    nlohmann::json to_json() const;
};

std::string token_bucket(long completion_tokens);  // "<50", "50-99", "100-499", ">=500"

// Runs every question, writes <out_dir>/records.jsonl and
// <out_dir>/summary.json. Deterministic byte-for-byte given identical inputs
// and a replayed/scripted gateway.
EvalSummary run_eval(const std::vector<QaRecord>& dataset, ArtifactStore& store,
                     const RetrieverSpec& spec, Gateway& gateway,
                     const std::filesystem::path& out_dir);

}  // namespace ladrag
