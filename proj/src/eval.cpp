#include "ladrag/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "ladrag/bm25.hpp"
#include "ladrag/errors.hpp"
#include "ladrag/graph_io.hpp"

namespace ladrag {

using nlohmann::json;

int perfect_recall(const std::set<int>& gold, const std::set<int>& retrieved) {
    return std::includes(retrieved.begin(), retrieved.end(), gold.begin(), gold.end()) ? 1 : 0;
}

double irrelevant_pages_ratio(const std::set<int>& gold, const std::set<int>& retrieved) {
    if (retrieved.empty()) return 0.0;
    std::size_t irrelevant = 0;
    for (int page : retrieved) {
        if (!gold.contains(page)) ++irrelevant;
    }
    return static_cast<double>(irrelevant) / static_cast<double>(retrieved.size());
}

double composite_ratio(const std::vector<EvalRecord>& records) {
    if (records.empty()) throw PreconditionError("composite_ratio requires at least one record");
    double pr_sum = 0.0;
    double ipr_sum = 0.0;
    for (const auto& r : records) {
        pr_sum += r.pr;
        ipr_sum += r.ipr;
    }
    const double n = static_cast<double>(records.size());
    const double mean_ipr = ipr_sum / n;
    if (mean_ipr == 0.0) return std::numeric_limits<double>::infinity();
    return (pr_sum / n) / mean_ipr;
}

std::vector<QaRecord> load_dataset(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open dataset " + path.string());
    std::vector<QaRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ParseError("dataset " + path.string() + " line " + std::to_string(line_no) +
                             ": " + e.what());
        }
        QaRecord r;
        r.question_id = j.at("question_id").get<std::string>();
        r.doc_id = j.at("doc_id").get<std::string>();
        r.question = j.at("question").get<std::string>();
        for (const auto& p : j.at("evidence_pages")) r.evidence_pages.insert(p.get<int>());
        if (j.contains("evidence_sources")) {
            r.evidence_sources = j.at("evidence_sources").get<std::vector<std::string>>();
        }
        r.answer = j.value("answer", std::string{});
        records.push_back(std::move(r));
    }
    return records;
}

const DocumentGraph& ArtifactStore::graph(const std::string& doc_id) {
    auto it = graphs_.find(doc_id);
    if (it != graphs_.end()) return it->second;
    const auto path = dir_ / (doc_id + ".graph.json");
    if (!std::filesystem::exists(path)) {
        throw IoError("missing graph for doc_id \"" + doc_id + "\" (expected " + path.string() +
                      ")");
    }
    return graphs_.emplace(doc_id, load_graph(path)).first->second;
}

const NeuralIndex& ArtifactStore::index(const std::string& doc_id) {
    auto it = indices_.find(doc_id);
    if (it != indices_.end()) return it->second;
    const auto path = dir_ / (doc_id + ".idx.json");
    if (!std::filesystem::exists(path)) {
        throw IoError("missing index for doc_id \"" + doc_id + "\" (expected " + path.string() +
                      ")");
    }
    return indices_.emplace(doc_id, load_neural_index(path)).first->second;
}

void ArtifactStore::put(const std::string& doc_id, DocumentGraph graph, NeuralIndex index) {
    graphs_[doc_id] = std::move(graph);
    indices_[doc_id] = std::move(index);
}

BaselineRetriever baseline_from_label(const std::string& label) {
    if (label == "bm25") return BaselineRetriever::bm25;
    if (label == "dense") return BaselineRetriever::dense;
    throw ConfigError("unknown baseline retriever \"" + label + "\" (expected bm25 or dense)");
}

namespace {

void check_gold_pages(const QaRecord& qa, const DocumentGraph& graph) {
    for (int page : qa.evidence_pages) {
        if (page < 1 || page > graph.page_count) {
            throw ValidationError("question " + qa.question_id + " names evidence page " +
                                  std::to_string(page) + " outside [1, " +
                                  std::to_string(graph.page_count) + "] of doc \"" + qa.doc_id +
                                  "\"");
        }
    }
}

}  // namespace

std::vector<int> baseline_retrieve_pages(BaselineRetriever retriever, const QaRecord& record,
                                         const DocumentGraph& graph, const NeuralIndex& index,
                                         Gateway& gateway, int k) {
    if (k < 1) throw PreconditionError("top-k retrieval requires k >= 1");
    const int all = static_cast<int>(graph.nodes.size());
    if (all == 0) return {};

    std::vector<ScoredHit> hits;
    if (retriever == BaselineRetriever::bm25) {
        const Bm25Index bm25 = build_bm25_index(graph);
        hits = bm25_search(bm25, record.question, all);
    } else {
        hits = semantic_search(index, record.question, all, gateway);
    }
    return page_topk(hits, graph, k);
}

std::vector<SweepPoint> sweep_topk(const std::vector<QaRecord>& dataset, ArtifactStore& store,
                                   BaselineRetriever retriever, int k_max, Gateway& gateway) {
    if (k_max < 1) throw PreconditionError("sweep requires k_max >= 1");
    if (dataset.empty()) throw PreconditionError("sweep requires a non-empty dataset");

    std::vector<SweepPoint> curve;
    for (int k = 1; k <= k_max; ++k) {
        double pr_sum = 0.0;
        double ipr_sum = 0.0;
        for (const auto& record : dataset) {
            const auto& graph = store.graph(record.doc_id);
            const auto& index = store.index(record.doc_id);
            check_gold_pages(record, graph);
            const auto pages = baseline_retrieve_pages(retriever, record, graph, index, gateway, k);
            const std::set<int> retrieved(pages.begin(), pages.end());
            pr_sum += perfect_recall(record.evidence_pages, retrieved);
            ipr_sum += irrelevant_pages_ratio(record.evidence_pages, retrieved);
        }
        const double n = static_cast<double>(dataset.size());
        curve.push_back({k, pr_sum / n, ipr_sum / n});
    }
    return curve;
}

std::string token_bucket(long completion_tokens) {
    if (completion_tokens < 50) return "<50";
    if (completion_tokens < 100) return "50-99";
    if (completion_tokens < 500) return "100-499";
    return ">=500";
}

json EvalSummary::to_json() const {
    json j{
        {"retriever", retriever_name},
        {"questions", questions},
        {"mean_pr", mean_pr},
        {"mean_ipr", mean_ipr},
        {"mean_llm_calls", mean_llm_calls},
        {"total_tokens", total_tokens},
        {"llm_call_histogram", json(call_histogram)},
        {"token_histogram", json(token_histogram)},
    };
    if (std::isinf(composite)) {
        j["composite_ratio"] = "inf";
    } else {
        j["composite_ratio"] = composite;
    }
    return j;
}

EvalSummary run_eval(const std::vector<QaRecord>& dataset, ArtifactStore& store,
                     const RetrieverSpec& spec, Gateway& gateway,
                     const std::filesystem::path& out_dir) {
    if (dataset.empty()) throw PreconditionError("run_eval requires a non-empty dataset");

    std::vector<EvalRecord> records;
    std::map<std::string, int> summary_token_histogram;
    for (const auto& qa : dataset) {
        const auto& graph = store.graph(qa.doc_id);
        check_gold_pages(qa, graph);

        EvalRecord record;
        record.question_id = qa.question_id;
        record.retriever_name = spec.name;

        std::set<int> retrieved;
        if (spec.name == "oracle") {
            retrieved = qa.evidence_pages;
        } else if (spec.name == "ladrag") {
            const auto& index = store.index(qa.doc_id);
            const RetrievalResult result = retrieve(qa.question, graph, index, gateway, spec.agent);
            retrieved.insert(result.evidence_pages.begin(), result.evidence_pages.end());
            record.llm_calls = result.llm_calls;
            record.tokens = result.tokens_generated;
            for (long tokens : instrument(result).tokens_per_call) {
                ++summary_token_histogram[token_bucket(tokens)];
            }
        } else if (spec.name == "bm25" || spec.name == "dense") {
            const auto& index = store.index(qa.doc_id);
            const auto pages = baseline_retrieve_pages(baseline_from_label(spec.name), qa, graph,
                                                       index, gateway, spec.top_k);
            retrieved.insert(pages.begin(), pages.end());
        } else {
            throw ConfigError("unknown retriever \"" + spec.name +
                              "\" (expected ladrag, bm25, dense, or oracle)");
        }

        record.retrieved_pages.assign(retrieved.begin(), retrieved.end());
        record.pr = perfect_recall(qa.evidence_pages, retrieved);
        record.ipr = irrelevant_pages_ratio(qa.evidence_pages, retrieved);
        records.push_back(std::move(record));
    }

    EvalSummary summary;
    summary.retriever_name = spec.name;
    summary.token_histogram = std::move(summary_token_histogram);
    summary.questions = static_cast<int>(records.size());
    for (const auto& r : records) {
        summary.mean_pr += r.pr;
        summary.mean_ipr += r.ipr;
        summary.mean_llm_calls += static_cast<double>(r.llm_calls);
        summary.total_tokens += r.tokens;
        ++summary.call_histogram[call_count_bucket(r.llm_calls)];
    }
    const double n = static_cast<double>(records.size());
    summary.mean_pr /= n;
    summary.mean_ipr /= n;
    summary.mean_llm_calls /= n;
    summary.composite = composite_ratio(records);

    std::ostringstream lines;
    for (const auto& r : records) {
        lines << json{{"question_id", r.question_id},
                      {"retriever", r.retriever_name},
                      {"retrieved_pages", r.retrieved_pages},
                      {"pr", r.pr},
                      {"ipr", r.ipr},
                      {"llm_calls", r.llm_calls},
                      {"tokens", r.tokens}}
                     .dump()
              << "\n";
    }
    write_file(out_dir / "records.jsonl", lines.str());
    write_file(out_dir / "summary.json", summary.to_json().dump(2) + "\n");
    return summary;
}

}  // namespace ladrag
