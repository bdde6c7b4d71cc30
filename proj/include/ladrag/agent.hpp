#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ladrag/gateway.hpp"
#include "ladrag/graph_model.hpp"
#include "ladrag/graph_query.hpp"
#include "ladrag/neural_index.hpp"

namespace ladrag {

enum class ToolKind { neuro_semantic_search, symbolic_graph_query, contextualize, finish };

std::string to_string(ToolKind tool);

struct ToolCall {
    ToolKind tool = ToolKind::finish;
    nlohmann::json args;

    // Parses one assistant turn: exactly one JSON object
    // {"tool": ..., "args": {...}} with schema-checked args. Throws ParseError.
    static ToolCall parse(const std::string& content);
};

struct AgentConfig {
    int max_rounds = 20;
    long context_window_tokens = 128000;
    double context_fill_ratio = 0.8;
    bool enable_contextualize = true;
    bool enable_graph_query = true;
    int max_traverse_depth = kDefaultMaxTraverseDepth;
    int summary_truncate_chars = 300;
    // chars/4 by default; swap in a real tokenizer here if one is available.
    std::function<long(std::string_view)> token_estimator = estimate_tokens;

    bool valid() const {
        return max_rounds >= 1 && context_fill_ratio > 0.0 && context_fill_ratio <= 1.0 &&
               context_window_tokens > 0 && token_estimator != nullptr;
    }
};

enum class Termination { agent_finished, max_rounds, context_budget };

std::string to_string(Termination termination);

enum class StepStatus { executed, rejected_disabled, malformed, finished };

std::string to_string(StepStatus status);

struct TraceStep {
    int round = 0;
    std::optional<ToolCall> call;  // empty when the turn was malformed
    StepStatus status = StepStatus::executed;
    std::string result_summary;  // what was fed back to the model
    long prompt_tokens = 0;      // estimated prompt size when the call was issued
    long completion_tokens = 0;
};

struct RetrievalResult {
    std::vector<NodeId> evidence_nodes;  // sorted, unique
    std::vector<int> evidence_pages;     // sorted, unique
    std::vector<TraceStep> trace;        // one entry per model call
    long llm_calls = 0;
    long tokens_generated = 0;
    Termination termination = Termination::agent_finished;
    std::map<std::string, int> dispatch_counts;  // executed tool calls, for audit
    std::vector<std::string> warnings;

    nlohmann::json to_json() const;
};

// Executes one tool call against the indices. Tool errors come back as
// structured {"error": ...} JSON, never as exceptions, so the loop stays
// alive. Results are compact: node id, page, truncated summary, score where
// applicable.
nlohmann::json dispatch(const ToolCall& call, const DocumentGraph& graph,
                        const NeuralIndex& index, Gateway& gateway, const AgentConfig& config);

// The retrieval loop: system prompt (tool schemas, graph statistics, query
// DSL) + question, then one tool call per model turn until finish, the round
// limit, or the context budget. Evidence on forced termination is everything
// gathered so far; finish keeps only ids that appeared in prior tool results.
RetrievalResult retrieve(const std::string& question, const DocumentGraph& graph,
                         const NeuralIndex& index, Gateway& gateway,
                         const AgentConfig& config = {});

struct CallStats {
    long llm_calls = 0;
    std::string calls_bucket;  // "0-1", "2-5", "6-10", "11-20", ">20"
    std::vector<long> tokens_per_call;
    bool all_calls_under_100_tokens = true;
    std::vector<std::string> warnings;
};

CallStats instrument(const RetrievalResult& result);
std::string call_count_bucket(long llm_calls);

}  // namespace ladrag
