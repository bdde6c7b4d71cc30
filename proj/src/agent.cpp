#include "ladrag/agent.hpp"

#include <algorithm>
#include <set>

#include "ladrag/errors.hpp"
#include "ladrag/prompts.hpp"
#include "ladrag/text.hpp"

namespace ladrag {

using nlohmann::json;

std::string to_string(ToolKind tool) {
    switch (tool) {
        case ToolKind::neuro_semantic_search: return "neuro_semantic_search";
        case ToolKind::symbolic_graph_query: return "symbolic_graph_query";
        case ToolKind::contextualize: return "contextualize";
        case ToolKind::finish: return "finish";
    }
    return "finish";
}

std::string to_string(Termination termination) {
    switch (termination) {
        case Termination::agent_finished: return "agent_finished";
        case Termination::max_rounds: return "max_rounds";
        case Termination::context_budget: return "context_budget";
    }
    return "agent_finished";
}

std::string to_string(StepStatus status) {
    switch (status) {
        case StepStatus::executed: return "executed";
        case StepStatus::rejected_disabled: return "rejected_disabled";
        case StepStatus::malformed: return "malformed";
        case StepStatus::finished: return "finished";
    }
    return "executed";
}

namespace {

std::string strip_fences(const std::string& text) {
    std::string s = text;
    auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return s;
    auto last = s.find_last_not_of(" \t\r\n");
    s = s.substr(first, last - first + 1);
    if (s.rfind("```", 0) == 0) {
        auto newline = s.find('\n');
        auto closing = s.rfind("```");
        if (newline != std::string::npos && closing != std::string::npos && closing > newline) {
            s = s.substr(newline + 1, closing - newline - 1);
        }
    }
    return s;
}

}  // namespace

ToolCall ToolCall::parse(const std::string& content) {
    json j;
    try {
        j = json::parse(strip_fences(content));
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("turn is not valid JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("tool")) {
        throw ParseError("turn must be a JSON object with a \"tool\" key");
    }
    const std::string name = j.at("tool").get<std::string>();
    ToolCall call;
    if (name == "neuro_semantic_search") {
        call.tool = ToolKind::neuro_semantic_search;
    } else if (name == "symbolic_graph_query") {
        call.tool = ToolKind::symbolic_graph_query;
    } else if (name == "contextualize") {
        call.tool = ToolKind::contextualize;
    } else if (name == "finish") {
        call.tool = ToolKind::finish;
    } else {
        throw ParseError("unknown tool \"" + name + "\"");
    }
    call.args = j.value("args", json::object());
    if (!call.args.is_object()) throw ParseError("\"args\" must be a JSON object");

    switch (call.tool) {
        case ToolKind::neuro_semantic_search:
            if (!call.args.contains("query") || !call.args.at("query").is_string()) {
                throw ParseError("neuro_semantic_search needs a string \"query\"");
            }
            if (call.args.contains("k") &&
                (!call.args.at("k").is_number_integer() || call.args.at("k").get<int>() < 1)) {
                throw ParseError("neuro_semantic_search \"k\" must be an integer >= 1");
            }
            break;
        case ToolKind::symbolic_graph_query:
            if (!call.args.contains("query") || !call.args.at("query").is_object()) {
                throw ParseError("symbolic_graph_query needs an object \"query\"");
            }
            break;
        case ToolKind::contextualize:
            if (!call.args.contains("node") || !call.args.at("node").is_string()) {
                throw ParseError("contextualize needs a string \"node\"");
            }
            break;
        case ToolKind::finish:
            if (!call.args.contains("evidence") || !call.args.at("evidence").is_array()) {
                throw ParseError("finish needs an \"evidence\" array");
            }
            break;
    }
    return call;
}

json dispatch(const ToolCall& call, const DocumentGraph& graph, const NeuralIndex& index,
              Gateway& gateway, const AgentConfig& config) {
    const auto truncate = [&](const std::string& s) {
        return truncate_text(s, static_cast<std::size_t>(config.summary_truncate_chars));
    };
    const auto node_row = [&](const NodeId& id) {
        const GraphNode* node = graph.find(id);
        json row{{"node", id.str()}, {"page", node ? node->page : id.page}};
        if (node) {
            row["element_type"] = to_string(node->element_type);
            row["summary"] = truncate(node->summary);
        }
        return row;
    };

    try {
        switch (call.tool) {
            case ToolKind::neuro_semantic_search: {
                const std::string query = call.args.at("query").get<std::string>();
                const int k = call.args.value("k", 5);
                json rows = json::array();
                for (const auto& hit : semantic_search(index, query, k, gateway)) {
                    json row = node_row(hit.node);
                    row["score"] = hit.score;
                    rows.push_back(std::move(row));
                }
                return json{{"results", std::move(rows)}};
            }
            case ToolKind::symbolic_graph_query: {
                const GraphQuery query =
                    GraphQuery::from_json(call.args.at("query"), config.max_traverse_depth);
                json rows = json::array();
                for (const auto& id : execute_query(graph, query)) {
                    rows.push_back(node_row(id));
                }
                return json{{"results", std::move(rows)}};
            }
            case ToolKind::contextualize: {
                const auto id = NodeId::try_parse(call.args.at("node").get<std::string>());
                if (!id || !graph.has_node(*id)) {
                    return json{{"error", "unknown-node"}};
                }
                json rows = json::array();
                for (const auto& member : contextualize(graph, *id)) {
                    rows.push_back(node_row(member));
                }
                return json{{"results", std::move(rows)}};
            }
            case ToolKind::finish:
                return json::object();
        }
    } catch (const UnknownNodeError&) {
        return json{{"error", "unknown-node"}};
    } catch (const QueryError& e) {
        return json{{"error", "malformed-query"}, {"detail", e.what()}};
    } catch (const EmptyIndexError& e) {
        return json{{"error", "empty-index"}, {"detail", e.what()}};
    } catch (const PreconditionError& e) {
        return json{{"error", "precondition"}, {"detail", e.what()}};
    }
    return json::object();
}

namespace {

long estimate_messages(const std::vector<ChatMessage>& messages, const AgentConfig& config) {
    long total = 0;
    for (const auto& m : messages) total += config.token_estimator(m.content);
    return total;
}

void collect_result_ids(const json& result, std::set<NodeId>& gathered) {
    if (!result.contains("results")) return;
    for (const auto& row : result.at("results")) {
        if (auto id = NodeId::try_parse(row.value("node", ""))) gathered.insert(*id);
    }
}

}  // namespace

RetrievalResult retrieve(const std::string& question, const DocumentGraph& graph,
                         const NeuralIndex& index, Gateway& gateway, const AgentConfig& config) {
    if (!config.valid()) throw PreconditionError("invalid agent config");
    if (!graph.doc_id.empty() && !index.doc_id.empty() && graph.doc_id != index.doc_id) {
        throw PreconditionError("graph doc_id \"" + graph.doc_id + "\" does not match index \"" +
                                index.doc_id + "\"");
    }

    RetrievalResult result;
    std::set<NodeId> gathered;
    std::set<NodeId> evidence;
    bool finished = false;

    std::vector<ChatMessage> messages{
        {Role::system,
         prompts::agent_system(graph, config.enable_graph_query, config.enable_contextualize,
                               config.max_traverse_depth),
         {}},
        {Role::user, "Question: " + question, {}},
    };

    const long budget =
        static_cast<long>(config.context_fill_ratio * static_cast<double>(config.context_window_tokens));

    for (int round = 1; round <= config.max_rounds; ++round) {
        if (estimate_messages(messages, config) > budget) {
            result.termination = Termination::context_budget;
            break;
        }

        const long prompt_estimate = estimate_messages(messages, config);
        const ChatResponse response = gateway.complete({messages, kDefaultTemperature, kMaxTokensQa});
        ++result.llm_calls;
        result.tokens_generated += response.completion_tokens;
        messages.push_back({Role::assistant, response.content, {}});

        TraceStep step;
        step.round = round;
        step.prompt_tokens = prompt_estimate;
        step.completion_tokens = response.completion_tokens;

        ToolCall call;
        try {
            call = ToolCall::parse(response.content);
        } catch (const ParseError& e) {
            step.status = StepStatus::malformed;
            step.result_summary = e.what();
            result.trace.push_back(step);
            messages.push_back({Role::user, prompts::repair_notice(e.what()), {}});
            if (round == config.max_rounds) result.termination = Termination::max_rounds;
            continue;
        }
        step.call = call;

        const bool disabled =
            (call.tool == ToolKind::symbolic_graph_query && !config.enable_graph_query) ||
            (call.tool == ToolKind::contextualize && !config.enable_contextualize);
        if (disabled) {
            step.status = StepStatus::rejected_disabled;
            const json notice{{"error", "tool-disabled"},
                              {"detail", to_string(call.tool) + " is not available"}};
            step.result_summary = notice.dump();
            result.trace.push_back(step);
            messages.push_back({Role::user, notice.dump(), {}});
            if (round == config.max_rounds) result.termination = Termination::max_rounds;
            continue;
        }

        if (call.tool == ToolKind::finish) {
            step.status = StepStatus::finished;
            for (const auto& je : call.args.at("evidence")) {
                if (!je.is_string()) continue;
                const std::string raw = je.get<std::string>();
                auto id = NodeId::try_parse(raw);
                if (id && gathered.contains(*id)) {
                    evidence.insert(*id);
                } else {
                    result.warnings.push_back("finish named ungathered id \"" + raw +
                                              "\"; dropped");
                }
            }
            step.result_summary = "evidence accepted: " + std::to_string(evidence.size());
            result.trace.push_back(step);
            result.termination = Termination::agent_finished;
            finished = true;
            break;
        }

        const json tool_result = dispatch(call, graph, index, gateway, config);
        collect_result_ids(tool_result, gathered);
        if (!tool_result.contains("error")) {
            ++result.dispatch_counts[to_string(call.tool)];
        }
        step.status = StepStatus::executed;
        step.result_summary = tool_result.dump();
        result.trace.push_back(step);
        messages.push_back({Role::user, tool_result.dump(), {}});

        if (round == config.max_rounds) result.termination = Termination::max_rounds;
    }

    if (!finished) {
        // Forced termination keeps everything gathered: recall first.
        evidence = gathered;
    }

    result.evidence_nodes.assign(evidence.begin(), evidence.end());
    std::set<int> pages;
    for (const auto& id : result.evidence_nodes) {
        const GraphNode* node = graph.find(id);
        pages.insert(node ? node->page : id.page);
    }
    result.evidence_pages.assign(pages.begin(), pages.end());
    return result;
}

json RetrievalResult::to_json() const {
    json nodes = json::array();
    for (const auto& id : evidence_nodes) nodes.push_back(id.str());
    json trace_json = json::array();
    for (const auto& step : trace) {
        json js{{"round", step.round},
                {"status", to_string(step.status)},
                {"result_summary", step.result_summary},
                {"prompt_tokens", step.prompt_tokens},
                {"completion_tokens", step.completion_tokens}};
        if (step.call) {
            js["tool"] = to_string(step.call->tool);
            js["args"] = step.call->args;
        }
        trace_json.push_back(std::move(js));
    }
    return json{
        {"evidence_nodes", std::move(nodes)},
        {"evidence_pages", evidence_pages},
        {"llm_calls", llm_calls},
        {"tokens_generated", tokens_generated},
        {"termination", to_string(termination)},
        {"dispatch_counts", json(dispatch_counts)},
        {"warnings", warnings},
        {"trace", std::move(trace_json)},
    };
}

std::string call_count_bucket(long llm_calls) {
    if (llm_calls <= 1) return "0-1";
    if (llm_calls <= 5) return "2-5";
    if (llm_calls <= 10) return "6-10";
    if (llm_calls <= 20) return "11-20";
    return ">20";
}

CallStats instrument(const RetrievalResult& result) {
    CallStats stats;
    stats.llm_calls = result.llm_calls;
    stats.calls_bucket = call_count_bucket(result.llm_calls);
    for (const auto& step : result.trace) {
        stats.tokens_per_call.push_back(step.completion_tokens);
        if (step.completion_tokens >= 100) stats.all_calls_under_100_tokens = false;
    }
    if (static_cast<long>(result.trace.size()) != result.llm_calls) {
        stats.warnings.push_back("trace length " + std::to_string(result.trace.size()) +
                                 " does not match llm_calls " + std::to_string(result.llm_calls));
    }
    if (result.llm_calls > 20) {
        stats.warnings.push_back("llm_calls " + std::to_string(result.llm_calls) +
                                 " exceeds the default max_rounds of 20");
    }
    return stats;
}

}  // namespace ladrag
