// ladrag: ingest visually rich documents into a dual graph/vector index and
// answer retrieval requests through an agent loop, with eval tooling.

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "ladrag/agent.hpp"
#include "ladrag/config.hpp"
#include "ladrag/errors.hpp"
#include "ladrag/eval.hpp"
#include "ladrag/graph_io.hpp"
#include "ladrag/ingestion.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ladrag;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitConfig = 3;
constexpr int kExitData = 4;
constexpr int kExitTransport = 5;

struct CommonOptions {
    std::optional<fs::path> config_path;
    bool json_output = false;
};

struct GatewayFlags {
    std::optional<fs::path> replay;
    std::optional<fs::path> script;
    std::optional<fs::path> record;
};

void add_gateway_flags(CLI::App* cmd, GatewayFlags& flags) {
    cmd->add_option("--replay", flags.replay, "Replay chat responses from a JSONL transcript");
    cmd->add_option("--script", flags.script, "Serve chat responses from a JSON response sequence");
    cmd->add_option("--record", flags.record, "Record chat responses to a JSONL transcript");
}

GatewaySetup to_setup(const GatewayFlags& flags) {
    GatewaySetup setup;
    setup.replay_transcript = flags.replay;
    setup.script = flags.script;
    setup.record_transcript = flags.record;
    return setup;
}

std::vector<PageInput> load_image_pages(const fs::path& dir) {
    if (!fs::is_directory(dir)) {
        throw IoError("--doc must be a directory of page images (or use --pre-extracted)");
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file()) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw IoError("no page images found in " + dir.string());

    std::vector<PageInput> pages;
    int page_number = 1;
    for (const auto& file : files) {
        PageInput page;
        page.page_number = page_number++;
        page.image = read_file(file);
        pages.push_back(std::move(page));
    }
    return pages;
}

int run_validate(const fs::path& graph_path, bool json_output) {
    DocumentGraph graph;
    try {
        graph = deserialize_graph(read_file(graph_path));
    } catch (const ValidationError& e) {
        // Surface the violations instead of refusing outright.
        std::cerr << "invalid graph: " << e.what() << "\n";
        return kExitData;
    }
    const auto violations = validate_graph(graph);
    if (json_output) {
        json out = json::array();
        for (const auto& v : violations) {
            out.push_back({{"kind", to_string(v.kind)}, {"subject", v.subject}, {"detail", v.detail}});
        }
        std::cout << json{{"doc_id", graph.doc_id}, {"violations", out}}.dump(2) << "\n";
    } else {
        for (const auto& v : violations) {
            std::cout << to_string(v.kind) << " " << v.subject << ": " << v.detail << "\n";
        }
        if (violations.empty()) {
            std::cout << "ok: " << graph.nodes.size() << " nodes, " << graph.edges.size()
                      << " edges, " << graph.page_count << " pages\n";
        }
    }
    return violations.empty() ? kExitOk : kExitData;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Layout-aware dynamic retrieval over visually rich documents"};
    app.require_subcommand(1);
    app.fallthrough();

    CommonOptions common;
    app.add_option("--config", common.config_path, "Config JSON (default: LADRAG_CONFIG)");
    app.add_flag("--json", common.json_output, "Machine-readable stdout, logs on stderr");

    // validate
    auto* validate = app.add_subcommand("validate", "Check a graph file against its invariants");
    fs::path validate_graph_path;
    validate->add_option("--graph", validate_graph_path, "Graph JSON file")->required();

    // ingest
    auto* ingest = app.add_subcommand("ingest", "Build the document graph (and index) from pages");
    fs::path ingest_doc;
    std::string ingest_doc_id;
    fs::path ingest_out;
    std::optional<fs::path> ingest_index_out;
    bool pre_extracted = false;
    bool fail_fast = false;
    GatewayFlags ingest_gw;
    ingest->add_option("--doc", ingest_doc, "Directory of page images, or elements JSON")->required();
    ingest->add_option("--doc-id", ingest_doc_id, "Document identifier")->required();
    ingest->add_option("--out", ingest_out, "Output graph JSON path")->required();
    ingest->add_option("--index-out", ingest_index_out, "Also write the neural index here");
    ingest->add_flag("--pre-extracted", pre_extracted, "--doc is an elements.json file");
    ingest->add_flag("--fail-fast", fail_fast, "Abort on the first failing page");
    add_gateway_flags(ingest, ingest_gw);

    // index
    auto* index_cmd = app.add_subcommand("index", "Build the neural index for an ingested graph");
    fs::path index_graph_path;
    fs::path index_out;
    index_cmd->add_option("--graph", index_graph_path, "Graph JSON file")->required();
    index_cmd->add_option("--out", index_out, "Output index path")->required();

    // retrieve
    auto* retrieve_cmd = app.add_subcommand("retrieve", "Run the retrieval agent for one question");
    fs::path retrieve_graph_path;
    fs::path retrieve_index_path;
    std::string question;
    bool no_contextualize = false;
    bool no_graph_query = false;
    GatewayFlags retrieve_gw;
    retrieve_cmd->add_option("--graph", retrieve_graph_path, "Graph JSON file")->required();
    retrieve_cmd->add_option("--index", retrieve_index_path, "Neural index file")->required();
    retrieve_cmd->add_option("--question", question, "The retrieval question")->required();
    retrieve_cmd->add_flag("--no-contextualize", no_contextualize, "Disable the contextualize tool");
    retrieve_cmd->add_flag("--no-graph-query", no_graph_query, "Disable the graph query tool");
    add_gateway_flags(retrieve_cmd, retrieve_gw);

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "Score a retriever against a QA dataset");
    fs::path eval_dataset;
    fs::path eval_graph_dir;
    std::string eval_retriever = "bm25";
    int eval_top_k = 5;
    std::optional<int> eval_sweep;
    fs::path eval_out;
    GatewayFlags eval_gw;
    eval_cmd->add_option("--dataset", eval_dataset, "QA dataset JSONL")->required();
    eval_cmd->add_option("--graph-dir", eval_graph_dir, "Directory of <doc_id>.graph.json/.idx.json")
        ->required();
    eval_cmd->add_option("--retriever", eval_retriever, "ladrag | bm25 | dense | oracle");
    eval_cmd->add_option("--top-k", eval_top_k, "Fixed k for baseline retrievers");
    eval_cmd->add_option("--sweep", eval_sweep, "Sweep k = 1..k_max instead of a single eval");
    eval_cmd->add_option("--out", eval_out, "Report output directory")->required();
    add_gateway_flags(eval_cmd, eval_gw);

    // sweep-k
    auto* sweep_cmd = app.add_subcommand("sweep-k", "Top-k sweep for a baseline retriever");
    fs::path sweep_dataset;
    fs::path sweep_graph_dir;
    std::string sweep_retriever = "bm25";
    int sweep_k_max = 10;
    fs::path sweep_out;
    sweep_cmd->add_option("--dataset", sweep_dataset, "QA dataset JSONL")->required();
    sweep_cmd->add_option("--graph-dir", sweep_graph_dir, "Directory of graph/index files")
        ->required();
    sweep_cmd->add_option("--retriever", sweep_retriever, "bm25 | dense");
    sweep_cmd->add_option("--k-max", sweep_k_max, "Largest k to evaluate");
    sweep_cmd->add_option("--out", sweep_out, "Report output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    }

    try {
        const Config config = Config::resolve(common.config_path);

        if (validate->parsed()) {
            return run_validate(validate_graph_path, common.json_output);
        }

        if (ingest->parsed()) {
            auto gateway = build_gateway(config, to_setup(ingest_gw));
            const std::vector<PageInput> pages =
                pre_extracted ? load_pre_extracted(ingest_doc) : load_image_pages(ingest_doc);

            IngestionOptions options;
            options.fail_fast = fail_fast;
            options.build_index = ingest_index_out.has_value();
            options.louvain.resolution = config.louvain_resolution;

            const IngestionResult result = ingest_document(ingest_doc_id, pages, *gateway, options);
            save_graph(result.graph, ingest_out);
            if (result.index) save_neural_index(*result.index, *ingest_index_out);

            json edges_by_type = json::object();
            for (const auto& [type, count] : result.report.edges_created) {
                edges_by_type[to_string(type)] = count;
            }
            const json report{{"doc_id", result.report.doc_id},
                              {"pages_processed", result.report.pages_processed},
                              {"nodes_created", result.report.nodes_created},
                              {"edges_created", edges_by_type},
                              {"llm_calls", result.report.llm_calls},
                              {"warnings", result.report.warnings}};
            if (common.json_output) {
                std::cout << report.dump(2) << "\n";
            } else {
                std::cerr << "ingested " << result.report.pages_processed << " pages into "
                          << ingest_out << "\n";
                for (const auto& w : result.report.warnings) std::cerr << "warning: " << w << "\n";
            }
            return kExitOk;
        }

        if (index_cmd->parsed()) {
            auto gateway = build_gateway(config);
            const DocumentGraph graph = load_graph(index_graph_path);
            const NeuralIndex index = build_neural_index(graph, *gateway);
            save_neural_index(index, index_out);
            std::cerr << "indexed " << index.size() << " nodes into " << index_out << "\n";
            return kExitOk;
        }

        if (retrieve_cmd->parsed()) {
            auto gateway = build_gateway(config, to_setup(retrieve_gw));
            const DocumentGraph graph = load_graph(retrieve_graph_path);
            const NeuralIndex index = load_neural_index(retrieve_index_path);

            AgentConfig agent_config = config.agent;
            agent_config.enable_contextualize = !no_contextualize;
            agent_config.enable_graph_query = !no_graph_query;

            const RetrievalResult result = retrieve(question, graph, index, *gateway, agent_config);
            if (common.json_output) {
                std::cout << result.to_json().dump(2) << "\n";
            } else {
                std::cout << "termination: " << to_string(result.termination) << " after "
                          << result.llm_calls << " calls\n";
                std::cout << "evidence pages:";
                for (int page : result.evidence_pages) std::cout << " " << page;
                std::cout << "\nevidence nodes:";
                for (const auto& id : result.evidence_nodes) std::cout << " " << id.str();
                std::cout << "\n";
            }
            return kExitOk;
        }

        if (eval_cmd->parsed()) {
            auto gateway = build_gateway(config, to_setup(eval_gw));
            const auto dataset = load_dataset(eval_dataset);
            ArtifactStore store(eval_graph_dir);

            if (eval_sweep) {
                const auto curve = sweep_topk(dataset, store, baseline_from_label(eval_retriever),
                                              *eval_sweep, *gateway);
                json points = json::array();
                for (const auto& p : curve) {
                    points.push_back({{"k", p.k}, {"mean_pr", p.mean_pr}, {"mean_ipr", p.mean_ipr}});
                }
                const json out{{"retriever", eval_retriever}, {"points", points}};
                write_file(eval_out / "sweep.json", out.dump(2) + "\n");
                if (common.json_output) std::cout << out.dump(2) << "\n";
                return kExitOk;
            }

            RetrieverSpec spec;
            spec.name = eval_retriever;
            spec.top_k = eval_top_k;
            spec.agent = config.agent;
            const EvalSummary summary = run_eval(dataset, store, spec, *gateway, eval_out);
            if (common.json_output) {
                std::cout << summary.to_json().dump(2) << "\n";
            } else {
                std::cerr << "mean PR " << summary.mean_pr << ", mean IPR " << summary.mean_ipr
                          << " over " << summary.questions << " questions -> " << eval_out << "\n";
            }
            return kExitOk;
        }

        if (sweep_cmd->parsed()) {
            auto gateway = build_gateway(config);
            const auto dataset = load_dataset(sweep_dataset);
            ArtifactStore store(sweep_graph_dir);
            const auto curve =
                sweep_topk(dataset, store, baseline_from_label(sweep_retriever), sweep_k_max, *gateway);
            json points = json::array();
            for (const auto& p : curve) {
                points.push_back({{"k", p.k}, {"mean_pr", p.mean_pr}, {"mean_ipr", p.mean_ipr}});
            }
            const json out{{"retriever", sweep_retriever}, {"points", points}};
            write_file(sweep_out / "sweep.json", out.dump(2) + "\n");
            if (common.json_output) std::cout << out.dump(2) << "\n";
            return kExitOk;
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const TransportError& e) {
        std::cerr << "transport error: " << e.what() << "\n";
        return kExitTransport;
    } catch (const AuthError& e) {
        std::cerr << "auth error: " << e.what() << "\n";
        return kExitTransport;
    } catch (const ReplayMissError& e) {
        std::cerr << "replay miss: " << e.what() << "\n";
        return kExitTransport;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitOk;
}
