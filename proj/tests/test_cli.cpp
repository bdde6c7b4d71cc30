#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ladrag/graph_io.hpp"

using namespace ladrag;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::string kCli = LADRAG_CLI_BIN;
const std::string kFixtures = LADRAG_FIXTURES_DIR;

struct RunResult {
    int exit_code = 0;
    std::string stdout_text;
};

RunResult run_cli(const std::string& args) {
    const fs::path out = fs::temp_directory_path() / "ladrag_cli_stdout.txt";
    const std::string command = kCli + " " + args + " > " + out.string() + " 2> " +
                                (fs::temp_directory_path() / "ladrag_cli_stderr.txt").string();
    const int status = std::system(command.c_str());
    RunResult result;
    result.exit_code = WEXITSTATUS(status);
    result.stdout_text = read_file(out);
    return result;
}

fs::path work_dir() {
    const auto dir = fs::temp_directory_path() / "ladrag_cli_work";
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("validate accepts the golden fixture") {
    const auto result = run_cli("validate --graph " + kFixtures + "/two_node_graph.json");
    CHECK(result.exit_code == 0);
}

TEST_CASE("validate reports violations with a data exit code") {
    const auto dir = work_dir();
    const auto bad = dir / "bad_graph.json";
    // Structurally parseable, invariant-breaking content.
    write_file(bad,
               R"({"schema_version":1,"doc_id":"bad","page_count":1,)"
               R"("nodes":[{"id":"p1_e0","page":1,"element_type":"paragraph",)"
               R"("bbox":[0.1,0.1,0.9,0.2],"content":"x","summary":"x","visual_attributes":{}}],)"
               R"("edges":[{"src":"p1_e0","dst":"p9_e9","edge_type":"refers_to","provenance":"inter_page"}]})");
    const auto result = run_cli("validate --graph " + bad.string());
    CHECK(result.exit_code == 4);
}

TEST_CASE("unknown subcommand exits with the usage code") {
    CHECK(run_cli("frobnicate").exit_code == 2);
}

TEST_CASE("missing required flag names the flag") {
    const auto result = run_cli("retrieve --index x.idx --question hm");
    CHECK(result.exit_code == 2);
}

TEST_CASE("ingest, index, retrieve round trip on the deck fixture") {
    const auto dir = work_dir();
    const auto graph_path = dir / "deck5.graph.json";
    const auto index_path = dir / "deck5.idx.json";

    const auto ingest = run_cli("ingest --doc " + kFixtures + "/deck5/elements.json" +
                                " --doc-id deck5 --pre-extracted --out " + graph_path.string() +
                                " --json");
    CHECK(ingest.exit_code == 0);
    const json report = json::parse(ingest.stdout_text);
    CHECK(report.at("pages_processed") == 5);

    CHECK(run_cli("index --graph " + graph_path.string() + " --out " + index_path.string())
              .exit_code == 0);

    // Scripted retrieval: search then finish with a gathered id.
    const auto script = dir / "script.json";
    write_file(script, json{{"responses",
                             {json{{"tool", "neuro_semantic_search"},
                                   {"args", {{"query", "architecture diagram"}, {"k", 2}}}}
                                  .dump(),
                              json{{"tool", "finish"},
                                   {"args",
                                    {{"evidence", {"p3_e0"}}, {"rationale", "found it"}}}}
                                  .dump()}}}
                           .dump());
    const auto retrieve = run_cli("--json retrieve --graph " + graph_path.string() + " --index " +
                                  index_path.string() +
                                  " --question \"where is the architecture figure\" --script " +
                                  script.string());
    CHECK(retrieve.exit_code == 0);
    const json result = json::parse(retrieve.stdout_text);
    CHECK(result.at("termination") == "agent_finished");
    CHECK(result.at("llm_calls") == 2);

    // Same argv and files: identical machine output (replay-mode purity).
    const auto retrieve_again = run_cli("--json retrieve --graph " + graph_path.string() +
                                        " --index " + index_path.string() +
                                        " --question \"where is the architecture figure\" --script " +
                                        script.string());
    CHECK(retrieve_again.stdout_text == retrieve.stdout_text);
}

TEST_CASE("eval runs the oracle retriever end to end") {
    const auto dir = work_dir();
    const auto store_dir = dir / "store";
    fs::create_directories(store_dir);

    // Build the artifacts via the CLI.
    CHECK(run_cli("ingest --doc " + kFixtures + "/refdoc20/elements.json" +
                  " --doc-id refdoc20 --pre-extracted --out " +
                  (store_dir / "refdoc20.graph.json").string() + " --index-out " +
                  (store_dir / "refdoc20.idx.json").string())
              .exit_code == 0);

    const auto out_dir = dir / "report";
    const auto eval = run_cli("--json eval --dataset " + kFixtures + "/refdoc20/qa.jsonl" +
                              " --graph-dir " + store_dir.string() +
                              " --retriever oracle --out " + out_dir.string());
    CHECK(eval.exit_code == 0);
    const json summary = json::parse(eval.stdout_text);
    CHECK(summary.at("mean_pr") == 1.0);
    CHECK(summary.at("mean_ipr") == 0.0);
    CHECK(fs::exists(out_dir / "records.jsonl"));
}

TEST_CASE("sweep-k writes a curve") {
    const auto dir = work_dir();
    const auto store_dir = dir / "sweep_store";
    fs::create_directories(store_dir);
    CHECK(run_cli("ingest --doc " + kFixtures + "/refdoc20/elements.json" +
                  " --doc-id refdoc20 --pre-extracted --out " +
                  (store_dir / "refdoc20.graph.json").string() + " --index-out " +
                  (store_dir / "refdoc20.idx.json").string())
              .exit_code == 0);

    const auto out_dir = dir / "sweep";
    const auto sweep = run_cli("sweep-k --dataset " + kFixtures + "/refdoc20/qa.jsonl" +
                               " --graph-dir " + store_dir.string() +
                               " --retriever bm25 --k-max 3 --out " + out_dir.string());
    CHECK(sweep.exit_code == 0);
    const json curve = json::parse(read_file(out_dir / "sweep.json"));
    CHECK(curve.at("points").size() == 3);
}

TEST_CASE("eval drives the scripted agent through config and store") {
    const auto dir = work_dir();
    // The shipped refdoc20 store was indexed at dimension 256; the gateway
    // embedder has to match, so the run needs a config file.
    const auto config_path = dir / "dim256.json";
    write_file(config_path, R"({"embedding_dim": 256})");

    const auto out_dir = dir / "ladrag_report";
    const auto eval = run_cli("--config " + config_path.string() + " --json eval --dataset " +
                              kFixtures + "/refdoc20/qa.jsonl --graph-dir " + kFixtures +
                              "/refdoc20 --retriever ladrag --script " + kFixtures +
                              "/refdoc20/eval_script.json --out " + out_dir.string());
    CHECK(eval.exit_code == 0);
    const json summary = json::parse(eval.stdout_text);
    CHECK(summary.at("mean_pr") == 1.0);
    CHECK(summary.at("llm_call_histogram").at("2-5") == 9);
    CHECK(summary.at("composite_ratio") == "inf");

    // Without the config the embedder mismatch must fail as a config error.
    const auto mismatch = run_cli("eval --dataset " + kFixtures +
                                  "/refdoc20/qa.jsonl --graph-dir " + kFixtures +
                                  "/refdoc20 --retriever ladrag --script " + kFixtures +
                                  "/refdoc20/eval_script.json --out " + (dir / "bad").string());
    CHECK(mismatch.exit_code == 3);
}

TEST_CASE("eval --sweep writes the curve instead of a single report") {
    const auto dir = work_dir();
    const auto config_path = dir / "dim256.json";
    write_file(config_path, R"({"embedding_dim": 256})");

    const auto out_dir = dir / "eval_sweep";
    const auto sweep = run_cli("--config " + config_path.string() + " eval --dataset " +
                               kFixtures + "/refdoc20/qa.jsonl --graph-dir " + kFixtures +
                               "/refdoc20 --retriever dense --sweep 6 --out " + out_dir.string());
    CHECK(sweep.exit_code == 0);
    const json curve = json::parse(read_file(out_dir / "sweep.json"));
    REQUIRE(curve.at("points").size() == 6);
    // Monotone mean PR, and not yet perfect at k=1 (q01 needs three pages).
    double prev = -1.0;
    for (const auto& point : curve.at("points")) {
        const double pr = point.at("mean_pr").get<double>();
        CHECK(pr >= prev);
        prev = pr;
    }
    CHECK(curve.at("points")[0].at("mean_pr").get<double>() < 1.0);
}

TEST_CASE("replay miss surfaces as a transport-class failure") {
    const auto dir = work_dir();
    const auto graph_path = dir / "replay_deck.graph.json";
    const auto index_path = dir / "replay_deck.idx.json";
    CHECK(run_cli("ingest --doc " + kFixtures + "/deck5/elements.json" +
                  " --doc-id deck5 --pre-extracted --out " + graph_path.string() +
                  " --index-out " + index_path.string())
              .exit_code == 0);

    const auto transcript = dir / "empty_transcript.jsonl";
    write_file(transcript, "");
    const auto result = run_cli("retrieve --graph " + graph_path.string() + " --index " +
                                index_path.string() + " --question \"anything\" --replay " +
                                transcript.string());
    CHECK(result.exit_code == 5);
}

}  // TEST_SUITE
