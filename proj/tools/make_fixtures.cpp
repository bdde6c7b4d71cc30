// Generates the test fixtures: the 5-page synthetic deck, the 20-page
// references document with its QA set and agent scripts, and the frozen
// golden graphs. Golden files are written only with --write-golden; the
// committed copies are the frozen reference bytes.
//
// The refdoc20 dense ranking is load-bearing: the cross-page references
// question must rank page 17 first and must not cover all three gold pages
// before k = 6. This tool verifies that shape and fails loudly if edits to
// the summaries break it.

#include <filesystem>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "ladrag/agent.hpp"
#include "ladrag/eval.hpp"
#include "ladrag/graph_io.hpp"
#include "ladrag/graph_query.hpp"
#include "ladrag/ingestion.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ladrag;

namespace {

constexpr int kRefdocDim = 256;

json element(const std::string& type, std::vector<double> bbox, const std::string& content,
             const std::string& summary, json attrs = json::object()) {
    return json{{"element_type", type},
                {"bbox", bbox},
                {"content", content},
                {"summary", summary},
                {"visual_attributes", attrs}};
}

// ---------------------------------------------------------------- deck5 ----

json deck5_elements() {
    json pages = json::array();

    pages.push_back(json::array({
        element("title", {0.1, 0.1, 0.9, 0.25}, "Fleet Modernization Briefing",
                "Title slide: Fleet Modernization Briefing, annual edition.",
                {{"font_size", "32"}}),
        element("paragraph", {0.1, 0.4, 0.9, 0.55}, "Prepared by operations planning",
                "Subtitle naming operations planning as the author team."),
    }));

    pages.push_back(json::array({
        element("section_header", {0.1, 0.08, 0.9, 0.18}, "Big Data Transformations",
                "Section header introducing big data transformation stories.",
                {{"header_level", "1"}, {"font_size", "24"}}),
        element("paragraph", {0.1, 0.22, 0.9, 0.45},
                "Seven businesses transformed operations, see the architecture figure",
                "Paragraph stating seven businesses transformed operations and pointing "
                "at an architecture figure shown later."),
        element("list", {0.1, 0.5, 0.9, 0.85}, "Retailer; Carrier; Utility; Bank; ...",
                "Bullet list naming the seven transformed businesses."),
    }));

    pages.push_back(json::array({
        element("figure", {0.1, 0.1, 0.9, 0.6}, "Architecture diagram",
                "Architecture diagram of the shared data platform."),
        element("caption", {0.1, 0.62, 0.9, 0.7}, "Figure 1: platform architecture",
                "Caption describing the platform architecture diagram."),
    }));

    pages.push_back(json::array({
        element("section_header", {0.1, 0.08, 0.9, 0.18}, "Case Studies",
                "Section header opening the case study results.",
                {{"header_level", "1"}, {"font_size", "24"}}),
        element("table", {0.1, 0.22, 0.9, 0.6}, "Outcomes by business",
                "Table of outcomes per transformed business."),
        element("caption", {0.1, 0.62, 0.9, 0.7}, "Table 1: outcomes",
                "Caption for the outcomes table."),
    }));

    pages.push_back(json::array({
        element("paragraph", {0.1, 0.1, 0.9, 0.4}, "Case study outcomes continued in prose",
                "Prose continuation of the case study outcomes."),
        element("footnote", {0.1, 0.85, 0.9, 0.95},
                "Methodology detailed under Big Data Transformations",
                "Footnote pointing back to the transformation methodology section."),
    }));

    return pages;
}

json deck5_script() {
    json responses = json::array();

    auto memory_delta = [](json entities, json added, json resolved, json themes) {
        return json{{"entities", entities},
                    {"unresolved_refs_added", added},
                    {"unresolved_refs_resolved", resolved},
                    {"themes_added", themes}}
            .dump();
    };

    // Page 1: edges, then memory.
    responses.push_back(json::array().dump());
    responses.push_back(memory_delta({{"Fleet Modernization", {"p1_e0"}}}, json::array(),
                                     json::array(), json::array()));
    // Page 2: the paragraph mentions a figure that does not exist yet.
    responses.push_back(json::array().dump());
    responses.push_back(memory_delta(
        {{"Big Data", {"p2_e0"}}},
        json::array({{{"src", "p2_e1"}, {"target_description", "architecture figure"}}}),
        json::array(), json::array({"transformation case studies"})));
    // Page 3: the figure resolves the pending reference.
    responses.push_back(json::array({{{"src", "p2_e1"},
                                      {"dst", "p3_e0"},
                                      {"relation", "refers_to"},
                                      {"note", "resolves the architecture figure mention"}}})
                            .dump());
    responses.push_back(memory_delta(
        json::object(), json::array(),
        json::array({{{"src", "p2_e1"}, {"target_description", "architecture figure"}}}),
        json::array()));
    // Page 4.
    responses.push_back(json::array().dump());
    responses.push_back(memory_delta({{"Case Studies", {"p4_e0"}}}, json::array(), json::array(),
                                     json::array()));
    // Page 5: prose continues the table, footnote refers back to the section.
    responses.push_back(json::array({{{"src", "p5_e0"},
                                      {"dst", "p4_e1"},
                                      {"relation", "continues_on"},
                                      {"note", "prose continues the outcomes table"}},
                                     {{"src", "p5_e1"},
                                      {"dst", "p2_e0"},
                                      {"relation", "refers_to"},
                                      {"note", "footnote points at the methodology section"}}})
                            .dump());
    responses.push_back(memory_delta(json::object(), json::array(), json::array(), json::array()));

    return json{{"responses", responses}};
}

// ------------------------------------------------------------- refdoc20 ----

// Twenty pages, six sections. Pages 17-19 hold a references section that
// continues across page breaks: the gold set for the cross-page question.
// Decoy summaries on pages 3, 9 and 13 deliberately share mid-weight token
// sets with the question so dense retrieval ranks them above the
// continuation pages.
json refdoc20_elements() {
    json pages = json::array();

    auto header = [](const std::string& text, const std::string& summary) {
        return element("section_header", {0.1, 0.05, 0.9, 0.15}, text, summary,
                       {{"header_level", "1"}, {"font_size", "26"}});
    };
    auto para = [](const std::string& summary) {
        return element("paragraph", {0.1, 0.2, 0.9, 0.5}, summary, summary);
    };
    auto para_at = [](double y0, double y1, const std::string& summary) {
        return element("paragraph", {0.1, y0, 0.9, y1}, summary, summary);
    };

    // p1-p3: Mission Overview
    pages.push_back(json::array({
        header("Mission Overview", "Section header: mission overview and goals."),
        para("Mission goals: satellite constellation expansion during fiscal window."),
    }));
    pages.push_back(json::array({
        element("figure", {0.1, 0.2, 0.9, 0.6}, "Orbit map",
                "Orbit map figure plotting constellation coverage."),
        element("caption", {0.1, 0.62, 0.9, 0.7}, "Figure: coverage",
                "Caption: constellation coverage per orbital plane."),
    }));
    pages.push_back(json::array({
        para_at(0.2, 0.4, "Mission staffing grew across planning quarters."),
        para_at(0.5, 0.7, "Mission report appendix notes, cited goals summary."),  // decoy (3 shared)
    }));

    // p4-p6: Fleet Overview
    pages.push_back(json::array({
        header("Fleet Overview", "Section header: fleet overview."),
        para("Fleet tonnage: vessel capacity listing per squadron."),
    }));
    pages.push_back(json::array({
        element("table", {0.1, 0.2, 0.9, 0.6}, "Tonnage",
                "Table: outcomes per vessel class, tonnage and range."),
        element("caption", {0.1, 0.62, 0.9, 0.7}, "Table: tonnage",
                "Caption: tonnage table by vessel class."),
    }));
    pages.push_back(json::array({
        para("Fleet retirements scheduled across two squadrons."),
    }));

    // p7-p9: Engine Metrics
    pages.push_back(json::array({
        header("Engine Metrics", "Section header: engine metrics."),
        para("Engine thrust telemetry: burn duration statistics per engine family."),
    }));
    pages.push_back(json::array({
        element("chart", {0.1, 0.2, 0.9, 0.6}, "Burn chart",
                "Chart: burn duration distribution per engine batch."),
        element("caption", {0.1, 0.62, 0.9, 0.7}, "Chart: burns",
                "Caption: burn duration chart, batch comparison."),
    }));
    pages.push_back(json::array({
        para_at(0.2, 0.4, "Telemetry downlink volume doubled after antenna upgrades."),
        para_at(0.5, 0.7, "Telemetry chart sources cited: report appendix works."),  // decoy (4 shared)
    }));

    // p10-p12: Crew Survey
    pages.push_back(json::array({
        header("Crew Survey", "Section header: crew survey."),
        para("Crew survey results: morale training scores improved markedly."),
    }));
    pages.push_back(json::array({
        element("table", {0.1, 0.2, 0.9, 0.6}, "Survey",
                "Table: survey responses per crew cohort."),
        element("caption", {0.1, 0.62, 0.9, 0.7}, "Table: survey",
                "Caption: crew cohort survey table."),
    }));
    pages.push_back(json::array({
        para("Survey follow-ups planned for next rotation."),
    }));

    // p13-p16: Budget Analysis
    pages.push_back(json::array({
        header("Budget Analysis", "Section header: budget analysis."),
        para("Budget forecast: expenditure ledger projections, three scenarios."),
        para_at(0.55, 0.75, "Budget report appendix: works cited per ledger."),  // decoy (4 shared)
    }));
    pages.push_back(json::array({
        element("chart", {0.1, 0.2, 0.9, 0.6}, "Spend chart",
                "Chart: expenditure trend lines per scenario."),
        element("caption", {0.1, 0.62, 0.9, 0.7}, "Chart: spend",
                "Caption: expenditure chart, scenario comparison."),
    }));
    pages.push_back(json::array({
        para("Ledger audits close each quarter under review board."),
    }));
    pages.push_back(json::array({
        para("Forecast revisions follow launch manifest changes."),
    }));

    // p17-p19: the references section, continuing across pages.
    pages.push_back(json::array({
        header("Appendix A: References",
               "Appendix A References: complete works cited in this report."),
        element("list", {0.1, 0.2, 0.9, 0.9}, "Entries 1-8",
                "Reference entries one through eight listing cited works."),
    }));
    pages.push_back(json::array({
        element("list", {0.1, 0.1, 0.9, 0.9}, "Entries 9-16",
                "References continued: more works cited, entries nine through sixteen."),
    }));
    pages.push_back(json::array({
        element("list", {0.1, 0.1, 0.9, 0.9}, "Entries 17-24",
                "References continued further: final entries seventeen through twentyfour."),
    }));

    // p20: Colophon
    pages.push_back(json::array({
        header("Colophon", "Section header: colophon."),
        para("Colophon: typeset notes and production credits."),
    }));

    return pages;
}

struct RefdocQuestion {
    std::string id;
    std::string question;
    std::set<int> gold;
    std::string target_node;     // rank-1 node for the scripted search
    std::string target_summary;  // its exact summary, used as the query
};

const std::string kCrossPageQuestion =
    "Which works are cited in Appendix A References of this report?";

std::vector<RefdocQuestion> refdoc20_questions() {
    return {
        {"q01", kCrossPageQuestion, {17, 18, 19}, "p17_e0",
         "Appendix A References: complete works cited in this report."},
        {"q02", "What did the crew survey find?", {10}, "p10_e1",
         "Crew survey results: morale training scores improved markedly."},
        {"q03", "Summarize the engine telemetry findings.", {7}, "p7_e1",
         "Engine thrust telemetry: burn duration statistics per engine family."},
        {"q04", "What is the fleet tonnage situation?", {4}, "p4_e1",
         "Fleet tonnage: vessel capacity listing per squadron."},
        {"q05", "What does the budget forecast project?", {13}, "p13_e1",
         "Budget forecast: expenditure ledger projections, three scenarios."},
        {"q06", "What are the mission goals?", {1}, "p1_e1",
         "Mission goals: satellite constellation expansion during fiscal window."},
        {"q07", "Where is the orbit coverage figure?", {2}, "p2_e0",
         "Orbit map figure plotting constellation coverage."},
        {"q08", "Which table lists outcomes per vessel class?", {5}, "p5_e0",
         "Table: outcomes per vessel class, tonnage and range."},
        {"q09", "Where is the burn duration chart?", {8}, "p8_e0",
         "Chart: burn duration distribution per engine batch."},
        {"q10", "What does the colophon say?", {20}, "p20_e1",
         "Colophon: typeset notes and production credits."},
    };
}

std::string search_turn(const std::string& query, int k) {
    return json{{"tool", "neuro_semantic_search"}, {"args", {{"query", query}, {"k", k}}}}.dump();
}

std::string graph_query_turn() {
    return json{{"tool", "symbolic_graph_query"},
                {"args",
                 {{"query",
                   {{"filters",
                     json::array({{{"field", "element_type"}, {"in", {"figure", "chart"}}}})}}}}}}
        .dump();
}

std::string contextualize_turn(const std::string& node) {
    return json{{"tool", "contextualize"}, {"args", {{"node", node}}}}.dump();
}

std::string finish_turn(const std::vector<std::string>& evidence) {
    return json{{"tool", "finish"},
                {"args", {{"evidence", evidence}, {"rationale", "evidence set complete"}}}}
        .dump();
}

const std::vector<std::string> kReferencesEvidence = {"p17_e0", "p17_e1", "p18_e0", "p19_e0"};

json refdoc20_agent_script() {
    return json{{"responses",
                 {search_turn(kCrossPageQuestion, 3), contextualize_turn("p17_e0"),
                  finish_turn(kReferencesEvidence)}}};
}

json refdoc20_eval_script() {
    json responses = json::array();
    const auto questions = refdoc20_questions();
    // q01: semantic search, contextualize, finish.
    responses.push_back(search_turn(questions[0].question, 3));
    responses.push_back(contextualize_turn("p17_e0"));
    responses.push_back(finish_turn(kReferencesEvidence));
    // q02..q09: pinpoint search then finish.
    for (std::size_t i = 1; i + 1 < questions.size(); ++i) {
        responses.push_back(search_turn(questions[i].target_summary, 1));
        responses.push_back(finish_turn({questions[i].target_node}));
    }
    // q10: a wandering session, six calls total.
    const auto& last = questions.back();
    for (int i = 0; i < 5; ++i) responses.push_back(search_turn(last.target_summary, 1));
    responses.push_back(finish_turn({last.target_node}));
    return json{{"responses", responses}};
}

json refdoc20_ablation_script() {
    // Every question first tries both disabled tools, then falls back to
    // semantic search. Four calls per question.
    json responses = json::array();
    for (const auto& q : refdoc20_questions()) {
        responses.push_back(graph_query_turn());
        responses.push_back(contextualize_turn(q.target_node));
        responses.push_back(search_turn(q.target_summary, 1));
        responses.push_back(finish_turn({q.target_node}));
    }
    return json{{"responses", responses}};
}

json refdoc20_qa() {
    // Serialized later as JSONL, one record per line.
    json records = json::array();
    for (const auto& q : refdoc20_questions()) {
        records.push_back(json{{"question_id", q.id},
                               {"doc_id", "refdoc20"},
                               {"question", q.question},
                               {"evidence_pages", q.gold}});
    }
    return records;
}

// ---------------------------------------------------------------- verify ---

int rank_of_page(const std::vector<int>& pages, int page) {
    for (std::size_t i = 0; i < pages.size(); ++i) {
        if (pages[i] == page) return static_cast<int>(i) + 1;
    }
    return -1;
}

bool verify_refdoc(const DocumentGraph& graph, const NeuralIndex& index, Gateway& gateway) {
    bool ok = true;
    auto complain = [&](const std::string& what) {
        std::cerr << "refdoc20 verification failed: " << what << "\n";
        ok = false;
    };

    // Contextualize must recover exactly the references cluster.
    const auto cluster = contextualize(graph, NodeId::parse("p17_e0"));
    std::vector<std::string> got;
    for (const auto& id : cluster) got.push_back(id.str());
    if (got != kReferencesEvidence) {
        std::string joined;
        for (const auto& s : got) joined += s + " ";
        complain("contextualize(p17_e0) returned [" + joined + "]");
    }

    // Dense page ranking for the cross-page question.
    const auto hits =
        semantic_search(index, kCrossPageQuestion, static_cast<int>(graph.nodes.size()), gateway);
    const auto pages = page_topk(hits, graph, graph.page_count);
    const int r17 = rank_of_page(pages, 17);
    const int r18 = rank_of_page(pages, 18);
    const int r19 = rank_of_page(pages, 19);
    std::cerr << "refdoc20 ranking: p17@" << r17 << " p18@" << r18 << " p19@" << r19 << "\n";
    if (r17 != 1) complain("page 17 must rank first");
    if (r18 != 5) complain("page 18 must rank fifth");
    if (r19 != 6) complain("page 19 must rank sixth");
    const std::set<int> decoys{pages.size() > 3 ? pages[1] : -1, pages.size() > 3 ? pages[2] : -1,
                               pages.size() > 3 ? pages[3] : -1};
    if (decoys != std::set<int>{3, 9, 13}) complain("decoy pages must fill ranks 2-4");

    // Pinpoint queries must rank their target node first.
    for (const auto& q : refdoc20_questions()) {
        if (q.id == "q01") continue;
        const auto top = semantic_search(index, q.target_summary, 1, gateway);
        if (top.empty() || top.front().node.str() != q.target_node) {
            complain(q.id + " target " + q.target_node + " is not rank 1");
        }
    }
    return ok;
}

void write_jsonl(const fs::path& path, const json& array) {
    std::string lines;
    for (const auto& item : array) lines += item.dump() + "\n";
    write_file(path, lines);
}

}  // namespace

int main(int argc, char** argv) {
    fs::path out_dir = "tests/fixtures";
    bool write_golden = false;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--out-dir" && i + 1 < argc) {
            out_dir = argv[++i];
        } else if (arg == "--write-golden") {
            write_golden = true;
        } else {
            std::cerr << "usage: ladrag_make_fixtures [--out-dir DIR] [--write-golden]\n";
            return 2;
        }
    }

    fs::create_directories(out_dir / "deck5");
    fs::create_directories(out_dir / "refdoc20");

    // Two-node golden used by the serialization tests.
    {
        GraphNode para;
        para.id = NodeId{1, 0};
        para.page = 1;
        para.element_type = ElementType::paragraph;
        para.bbox = {0.1, 0.1, 0.9, 0.3};
        para.content = "Total shipments rose, see the trend chart.";
        para.summary = "Paragraph reporting that shipments rose, pointing at a trend chart.";
        GraphNode chart;
        chart.id = NodeId{1, 1};
        chart.page = 1;
        chart.element_type = ElementType::chart;
        chart.bbox = {0.1, 0.4, 0.9, 0.8};
        chart.content = "Trend chart of shipments";
        chart.summary = "Chart of monthly shipment volumes.";
        chart.visual_attributes = {{"color", "blue"}};

        DocumentGraph g;
        g.doc_id = "two-node";
        g.page_count = 1;
        g.nodes.emplace(para.id, para);
        g.nodes.emplace(chart.id, chart);
        GraphEdge edge;
        edge.src = para.id;
        edge.dst = chart.id;
        edge.edge_type = EdgeType::refers_to;
        edge.provenance = Provenance::intra_page;
        g.edges.push_back(edge);
        g.communities = louvain_partition(g);
        if (write_golden) save_graph(g, out_dir / "two_node_graph.json");
    }

    // deck5 inputs and scripts.
    write_file(out_dir / "deck5" / "elements.json", deck5_elements().dump(2) + "\n");
    write_file(out_dir / "deck5" / "ingest_script.json", deck5_script().dump(2) + "\n");

    const auto deck5_pages = load_pre_extracted(out_dir / "deck5" / "elements.json");

    {
        Gateway pure;
        const auto result = ingest_document("deck5", deck5_pages, pure);
        if (write_golden) save_graph(result.graph, out_dir / "deck5" / "golden_graph.json");
    }
    {
        Gateway scripted;
        scripted.set_chat(ScriptedChat::from_file(out_dir / "deck5" / "ingest_script.json"));
        scripted.record_session(out_dir / "deck5" / "transcript.jsonl");
        const auto result = ingest_document("deck5", deck5_pages, scripted);
        scripted.stop_recording();
        if (write_golden) {
            save_graph(result.graph, out_dir / "deck5" / "golden_enriched_graph.json");
        }
        std::cerr << "deck5 enriched: " << result.graph.edges.size() << " edges, "
                  << result.report.llm_calls << " llm calls\n";
    }

    // refdoc20 inputs, QA set, scripts.
    write_file(out_dir / "refdoc20" / "elements.json", refdoc20_elements().dump(2) + "\n");
    write_jsonl(out_dir / "refdoc20" / "qa.jsonl", refdoc20_qa());
    write_file(out_dir / "refdoc20" / "agent_script.json", refdoc20_agent_script().dump(2) + "\n");
    write_file(out_dir / "refdoc20" / "eval_script.json", refdoc20_eval_script().dump(2) + "\n");
    write_file(out_dir / "refdoc20" / "ablation_script.json",
               refdoc20_ablation_script().dump(2) + "\n");

    {
        Gateway gateway;
        gateway.set_embedder(std::make_unique<HashingEmbedder>(kRefdocDim));
        const auto pages = load_pre_extracted(out_dir / "refdoc20" / "elements.json");
        const auto result = ingest_document("refdoc20", pages, gateway);
        if (!verify_refdoc(result.graph, *result.index, gateway)) return 1;
        if (write_golden) {
            save_graph(result.graph, out_dir / "refdoc20" / "refdoc20.graph.json");
            save_neural_index(*result.index, out_dir / "refdoc20" / "refdoc20.idx.json");
        }
    }

    std::cerr << "fixtures written to " << out_dir << (write_golden ? " (goldens updated)" : "")
              << "\n";
    return 0;
}
