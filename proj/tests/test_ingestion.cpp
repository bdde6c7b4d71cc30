#include <doctest.h>

#include <algorithm>

#include <json.hpp>

#include "ladrag/errors.hpp"
#include "ladrag/graph_io.hpp"
#include "ladrag/ingestion.hpp"
#include "test_support.hpp"

using namespace ladrag;
using namespace ladrag::testsupport;
using nlohmann::json;

namespace {

GraphNode element(ElementType type, const std::string& summary,
                  BoundingBox bbox = {0.1, 0.1, 0.9, 0.2}) {
    GraphNode node;
    node.element_type = type;
    node.content = summary;
    node.summary = summary;
    node.bbox = bbox;
    return node;
}

PageInput pre_extracted_page(int page, std::vector<GraphNode> elements) {
    PageInput input;
    input.page_number = page;
    input.pre_extracted = std::move(elements);
    return input;
}

Gateway scripted_gateway(std::vector<std::string> responses) {
    Gateway gateway;
    gateway.set_chat(std::make_unique<ScriptedChat>(std::move(responses)));
    return gateway;
}

int count_edges(const DocumentGraph& g, EdgeType type) {
    return static_cast<int>(std::count_if(g.edges.begin(), g.edges.end(),
                                          [&](const GraphEdge& e) { return e.edge_type == type; }));
}

}  // namespace

TEST_SUITE("ingestion") {

TEST_CASE("pre-extracted pages pass through with assigned ids") {
    Gateway gateway;  // no chat backend needed
    const auto page = pre_extracted_page(
        1, {element(ElementType::title, "Deck title"),
            element(ElementType::paragraph, "Intro paragraph"),
            element(ElementType::figure, "Architecture diagram")});
    const auto nodes = parse_page(page, gateway);
    REQUIRE(nodes.size() == 3);
    CHECK(nodes[0].id == NodeId{1, 0});
    CHECK(nodes[1].id == NodeId{1, 1});
    CHECK(nodes[2].id == NodeId{1, 2});
    CHECK(gateway.call_count() == 0);
}

TEST_CASE("model-parsed page yields typed nodes with summaries") {
    const json reply = json::array({{
        {"element_type", "figure"},
        {"bbox", {0.1, 0.2, 0.9, 0.7}},
        {"content", "A slide-sized diagram of the ingestion flow"},
        {"summary", "Diagram showing pages flowing into a document graph."},
        {"visual_attributes", {{"color", "blue"}}},
    }});
    Gateway gateway = scripted_gateway({reply.dump()});

    PageInput page;
    page.page_number = 1;
    page.image = "fake-png-bytes";
    const auto nodes = parse_page(page, gateway);
    REQUIRE(nodes.size() == 1);
    CHECK(nodes[0].element_type == ElementType::figure);
    CHECK(nodes[0].id == NodeId{1, 0});
    CHECK(!nodes[0].summary.empty());
}

TEST_CASE("prose twice is a page parse error carrying the raw output") {
    Gateway gateway = scripted_gateway({"I see a slide with a chart.", "Sorry, here is prose again."});
    PageInput page;
    page.page_number = 1;
    page.image = "img";
    try {
        parse_page(page, gateway);
        FAIL("expected PageParseError");
    } catch (const PageParseError& e) {
        CHECK(e.raw_output() == "Sorry, here is prose again.");
    }
    CHECK(gateway.call_count() == 2);  // original + one repair retry
}

TEST_CASE("page input must carry exactly one payload") {
    Gateway gateway;
    PageInput page;
    page.page_number = 1;
    CHECK_THROWS_AS(parse_page(page, gateway), PreconditionError);
    page.image = "img";
    page.pre_extracted = std::vector<GraphNode>{};
    CHECK_THROWS_AS(parse_page(page, gateway), PreconditionError);
}

TEST_CASE("section headers drive the stack in update_memory") {
    Gateway gateway;  // rule-based only
    auto header = element(ElementType::section_header, "Methods");
    header.visual_attributes["header_level"] = "1";
    auto page_nodes = parse_page(pre_extracted_page(1, {header}), gateway);

    RunningMemory memory;
    const RunningMemory updated = update_memory(memory, page_nodes, gateway);
    REQUIRE(updated.section_stack.size() == 1);
    CHECK(updated.section_stack.back().title == "Methods");
    CHECK(updated.section_stack.back().depth == 1);
    CHECK(updated.section_stack.back().start_node == NodeId{1, 0});
}

TEST_CASE("empty page leaves memory unchanged") {
    Gateway gateway;
    RunningMemory memory;
    memory.themes.push_back("recurring theme");
    const RunningMemory updated = update_memory(memory, {}, gateway);
    CHECK(updated == memory);
}

TEST_CASE("model-reported unresolved refs enter memory, forward ids do not") {
    const json delta{
        {"entities", {{"Figure 3", {"p1_e0"}}}},
        {"unresolved_refs_added",
         json::array({{{"src", "p1_e0"}, {"target_description", "Figure 3"}},
                      {{"src", "p9_e0"}, {"target_description", "points forward"}}})},
        {"unresolved_refs_resolved", json::array()},
        {"themes_added", {"big data"}},
    };
    Gateway gateway = scripted_gateway({delta.dump()});

    auto nodes = parse_page(
        pre_extracted_page(1, {element(ElementType::paragraph, "As we will see in Figure 3.")}),
        gateway);
    const RunningMemory updated = update_memory({}, nodes, gateway);

    REQUIRE(updated.unresolved_refs.size() == 1);
    CHECK(updated.unresolved_refs[0].src == NodeId{1, 0});
    CHECK(updated.unresolved_refs[0].target_description == "Figure 3");
    CHECK(updated.entities.at("Figure 3") == std::vector<NodeId>{NodeId{1, 0}});
    CHECK(updated.themes == std::vector<std::string>{"big data"});
}

TEST_CASE("memory never points at pages that are not ingested yet") {
    Gateway gateway;
    RunningMemory memory;
    memory.entities["topic"].push_back(NodeId{2, 0});
    auto nodes = parse_page(pre_extracted_page(1, {element(ElementType::paragraph, "text")}),
                            gateway);
    CHECK_THROWS_AS(update_memory(memory, nodes, gateway), PreconditionError);
}

TEST_CASE("header and paragraph wire up the rule edges") {
    Gateway gateway;
    auto nodes = parse_page(
        pre_extracted_page(1, {element(ElementType::section_header, "Results"),
                               element(ElementType::paragraph, "The measurements show gains.")}),
        gateway);
    auto graph = make_graph(nodes, {});

    const auto extraction = extract_edges({}, nodes, graph, gateway);
    REQUIRE(extraction.edges.size() == 2);

    const auto reading = std::find_if(extraction.edges.begin(), extraction.edges.end(),
                                      [](const GraphEdge& e) {
                                          return e.edge_type == EdgeType::reading_order_next;
                                      });
    REQUIRE(reading != extraction.edges.end());
    CHECK(reading->src == NodeId{1, 0});
    CHECK(reading->dst == NodeId{1, 1});

    const auto section = std::find_if(extraction.edges.begin(), extraction.edges.end(),
                                      [](const GraphEdge& e) {
                                          return e.edge_type == EdgeType::same_section;
                                      });
    REQUIRE(section != extraction.edges.end());
    CHECK(section->src == NodeId{1, 1});  // paragraph -> header
    CHECK(section->dst == NodeId{1, 0});
}

TEST_CASE("caption links to the nearest figure above it") {
    Gateway gateway;
    auto nodes = parse_page(
        pre_extracted_page(
            1, {element(ElementType::figure, "Top figure", {0.1, 0.10, 0.9, 0.30}),
                element(ElementType::figure, "Close figure", {0.1, 0.35, 0.9, 0.55}),
                element(ElementType::caption, "Caption text", {0.1, 0.58, 0.9, 0.62})}),
        gateway);
    auto graph = make_graph(nodes, {});
    const auto extraction = extract_edges({}, nodes, graph, gateway);

    const auto caption = std::find_if(extraction.edges.begin(), extraction.edges.end(),
                                      [](const GraphEdge& e) {
                                          return e.edge_type == EdgeType::caption_of;
                                      });
    REQUIRE(caption != extraction.edges.end());
    CHECK(caption->src == NodeId{1, 2});
    CHECK(caption->dst == NodeId{1, 1});  // nearest above, not the top one
}

TEST_CASE("caption with nothing above it stays unlinked") {
    Gateway gateway;
    auto nodes = parse_page(
        pre_extracted_page(1, {element(ElementType::caption, "Orphan caption", {0.1, 0.05, 0.9, 0.1}),
                               element(ElementType::figure, "Figure below", {0.1, 0.4, 0.9, 0.8})}),
        gateway);
    auto graph = make_graph(nodes, {});
    const auto extraction = extract_edges({}, nodes, graph, gateway);
    CHECK(std::none_of(extraction.edges.begin(), extraction.edges.end(), [](const GraphEdge& e) {
        return e.edge_type == EdgeType::caption_of;
    }));
}

TEST_CASE("model relations resolve prior references across pages") {
    // Page 1 mentioned Figure 3 before it existed; page 4 supplies it.
    Gateway gateway;
    auto page1_nodes = parse_page(
        pre_extracted_page(1, {element(ElementType::paragraph, "Details appear in Figure 3.")}),
        gateway);
    auto graph = make_graph(page1_nodes, {});
    RunningMemory memory;
    memory.unresolved_refs.push_back({NodeId{1, 0}, "Figure 3"});

    auto page4_nodes = parse_page(
        pre_extracted_page(4, {element(ElementType::figure, "Figure 3: full architecture")}),
        gateway);
    for (const auto& n : page4_nodes) graph.nodes.emplace(n.id, n);
    graph.page_count = 4;

    const json relations = json::array({{{"src", "p1_e0"},
                                         {"dst", "p4_e0"},
                                         {"relation", "refers_to"},
                                         {"note", "resolves Figure 3"}},
                                        {{"src", "p4_e0"},
                                         {"dst", "p1_e0"},
                                         {"relation", "vibes_with"}}});
    Gateway scripted = scripted_gateway({relations.dump()});
    const auto extraction = extract_edges(memory, page4_nodes, graph, scripted);

    const auto refers = std::find_if(extraction.edges.begin(), extraction.edges.end(),
                                     [](const GraphEdge& e) {
                                         return e.edge_type == EdgeType::refers_to;
                                     });
    REQUIRE(refers != extraction.edges.end());
    CHECK(refers->src == NodeId{1, 0});
    CHECK(refers->dst == NodeId{4, 0});
    CHECK(refers->provenance == Provenance::inter_page);

    REQUIRE(extraction.warnings.size() == 1);
    CHECK(extraction.warnings[0].find("vibes_with") != std::string::npos);
}

TEST_CASE("two pre-extracted pages assemble the expected graph") {
    Gateway gateway;
    const std::vector<PageInput> pages = {
        pre_extracted_page(1, {element(ElementType::section_header, "Overview"),
                               element(ElementType::paragraph, "First paragraph"),
                               element(ElementType::paragraph, "Second paragraph")}),
        pre_extracted_page(2, {element(ElementType::paragraph, "Continues the overview"),
                               element(ElementType::figure, "A figure"),
                               element(ElementType::caption, "Figure caption",
                                       {0.1, 0.5, 0.9, 0.6})}),
    };

    const IngestionResult result = ingest_document("two-pager", pages, gateway);
    CHECK(result.report.pages_processed == 2);
    CHECK(result.report.nodes_created == 6);
    CHECK(result.graph.nodes.size() == 6);
    CHECK(result.graph.page_count == 2);

    // 2 reading-order edges per page, same_section edges for non-header nodes.
    CHECK(count_edges(result.graph, EdgeType::reading_order_next) == 4);
    CHECK(count_edges(result.graph, EdgeType::same_section) == 5);
    CHECK(result.graph.edges.size() >= 4);
    CHECK(validate_graph(result.graph).empty());
    CHECK(result.graph.communities.has_value());
    REQUIRE(result.index.has_value());
    CHECK(result.index->size() == 6);
    CHECK(result.report.llm_calls == 0);
}

TEST_CASE("reading order edges are exactly n-1 per page") {
    Gateway gateway;
    for (int n = 1; n <= 5; ++n) {
        std::vector<GraphNode> elements;
        for (int i = 0; i < n; ++i) {
            elements.push_back(element(ElementType::paragraph, "p" + std::to_string(i)));
        }
        const IngestionResult result =
            ingest_document("chain", {pre_extracted_page(1, elements)}, gateway);
        CHECK(count_edges(result.graph, EdgeType::reading_order_next) == n - 1);
    }
}

TEST_CASE("ingestion requires sequential pages starting at one") {
    Gateway gateway;
    CHECK_THROWS_AS(ingest_document("none", {}, gateway), PreconditionError);
    CHECK_THROWS_AS(
        ingest_document("late-start", {pre_extracted_page(2, {element(ElementType::paragraph, "x")})},
                        gateway),
        PreconditionError);
    CHECK_THROWS_AS(
        ingest_document("out-of-order",
                        {pre_extracted_page(1, {element(ElementType::paragraph, "x")}),
                         pre_extracted_page(1, {element(ElementType::paragraph, "y")})},
                        gateway),
        PreconditionError);
}

TEST_CASE("pre-extracted ingestion is byte-for-byte deterministic") {
    const std::vector<PageInput> pages = {
        pre_extracted_page(1, {element(ElementType::section_header, "Intro"),
                               element(ElementType::paragraph, "Opening statement")}),
        pre_extracted_page(2, {element(ElementType::paragraph, "More material"),
                               element(ElementType::chart, "Trend chart")}),
    };
    Gateway g1;
    Gateway g2;
    const auto a = serialize_graph(ingest_document("det", pages, g1).graph);
    const auto b = serialize_graph(ingest_document("det", pages, g2).graph);
    CHECK(a == b);
}

TEST_CASE("sequential causality: nothing references a later page") {
    Gateway gateway;
    std::vector<PageInput> pages;
    for (int p = 1; p <= 4; ++p) {
        pages.push_back(pre_extracted_page(
            p, {element(ElementType::section_header, "Section " + std::to_string(p)),
                element(ElementType::paragraph, "Body " + std::to_string(p))}));
    }
    const IngestionResult result = ingest_document("causal", pages, gateway);
    for (const auto& edge : result.graph.edges) {
        // Rule edges always point at the current or an earlier page.
        CHECK(edge.dst.page <= edge.src.page);
    }
}

TEST_CASE("a failing page is skipped with a warning by default") {
    // Page 2's extraction returns prose twice; pages 1 and 3 are fine. With a
    // chat backend present, pages 1 and 3 also consume edge/memory calls.
    const std::vector<std::string> script = {"[]", "{}", "prose", "more prose", "[]", "{}"};
    Gateway gateway = scripted_gateway(script);
    PageInput bad;
    bad.page_number = 2;
    bad.image = "img";

    const std::vector<PageInput> pages = {
        pre_extracted_page(1, {element(ElementType::paragraph, "first page")}),
        bad,
        pre_extracted_page(3, {element(ElementType::paragraph, "third page")}),
    };
    const IngestionResult result = ingest_document("skippy", pages, gateway);
    CHECK(result.report.pages_processed == 2);
    CHECK(result.graph.nodes.size() == 2);
    REQUIRE(result.report.warnings.size() == 1);
    CHECK(result.report.warnings[0].find("page 2") != std::string::npos);

    Gateway strict = scripted_gateway(script);
    IngestionOptions options;
    options.fail_fast = true;
    CHECK_THROWS_AS(ingest_document("skippy", pages, strict, options), PageParseError);
}

TEST_CASE("pre-extracted file loader validates shape") {
    const auto path = std::filesystem::temp_directory_path() / "ladrag_elements.json";
    const json pages = json::array(
        {json::array({{{"element_type", "title"},
                       {"bbox", {0.1, 0.1, 0.9, 0.2}},
                       {"content", "Title"},
                       {"summary", "The document title."}}}),
         json::array({{{"element_type", "paragraph"},
                       {"bbox", {0.1, 0.3, 0.9, 0.5}},
                       {"content", "Body"},
                       {"summary", "A body paragraph."},
                       {"page", 2}}})});
    write_file(path, pages.dump());

    const auto loaded = load_pre_extracted(path);
    REQUIRE(loaded.size() == 2);
    CHECK(loaded[0].page_number == 1);
    REQUIRE(loaded[1].pre_extracted.has_value());
    CHECK(loaded[1].pre_extracted->front().summary == "A body paragraph.");

    write_file(path, R"({"not": "an array"})");
    CHECK_THROWS_AS(load_pre_extracted(path), ParseError);
}

TEST_CASE("section depth inference prefers the explicit level") {
    GraphNode node = element(ElementType::section_header, "Header");
    node.visual_attributes["header_level"] = "2";
    node.visual_attributes["font_size"] = "30";
    CHECK(infer_section_depth(node) == 2);

    node.visual_attributes.erase("header_level");
    CHECK(infer_section_depth(node) == 1);  // 30pt: top band
    node.visual_attributes["font_size"] = "16";
    CHECK(infer_section_depth(node) == 2);
    node.visual_attributes["font_size"] = "11";
    CHECK(infer_section_depth(node) == 3);
    node.visual_attributes.clear();
    CHECK(infer_section_depth(node) == 1);  // missing data: shallowest
}

}  // TEST_SUITE
