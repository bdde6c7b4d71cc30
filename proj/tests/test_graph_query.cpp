#include <doctest.h>

#include <atomic>
#include <random>
#include <set>
#include <thread>

#include <json.hpp>

#include "ladrag/errors.hpp"
#include "ladrag/graph_query.hpp"
#include "ladrag/louvain.hpp"
#include "test_support.hpp"

using namespace ladrag;
using namespace ladrag::testsupport;
using nlohmann::json;

namespace {

// Six nodes across three pages, two figures, one caption wired to a figure.
DocumentGraph six_node_fixture() {
    auto header = make_node(1, 0, ElementType::section_header, "Results section header");
    auto para = make_node(1, 1, ElementType::paragraph, "Discussion of results, see figures.");
    para.content = "Discussion referencing Figure 2 on the next page.";
    auto fig1 = make_node(2, 0, ElementType::figure, "Figure showing accuracy per model.");
    auto cap = make_node(2, 1, ElementType::caption, "Caption for the accuracy figure.");
    auto fig2 = make_node(3, 0, ElementType::figure, "Figure showing latency distribution.");
    auto tail = make_node(3, 1, ElementType::paragraph, "Closing remarks paragraph.");
    tail.visual_attributes["emphasis"] = "bold";

    return make_graph(
        {header, para, fig1, cap, fig2, tail},
        {
            make_edge(para.id, header.id, EdgeType::same_section),
            make_edge(header.id, para.id, EdgeType::reading_order_next),
            make_edge(cap.id, fig1.id, EdgeType::caption_of),
            make_edge(para.id, fig1.id, EdgeType::refers_to),
            make_edge(fig1.id, fig2.id, EdgeType::continues_on),
        });
}

GraphQuery parse_query(const std::string& text) {
    return GraphQuery::from_json(json::parse(text));
}

}  // namespace

TEST_SUITE("graph_query") {

TEST_CASE("element type filter finds exactly the figures") {
    const auto g = six_node_fixture();
    const auto ids =
        execute_query(g, parse_query(R"({"filters":[{"field":"element_type","in":["figure"]}]})"));
    CHECK(ids == std::vector<NodeId>{NodeId{2, 0}, NodeId{3, 0}});
}

TEST_CASE("page filter plus inbound traversal matches brute force") {
    const auto g = six_node_fixture();
    const auto ids = execute_query(
        g, parse_query(
               R"({"filters":[{"field":"page","min":2,"max":2}],"traverse":{"edge_type":"refers_to","direction":"in","depth":1}})"));

    // Brute force: page-2 nodes, plus anything with a refers_to edge into them.
    std::set<NodeId> expected;
    for (const auto& [id, node] : g.nodes) {
        if (node.page == 2) expected.insert(id);
    }
    for (const auto& edge : g.edges) {
        if (edge.edge_type == EdgeType::refers_to && expected.contains(edge.dst)) {
            expected.insert(edge.src);
        }
    }
    CHECK(ids == std::vector<NodeId>(expected.begin(), expected.end()));
}

TEST_CASE("a query without filters or traverse is malformed") {
    CHECK_THROWS_AS(parse_query(R"({"filters":[]})"), QueryError);
    CHECK_THROWS_AS(parse_query(R"({})"), QueryError);

    GraphQuery empty;
    CHECK_THROWS_AS(execute_query(six_node_fixture(), empty), QueryError);
}

TEST_CASE("malformed predicates name the offender") {
    try {
        parse_query(R"({"filters":[{"field":"element_type","in":[]}]})");
        FAIL("expected QueryError");
    } catch (const QueryError& e) {
        CHECK(std::string(e.what()).find("element_type") != std::string::npos);
    }
    try {
        parse_query(R"({"filters":[{"field":"sparkle","value":1}]})");
        FAIL("expected QueryError");
    } catch (const QueryError& e) {
        CHECK(std::string(e.what()).find("sparkle") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_query(R"({"filters":[{"field":"content","regex":"(["}]})"), QueryError);
    CHECK_THROWS_AS(parse_query(R"({"filters":[{"field":"page","min":5,"max":2}]})"), QueryError);
}

TEST_CASE("traverse depth is capped") {
    CHECK_THROWS_AS(
        parse_query(R"({"filters":[{"field":"page","min":1,"max":1}],"traverse":{"depth":9}})"),
        QueryError);
    CHECK_THROWS_AS(
        parse_query(
            R"({"filters":[{"field":"page","min":1,"max":1}],"traverse":{"direction":"sideways"}})"),
        QueryError);
}

TEST_CASE("content and visual attribute predicates") {
    const auto g = six_node_fixture();
    CHECK(execute_query(g, parse_query(
                               R"({"filters":[{"field":"content","contains":"Figure 2"}]})")) ==
          std::vector<NodeId>{NodeId{1, 1}});
    CHECK(execute_query(g, parse_query(
                               R"({"filters":[{"field":"content","regex":"Figure \\d"}]})")) ==
          std::vector<NodeId>{NodeId{1, 1}});
    CHECK(execute_query(
              g, parse_query(
                     R"({"filters":[{"field":"visual_attributes","key":"emphasis","value":"bold"}]})")) ==
          std::vector<NodeId>{NodeId{3, 1}});
}

TEST_CASE("traverse-only query seeds from the whole graph") {
    // With no filters every node matches vacuously; traversal adds nothing new.
    const auto g = six_node_fixture();
    const auto ids = execute_query(g, parse_query(R"({"traverse":{"direction":"both","depth":1}})"));
    CHECK(ids.size() == g.nodes.size());
}

TEST_CASE("concurrent readers see consistent results") {
    const auto g = six_node_fixture();
    auto partitioned = g;
    partitioned.communities = louvain_partition(g);

    const auto expected =
        execute_query(g, parse_query(R"({"filters":[{"field":"element_type","in":["figure"]}]})"));
    std::vector<std::thread> workers;
    std::atomic<int> mismatches{0};
    for (int t = 0; t < 4; ++t) {
        workers.emplace_back([&] {
            for (int i = 0; i < 50; ++i) {
                const auto ids = execute_query(
                    partitioned,
                    parse_query(R"({"filters":[{"field":"element_type","in":["figure"]}]})"));
                if (ids != expected) ++mismatches;
                if (contextualize(partitioned, ids.front()).empty()) ++mismatches;
            }
        });
    }
    for (auto& w : workers) w.join();
    CHECK(mismatches == 0);
}

TEST_CASE("limit truncates the sorted result") {
    const auto g = six_node_fixture();
    const auto ids = execute_query(
        g, parse_query(R"({"filters":[{"field":"page","min":1,"max":3}],"limit":2})"));
    CHECK(ids == std::vector<NodeId>{NodeId{1, 0}, NodeId{1, 1}});
}

TEST_CASE("query soundness against brute force on random graphs") {
    std::mt19937 rng(314159);
    for (int trial = 0; trial < 10; ++trial) {
        // Random graph, up to 50 nodes.
        const int n = 10 + static_cast<int>(rng() % 41);
        std::vector<GraphNode> nodes;
        for (int i = 0; i < n; ++i) {
            nodes.push_back(make_node(1 + i / 5, i % 5,
                                      all_element_types()[rng() % all_element_types().size()]));
        }
        std::vector<GraphEdge> edges;
        for (int e = 0; e < n; ++e) {
            const auto& a = nodes[rng() % nodes.size()];
            const auto& b = nodes[rng() % nodes.size()];
            if (a.id == b.id) continue;
            edges.push_back(make_edge(a.id, b.id, all_edge_types()[rng() % all_edge_types().size()]));
        }
        const auto g = make_graph(nodes, edges);

        GraphQuery query;
        Filter f;
        f.kind = Filter::Kind::element_type_in;
        f.types = {all_element_types()[rng() % all_element_types().size()]};
        query.filters.push_back(f);
        Traverse t;
        t.direction = Direction::both;
        t.depth = 1 + static_cast<int>(rng() % 3);
        query.traverse = t;

        const auto ids = execute_query(g, query);

        // Brute force: satisfying set, then depth-bounded undirected closure.
        std::set<NodeId> satisfying;
        for (const auto& node : nodes) {
            if (node.element_type == f.types[0]) satisfying.insert(node.id);
        }
        std::set<NodeId> reachable = satisfying;
        for (int step = 0; step < t.depth; ++step) {
            std::set<NodeId> grown = reachable;
            for (const auto& edge : edges) {
                if (reachable.contains(edge.src)) grown.insert(edge.dst);
                if (reachable.contains(edge.dst)) grown.insert(edge.src);
            }
            reachable = std::move(grown);
        }
        CHECK(std::set<NodeId>(ids.begin(), ids.end()) == reachable);
    }
}

TEST_CASE("neighbors respects type filter and direction") {
    const auto g = six_node_fixture();
    CHECK(neighbors(g, NodeId{2, 1}, EdgeType::caption_of, Direction::out) ==
          std::vector<NodeId>{NodeId{2, 0}});
    // fig1 touches: caption (in), para refers_to (in), fig2 continues_on (out).
    CHECK(neighbors(g, NodeId{2, 0}, std::nullopt, Direction::both).size() == 3);
    CHECK_THROWS_AS(neighbors(g, NodeId{9, 9}, std::nullopt, Direction::both), UnknownNodeError);
}

TEST_CASE("contextualize returns the seed's whole community") {
    auto g = index_graph(6, {{0, 1}, {0, 2}, {1, 2}, {3, 4}, {3, 5}, {4, 5}, {2, 3}});
    g.communities = louvain_partition(g);
    const auto ids = contextualize(g, NodeId{1, 4});
    CHECK(ids == std::vector<NodeId>{NodeId{1, 3}, NodeId{1, 4}, NodeId{1, 5}});
}

TEST_CASE("contextualize crosses continuation edges beyond the community") {
    // Header and its continuation on the next page land in different
    // communities, but the continues_on edge still pulls the pair together.
    auto header = make_node(1, 0, ElementType::section_header, "Reference list header");
    auto block1 = make_node(1, 1, ElementType::list, "Reference entries one through five");
    auto block2 = make_node(2, 0, ElementType::list, "Reference entries six through ten");
    auto far = make_node(3, 0, ElementType::paragraph, "Unrelated closing text");
    auto g = make_graph({header, block1, block2, far},
                        {make_edge(block1.id, header.id, EdgeType::same_section),
                         make_edge(block1.id, block2.id, EdgeType::continues_on)});
    g.communities = CommunityPartition{
        {{header.id, 0}, {block1.id, 0}, {block2.id, 1}, {far.id, 1}}, 0.0};

    const auto ids = contextualize(g, block1.id);
    CHECK(ids == std::vector<NodeId>{header.id, block1.id, block2.id});
}

TEST_CASE("contextualize of an isolated node is just the seed") {
    auto g = make_graph({make_node(1, 0), make_node(2, 0)}, {});
    g.communities = CommunityPartition{{{NodeId{1, 0}, 0}, {NodeId{2, 0}, 1}}, 0.0};
    CHECK(contextualize(g, NodeId{1, 0}) == std::vector<NodeId>{NodeId{1, 0}});
}

TEST_CASE("contextualize preconditions") {
    auto g = make_graph({make_node(1, 0)}, {});
    CHECK_THROWS_AS(contextualize(g, NodeId{4, 4}), UnknownNodeError);
    CHECK_THROWS_AS(contextualize(g, NodeId{1, 0}), PreconditionError);  // no communities
}

TEST_CASE("contextualize is closed over a community when neighbor sets are empty") {
    // refers_to edges build community structure but are not expansion edges,
    // so every member's expansion is exactly the shared community.
    auto g = make_graph({make_node(1, 0), make_node(1, 1), make_node(1, 2), make_node(2, 0)},
                        {make_edge(NodeId{1, 0}, NodeId{1, 1}, EdgeType::refers_to),
                         make_edge(NodeId{1, 1}, NodeId{1, 2}, EdgeType::refers_to),
                         make_edge(NodeId{1, 0}, NodeId{1, 2}, EdgeType::refers_to)});
    g.communities = louvain_partition(g);

    const auto base = contextualize(g, NodeId{1, 0});
    for (const auto& member : base) {
        const auto expanded = contextualize(g, member);
        CHECK(std::includes(expanded.begin(), expanded.end(), base.begin(), base.end()));
    }
}

TEST_CASE("query json round trip") {
    const auto query = parse_query(
        R"({"filters":[{"field":"element_type","in":["chart"]}],"traverse":{"edge_type":"caption_of","direction":"in","depth":2},"limit":7})");
    const GraphQuery back = GraphQuery::from_json(query.to_json());
    CHECK(back.to_json() == query.to_json());
}

}  // TEST_SUITE
