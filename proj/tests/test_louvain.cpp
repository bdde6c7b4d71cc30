#include <doctest.h>

#include <random>
#include <set>

#include "ladrag/errors.hpp"
#include "ladrag/louvain.hpp"
#include "test_support.hpp"

using namespace ladrag;
using namespace ladrag::testsupport;

namespace {

std::vector<int> assignment_vector(const CommunityPartition& partition, int n) {
    std::vector<int> out(n, -1);
    for (const auto& [id, c] : partition.assignment) out[id.index] = c;
    return out;
}

// Connected random graph on n nodes: a random spanning tree plus extra edges.
std::vector<std::pair<int, int>> random_connected_edges(int n, std::mt19937& rng) {
    std::vector<std::pair<int, int>> edges;
    for (int v = 1; v < n; ++v) {
        edges.emplace_back(static_cast<int>(rng() % v), v);
    }
    const int extra = static_cast<int>(rng() % (n + 1));
    for (int e = 0; e < extra; ++e) {
        const int a = static_cast<int>(rng() % n);
        const int b = static_cast<int>(rng() % n);
        if (a != b) edges.emplace_back(std::min(a, b), std::max(a, b));
    }
    return edges;
}

}  // namespace

TEST_SUITE("louvain") {

TEST_CASE("two cliques joined by a bridge split at the bridge") {
    const std::vector<std::pair<int, int>> edges = {
        {0, 1}, {0, 2}, {1, 2},  // clique A
        {3, 4}, {3, 5}, {4, 5},  // clique B
        {2, 3},                  // bridge
    };
    const auto g = index_graph(6, edges);
    const CommunityPartition partition = louvain_partition(g);

    const auto assignment = assignment_vector(partition, 6);
    CHECK(assignment[0] == assignment[1]);
    CHECK(assignment[1] == assignment[2]);
    CHECK(assignment[3] == assignment[4]);
    CHECK(assignment[4] == assignment[5]);
    CHECK(assignment[0] != assignment[3]);
    CHECK(assignment[0] == 0);  // indices ordered by smallest member
    CHECK(assignment[3] == 1);

    // Brute force over all partitions of 6 nodes confirms optimality.
    const double best = brute_force_best_modularity(6, edges);
    CHECK(partition.modularity == doctest::Approx(best).epsilon(1e-9));
}

TEST_CASE("edgeless graph: every node alone, modularity zero") {
    const auto g = index_graph(4, {});
    const CommunityPartition partition = louvain_partition(g);
    std::set<int> labels;
    for (const auto& [id, c] : partition.assignment) labels.insert(c);
    CHECK(labels.size() == 4);
    CHECK(partition.modularity == 0.0);
}

TEST_CASE("a triangle is one community") {
    const std::vector<std::pair<int, int>> edges = {{0, 1}, {1, 2}, {0, 2}};
    const auto g = index_graph(3, edges);
    const CommunityPartition partition = louvain_partition(g);
    const auto assignment = assignment_vector(partition, 3);
    CHECK(assignment[0] == assignment[1]);
    CHECK(assignment[1] == assignment[2]);
    CHECK(partition.modularity ==
          doctest::Approx(brute_force_best_modularity(3, edges)).epsilon(1e-9));
}

TEST_CASE("empty graph is an error") {
    DocumentGraph g;
    CHECK_THROWS_AS(louvain_partition(g), EmptyGraphError);
}

TEST_CASE("identical graphs give identical partitions") {
    std::mt19937 rng(5150);
    const auto edges = random_connected_edges(8, rng);
    const auto g = index_graph(8, edges);
    const CommunityPartition a = louvain_partition(g);
    const CommunityPartition b = louvain_partition(g);
    CHECK(a.assignment == b.assignment);
    CHECK(a.modularity == b.modularity);
}

TEST_CASE("reported modularity matches the independent formula") {
    std::mt19937 rng(61803);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 4 + static_cast<int>(rng() % 5);
        const auto edges = random_connected_edges(n, rng);
        const auto g = index_graph(n, edges);
        const CommunityPartition partition = louvain_partition(g);
        const auto assignment = assignment_vector(partition, n);
        CHECK(partition.modularity ==
              doctest::Approx(brute_force_modularity(n, edges, assignment)).epsilon(1e-12));
    }
}

TEST_CASE("small random graphs reach the brute-force optimum or stay deterministic") {
    std::mt19937 rng(90210);
    int optimal = 0;
    for (int trial = 0; trial < 12; ++trial) {
        const int n = 3 + static_cast<int>(rng() % 6);
        const auto edges = random_connected_edges(n, rng);
        const auto g = index_graph(n, edges);

        const CommunityPartition partition = louvain_partition(g);
        const double best = brute_force_best_modularity(n, edges);
        CHECK(partition.modularity <= best + 1e-9);  // oracle soundness
        if (partition.modularity >= best - 1e-9) ++optimal;

        // Determinism regardless of optimality.
        CHECK(louvain_partition(g).assignment == partition.assignment);
    }
    CHECK(optimal >= 9);  // the heuristic should be optimal on most tiny graphs
}

TEST_CASE("parallel edges collapse to the simple undirected view") {
    // Same pair connected by two differently-typed edges.
    auto g = index_graph(3, {{0, 1}, {1, 2}});
    g.edges.push_back(make_edge(NodeId{1, 1}, NodeId{1, 0}, EdgeType::same_section));
    const CommunityPartition partition = louvain_partition(g);
    CHECK(partition.modularity ==
          doctest::Approx(brute_force_modularity(
                              3, {{0, 1}, {1, 2}}, assignment_vector(partition, 3)))
              .epsilon(1e-12));
}

TEST_CASE("resolution parameter shifts the granularity") {
    // High resolution favors smaller communities on the bridge fixture.
    const std::vector<std::pair<int, int>> edges = {
        {0, 1}, {0, 2}, {1, 2}, {3, 4}, {3, 5}, {4, 5}, {2, 3}};
    const auto g = index_graph(6, edges);
    const auto coarse = louvain_partition(g, {0.1, 1e-9});
    std::set<int> coarse_labels;
    for (const auto& [id, c] : coarse.assignment) coarse_labels.insert(c);
    CHECK(coarse_labels.size() == 1);  // low resolution merges everything

    const auto standard = louvain_partition(g);
    std::set<int> standard_labels;
    for (const auto& [id, c] : standard.assignment) standard_labels.insert(c);
    CHECK(standard_labels.size() == 2);
}

}  // TEST_SUITE
