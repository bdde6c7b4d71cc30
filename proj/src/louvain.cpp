#include "ladrag/louvain.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <vector>

#include "ladrag/errors.hpp"

namespace ladrag {

namespace {

// Weighted undirected graph in index space; self_weight holds edges folded
// inside a meta-node during aggregation.
struct LevelGraph {
    std::vector<std::vector<std::pair<int, double>>> adj;
    std::vector<double> self_weight;
    double total_weight = 0.0;  // m: sum of edge weights incl. self loops

    int size() const { return static_cast<int>(adj.size()); }

    double strength(int v) const {
        double k = 2.0 * self_weight[v];
        for (const auto& [u, w] : adj[v]) k += w;
        return k;
    }
};

LevelGraph simple_view(const DocumentGraph& graph, const std::vector<NodeId>& ids) {
    std::map<NodeId, int> index;
    for (std::size_t i = 0; i < ids.size(); ++i) index[ids[i]] = static_cast<int>(i);

    std::set<std::pair<int, int>> pairs;
    for (const auto& edge : graph.edges) {
        auto a = index.find(edge.src);
        auto b = index.find(edge.dst);
        if (a == index.end() || b == index.end()) continue;
        if (a->second == b->second) continue;
        pairs.emplace(std::min(a->second, b->second), std::max(a->second, b->second));
    }

    LevelGraph g;
    g.adj.resize(ids.size());
    g.self_weight.assign(ids.size(), 0.0);
    for (const auto& [a, b] : pairs) {
        g.adj[a].emplace_back(b, 1.0);
        g.adj[b].emplace_back(a, 1.0);
        g.total_weight += 1.0;
    }
    return g;
}

// One level of local moves. Returns the community label per node and whether
// any node moved.
bool local_moves(const LevelGraph& g, std::vector<int>& community, double resolution,
                 double min_gain) {
    const int n = g.size();
    const double m = g.total_weight;

    std::vector<double> strength(n);
    for (int v = 0; v < n; ++v) strength[v] = g.strength(v);

    std::vector<double> sigma_tot(n, 0.0);
    for (int v = 0; v < n; ++v) sigma_tot[community[v]] += strength[v];

    bool any_move = false;
    bool moved = true;
    while (moved) {
        moved = false;
        for (int v = 0; v < n; ++v) {
            const int home = community[v];

            // Weights from v into each adjacent community.
            std::map<int, double> links;
            links[home];  // staying put is always a candidate
            for (const auto& [u, w] : g.adj[v]) links[community[u]] += w;

            sigma_tot[home] -= strength[v];

            // Gain of inserting v into community c, with v currently removed:
            // k_in(c)/m - resolution * sigma_tot(c) * k_v / (2 m^2)
            auto insert_gain = [&](int c) {
                auto it = links.find(c);
                const double k_in = it == links.end() ? 0.0 : it->second;
                return k_in / m - resolution * sigma_tot[c] * strength[v] / (2.0 * m * m);
            };

            const double stay_gain = insert_gain(home);
            int best = home;
            double best_gain = stay_gain;
            for (const auto& [c, _] : links) {  // std::map: ascending label order
                if (c == home) continue;
                const double gain = insert_gain(c);
                if (gain > best_gain + min_gain) {
                    best_gain = gain;
                    best = c;
                }
            }

            sigma_tot[best] += strength[v];
            if (best != home) {
                community[v] = best;
                moved = true;
                any_move = true;
            }
        }
    }
    return any_move;
}

// Relabels communities contiguously. First appearance while scanning in
// ascending node index wins, which orders labels by smallest member.
int compact_labels(std::vector<int>& community) {
    std::map<int, int> order;
    int next = 0;
    for (int label : community) {
        if (auto [it, inserted] = order.try_emplace(label, next); inserted) ++next;
    }
    for (int& label : community) label = order[label];
    return next;
}

LevelGraph aggregate(const LevelGraph& g, const std::vector<int>& community, int count) {
    LevelGraph meta;
    meta.adj.resize(count);
    meta.self_weight.assign(count, 0.0);
    meta.total_weight = g.total_weight;

    std::vector<std::map<int, double>> links(count);
    for (int v = 0; v < g.size(); ++v) {
        const int cv = community[v];
        meta.self_weight[cv] += g.self_weight[v];
        for (const auto& [u, w] : g.adj[v]) {
            const int cu = community[u];
            if (cu == cv) {
                if (u > v) meta.self_weight[cv] += w;
            } else {
                links[cv][cu] += w;
            }
        }
    }
    for (int c = 0; c < count; ++c) {
        for (const auto& [other, w] : links[c]) meta.adj[c].emplace_back(other, w);
    }
    return meta;
}

}  // namespace

double partition_modularity(const DocumentGraph& graph, const std::map<NodeId, int>& assignment) {
    std::vector<NodeId> ids;
    ids.reserve(graph.nodes.size());
    for (const auto& [id, node] : graph.nodes) ids.push_back(id);
    const LevelGraph g = simple_view(graph, ids);
    const double m = g.total_weight;
    if (m == 0.0) return 0.0;

    std::map<int, double> intra;   // edges fully inside a community
    std::map<int, double> degree;  // summed degrees per community
    for (std::size_t i = 0; i < ids.size(); ++i) {
        const int c = assignment.at(ids[i]);
        degree[c] += g.strength(static_cast<int>(i));
        for (const auto& [u, w] : g.adj[i]) {
            if (static_cast<int>(i) < u && assignment.at(ids[u]) == c) intra[c] += w;
        }
    }

    double q = 0.0;
    for (const auto& [c, d] : degree) {
        const double l = intra.contains(c) ? intra[c] : 0.0;
        q += l / m - (d / (2.0 * m)) * (d / (2.0 * m));
    }
    return q;
}

CommunityPartition louvain_partition(const DocumentGraph& graph, const LouvainOptions& options) {
    if (graph.nodes.empty()) throw EmptyGraphError("louvain_partition requires a non-empty graph");

    std::vector<NodeId> ids;
    ids.reserve(graph.nodes.size());
    for (const auto& [id, node] : graph.nodes) ids.push_back(id);

    LevelGraph level = simple_view(graph, ids);
    std::vector<int> membership(ids.size());
    std::iota(membership.begin(), membership.end(), 0);

    if (level.total_weight > 0.0) {
        while (true) {
            std::vector<int> community(level.size());
            std::iota(community.begin(), community.end(), 0);
            const bool moved = local_moves(level, community, options.resolution, options.min_gain);
            if (!moved) break;
            const int count = compact_labels(community);
            for (int& c : membership) c = community[c];
            if (count == level.size()) break;
            level = aggregate(level, community, count);
        }
    }

    compact_labels(membership);

    CommunityPartition partition;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        partition.assignment[ids[i]] = membership[i];
    }
    partition.modularity = partition_modularity(graph, partition.assignment);
    return partition;
}

}  // namespace ladrag
