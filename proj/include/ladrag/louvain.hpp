#pragma once

#include <map>

#include "ladrag/graph_model.hpp"

namespace ladrag {

struct LouvainOptions {
    double resolution = 1.0;
    double min_gain = 1e-9;  // moves below this are rejected
};

// Two-phase Louvain over the undirected, weight-1 view of the edges (edge
// direction and type are ignored; parallel edges collapse to one). The local
// move pass iterates nodes in ascending id, ties between candidate
// communities resolve toward the smaller community label, and phases repeat
// until no move yields gain above min_gain. Community indices are contiguous
// from 0, ordered by smallest member id. The reported modularity is the
// standard Newman-Girvan value of the final assignment at resolution 1.
//
// EmptyGraphError on a graph with no nodes. A graph with no edges yields one
// community per node and modularity 0.
CommunityPartition louvain_partition(const DocumentGraph& graph, const LouvainOptions& options = {});

// Newman-Girvan modularity of an assignment on the same undirected simple
// view louvain_partition uses. Exposed for oracles and validation.
double partition_modularity(const DocumentGraph& graph, const std::map<NodeId, int>& assignment);

}  // namespace ladrag
