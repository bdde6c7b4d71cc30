#pragma once

#include <string>
#include <vector>

#include "ladrag/graph_model.hpp"

namespace ladrag {
namespace prompts {

// Model-facing prompt builders. Each extraction prompt demands a single JSON
// value and nothing else; the ingestion code retries once with a repair
// notice before giving up.

std::string page_extraction_system();
std::string page_extraction_user(int page_number);

std::string memory_update_system();
std::string memory_update_user(const RunningMemory& memory,
                               const std::vector<GraphNode>& new_nodes);

std::string edge_extraction_system();
std::string edge_extraction_user(const RunningMemory& memory,
                                 const std::vector<GraphNode>& new_nodes,
                                 const DocumentGraph& graph_so_far);

std::string agent_system(const DocumentGraph& graph, bool enable_graph_query,
                         bool enable_contextualize, int max_traverse_depth);

std::string repair_notice(const std::string& reason);

}  // namespace prompts
}  // namespace ladrag
