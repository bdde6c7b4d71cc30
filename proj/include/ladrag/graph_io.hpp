#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "ladrag/graph_model.hpp"

namespace ladrag {

// Canonical JSON: nodes sorted by id, edges sorted by (src, dst, edge_type),
// object keys sorted, compact separators, empty optionals omitted. Two graphs
// equal up to insertion order serialize to identical bytes.
std::string serialize_graph(const DocumentGraph& graph);  // ValidationError if invalid

// Distinct failures: ParseError (malformed JSON), SchemaError (unknown
// schema_version), ValidationError (invariant breach).
DocumentGraph deserialize_graph(std::string_view bytes);

nlohmann::json graph_to_json(const DocumentGraph& graph);
DocumentGraph graph_from_json(const nlohmann::json& j);

void save_graph(const DocumentGraph& graph, const std::filesystem::path& path);
DocumentGraph load_graph(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);   // IoError
void write_file(const std::filesystem::path& path, std::string_view data);

nlohmann::json memory_to_json(const RunningMemory& memory);
nlohmann::json node_to_json(const GraphNode& node);

}  // namespace ladrag
