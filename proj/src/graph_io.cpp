#include "ladrag/graph_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "ladrag/errors.hpp"

namespace ladrag {

namespace {

using nlohmann::json;

json bbox_to_json(const BoundingBox& b) {
    return json::array({b.x0, b.y0, b.x1, b.y1});
}

BoundingBox bbox_from_json(const json& j) {
    if (!j.is_array() || j.size() != 4) {
        throw ParseError("bbox must be an array of four numbers");
    }
    BoundingBox b;
    b.x0 = j[0].get<double>();
    b.y0 = j[1].get<double>();
    b.x1 = j[2].get<double>();
    b.y1 = j[3].get<double>();
    return b;
}

json edge_to_json(const GraphEdge& e) {
    json j{
        {"src", e.src.str()},
        {"dst", e.dst.str()},
        {"edge_type", to_string(e.edge_type)},
        {"provenance", to_string(e.provenance)},
    };
    if (!e.note.empty()) j["note"] = e.note;
    return j;
}

GraphEdge edge_from_json(const json& j) {
    GraphEdge e;
    e.src = NodeId::parse(j.at("src").get<std::string>());
    e.dst = NodeId::parse(j.at("dst").get<std::string>());
    auto edge_type = edge_type_from_label(j.at("edge_type").get<std::string>());
    if (!edge_type) {
        throw ParseError("unknown edge_type: " + j.at("edge_type").get<std::string>());
    }
    e.edge_type = *edge_type;
    const std::string prov = j.at("provenance").get<std::string>();
    if (prov == "intra_page") {
        e.provenance = Provenance::intra_page;
    } else if (prov == "inter_page") {
        e.provenance = Provenance::inter_page;
    } else {
        throw ParseError("unknown provenance: " + prov);
    }
    e.note = j.value("note", std::string{});
    return e;
}

}  // namespace

json node_to_json(const GraphNode& n) {
    return json{
        {"id", n.id.str()},
        {"page", n.page},
        {"element_type", to_string(n.element_type)},
        {"bbox", bbox_to_json(n.bbox)},
        {"content", n.content},
        {"summary", n.summary},
        {"visual_attributes", json(n.visual_attributes)},
    };
}

namespace {

GraphNode node_from_json(const json& j) {
    GraphNode n;
    n.id = NodeId::parse(j.at("id").get<std::string>());
    n.page = j.at("page").get<int>();
    n.element_type = element_type_from_label(j.at("element_type").get<std::string>());
    n.bbox = bbox_from_json(j.at("bbox"));
    n.content = j.value("content", std::string{});
    n.summary = j.at("summary").get<std::string>();
    if (j.contains("visual_attributes")) {
        n.visual_attributes = j.at("visual_attributes").get<std::map<std::string, std::string>>();
    }
    return n;
}

}  // namespace

json graph_to_json(const DocumentGraph& graph) {
    json nodes = json::array();
    for (const auto& [id, node] : graph.nodes) {  // map iteration: ascending id
        nodes.push_back(node_to_json(node));
    }

    std::vector<GraphEdge> sorted_edges = graph.edges;
    std::sort(sorted_edges.begin(), sorted_edges.end(), [](const GraphEdge& a, const GraphEdge& b) {
        return std::tie(a.src, a.dst, a.edge_type) < std::tie(b.src, b.dst, b.edge_type);
    });
    json edges = json::array();
    for (const auto& edge : sorted_edges) edges.push_back(edge_to_json(edge));

    json j{
        {"schema_version", graph.schema_version},
        {"doc_id", graph.doc_id},
        {"page_count", graph.page_count},
        {"nodes", std::move(nodes)},
        {"edges", std::move(edges)},
    };
    if (graph.communities) {
        json assignment = json::object();
        for (const auto& [id, community] : graph.communities->assignment) {
            assignment[id.str()] = community;
        }
        j["communities"] = json{
            {"assignment", std::move(assignment)},
            {"modularity", graph.communities->modularity},
        };
    }
    return j;
}

DocumentGraph graph_from_json(const json& j) {
    if (!j.is_object() || !j.contains("schema_version")) {
        throw ParseError("graph JSON must be an object with a schema_version field");
    }
    const int version = j.at("schema_version").get<int>();
    if (version != kGraphSchemaVersion) {
        throw SchemaError("unknown schema_version " + std::to_string(version) + ", expected " +
                          std::to_string(kGraphSchemaVersion));
    }

    DocumentGraph g;
    g.schema_version = version;
    g.doc_id = j.at("doc_id").get<std::string>();
    g.page_count = j.at("page_count").get<int>();
    for (const auto& jn : j.at("nodes")) {
        GraphNode node = node_from_json(jn);
        if (g.nodes.contains(node.id)) {
            throw ValidationError("duplicate node id " + node.id.str());
        }
        g.nodes.emplace(node.id, std::move(node));
    }
    for (const auto& je : j.at("edges")) {
        g.edges.push_back(edge_from_json(je));
    }
    if (j.contains("communities")) {
        CommunityPartition partition;
        const auto& jc = j.at("communities");
        for (const auto& [key, value] : jc.at("assignment").items()) {
            partition.assignment[NodeId::parse(key)] = value.get<int>();
        }
        partition.modularity = jc.at("modularity").get<double>();
        g.communities = std::move(partition);
    }
    return g;
}

std::string serialize_graph(const DocumentGraph& graph) {
    auto violations = validate_graph(graph);
    if (!violations.empty()) {
        std::ostringstream msg;
        msg << "cannot serialize invalid graph (" << violations.size() << " violations):";
        for (const auto& v : violations) {
            msg << " [" << to_string(v.kind) << " " << v.subject << "]";
        }
        throw ValidationError(msg.str());
    }
    return graph_to_json(graph).dump();
}

DocumentGraph deserialize_graph(std::string_view bytes) {
    json j;
    try {
        j = json::parse(bytes);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("graph JSON parse failure: ") + e.what());
    }
    DocumentGraph g;
    try {
        g = graph_from_json(j);
    } catch (const json::exception& e) {
        throw ParseError(std::string("graph JSON shape failure: ") + e.what());
    }
    auto violations = validate_graph(g);
    if (!violations.empty()) {
        std::ostringstream msg;
        msg << "deserialized graph violates invariants:";
        for (const auto& v : violations) {
            msg << " [" << to_string(v.kind) << " " << v.subject << "]";
        }
        throw ValidationError(msg.str());
    }
    return g;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::filesystem::path& path, std::string_view data) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw IoError("write failed for " + path.string());
}

void save_graph(const DocumentGraph& graph, const std::filesystem::path& path) {
    write_file(path, serialize_graph(graph));
}

DocumentGraph load_graph(const std::filesystem::path& path) {
    return deserialize_graph(read_file(path));
}

json memory_to_json(const RunningMemory& memory) {
    json sections = json::array();
    for (const auto& s : memory.section_stack) {
        sections.push_back({{"title", s.title}, {"depth", s.depth}, {"start_node", s.start_node.str()}});
    }
    json entities = json::object();
    for (const auto& [name, mentions] : memory.entities) {
        json ids = json::array();
        for (const auto& id : mentions) ids.push_back(id.str());
        entities[name] = std::move(ids);
    }
    json unresolved = json::array();
    for (const auto& r : memory.unresolved_refs) {
        unresolved.push_back({{"src", r.src.str()}, {"target_description", r.target_description}});
    }
    return json{
        {"section_stack", std::move(sections)},
        {"entities", std::move(entities)},
        {"unresolved_refs", std::move(unresolved)},
        {"themes", memory.themes},
    };
}

}  // namespace ladrag
