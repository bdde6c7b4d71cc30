// Python bindings for the ladrag core: graph model, indices, query engine,
// community detection, retrieval agent, and evaluation metrics.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <json.hpp>

#include "ladrag/agent.hpp"
#include "ladrag/bm25.hpp"
#include "ladrag/errors.hpp"
#include "ladrag/eval.hpp"
#include "ladrag/graph_io.hpp"
#include "ladrag/graph_query.hpp"
#include "ladrag/ingestion.hpp"
#include "ladrag/louvain.hpp"

namespace py = pybind11;
using nlohmann::json;
using namespace ladrag;

namespace {

json from_py(const py::object& obj) {
    return json::parse(py::str(py::module_::import("json").attr("dumps")(obj)).cast<std::string>());
}

py::object to_py(const json& j) {
    return py::module_::import("json").attr("loads")(j.dump());
}

std::map<std::string, int> partition_dict(const CommunityPartition& partition) {
    std::map<std::string, int> out;
    for (const auto& [id, c] : partition.assignment) out[id.str()] = c;
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Layout-aware dynamic retrieval: C++ core bindings";

    py::register_exception<Error>(m, "LadragError");

    // ── DocumentGraph ──
    py::class_<DocumentGraph>(m, "DocumentGraph")
        .def_readonly("doc_id", &DocumentGraph::doc_id)
        .def_readonly("page_count", &DocumentGraph::page_count)
        .def("node_count", [](const DocumentGraph& g) { return g.nodes.size(); })
        .def("edge_count", [](const DocumentGraph& g) { return g.edges.size(); })
        .def("node_ids",
             [](const DocumentGraph& g) {
                 std::vector<std::string> ids;
                 for (const auto& [id, node] : g.nodes) ids.push_back(id.str());
                 return ids;
             })
        .def("node",
             [](const DocumentGraph& g, const std::string& id) {
                 const GraphNode* node = g.find(NodeId::parse(id));
                 if (!node) throw UnknownNodeError("unknown node " + id);
                 return to_py(node_to_json(*node));
             })
        .def("communities",
             [](const DocumentGraph& g) -> py::object {
                 if (!g.communities) return py::none();
                 return py::cast(partition_dict(*g.communities));
             })
        .def("modularity",
             [](const DocumentGraph& g) -> py::object {
                 if (!g.communities) return py::none();
                 return py::cast(g.communities->modularity);
             })
        .def("to_json", [](const DocumentGraph& g) { return serialize_graph(g); })
        .def("__repr__", [](const DocumentGraph& g) {
            return "<DocumentGraph doc_id='" + g.doc_id + "' nodes=" +
                   std::to_string(g.nodes.size()) + " edges=" + std::to_string(g.edges.size()) +
                   ">";
        });

    m.def("load_graph", [](const std::filesystem::path& p) { return load_graph(p); },
          py::arg("path"));
    m.def("save_graph", &save_graph, py::arg("graph"), py::arg("path"));
    m.def("graph_from_json",
          [](const std::string& bytes) { return deserialize_graph(bytes); }, py::arg("data"),
          "Parse and validate a canonical graph JSON string");

    m.def("validate_graph", [](const DocumentGraph& g) {
        std::vector<std::map<std::string, std::string>> out;
        for (const auto& v : validate_graph(g)) {
            out.push_back({{"kind", to_string(v.kind)}, {"subject", v.subject}, {"detail", v.detail}});
        }
        return out;
    });

    // ── Symbolic index ──
    m.def(
        "execute_query",
        [](const DocumentGraph& g, const py::object& query) {
            const GraphQuery parsed = GraphQuery::from_json(from_py(query));
            std::vector<std::string> out;
            for (const auto& id : execute_query(g, parsed)) out.push_back(id.str());
            return out;
        },
        py::arg("graph"), py::arg("query"), "Run a declarative query (dict, see docs/query_dsl.md)");

    m.def(
        "neighbors",
        [](const DocumentGraph& g, const std::string& node, const py::object& edge_type,
           const std::string& direction) {
            std::optional<EdgeType> type;
            if (!edge_type.is_none()) {
                type = edge_type_from_label(edge_type.cast<std::string>());
                if (!type) throw QueryError("unknown edge type");
            }
            std::vector<std::string> out;
            for (const auto& id :
                 neighbors(g, NodeId::parse(node), type, direction_from_label(direction))) {
                out.push_back(id.str());
            }
            return out;
        },
        py::arg("graph"), py::arg("node"), py::arg("edge_type") = py::none(),
        py::arg("direction") = "both");

    m.def(
        "contextualize",
        [](const DocumentGraph& g, const std::string& node) {
            std::vector<std::string> out;
            for (const auto& id : contextualize(g, NodeId::parse(node))) out.push_back(id.str());
            return out;
        },
        py::arg("graph"), py::arg("node"));

    m.def(
        "louvain_partition",
        [](const DocumentGraph& g, double resolution) {
            LouvainOptions options;
            options.resolution = resolution;
            const CommunityPartition partition = louvain_partition(g, options);
            return py::make_tuple(partition_dict(partition), partition.modularity);
        },
        py::arg("graph"), py::arg("resolution") = 1.0,
        "Returns (assignment dict, modularity)");

    // ── Neural + lexical indices ──
    py::class_<NeuralIndex>(m, "NeuralIndex")
        .def_readonly("doc_id", &NeuralIndex::doc_id)
        .def_readonly("dimension", &NeuralIndex::dimension)
        .def("__len__", [](const NeuralIndex& idx) { return idx.size(); });

    py::class_<Bm25Index>(m, "Bm25Index")
        .def_readonly("doc_id", &Bm25Index::doc_id)
        .def_readonly("avgdl", &Bm25Index::avgdl)
        .def("__len__", [](const Bm25Index& idx) { return idx.size(); });

    py::class_<Gateway>(m, "Gateway")
        .def(py::init([](int embedding_dim) {
                 auto gateway = std::make_unique<Gateway>();
                 gateway->set_embedder(std::make_unique<HashingEmbedder>(embedding_dim));
                 return gateway;
             }),
             py::arg("embedding_dim") = kDefaultEmbeddingDim)
        .def("set_script",
             [](Gateway& gateway, const std::vector<std::string>& responses) {
                 gateway.set_chat(std::make_unique<ScriptedChat>(responses));
             })
        .def("call_count", &Gateway::call_count);

    m.def("build_neural_index", &build_neural_index, py::arg("graph"), py::arg("gateway"));
    m.def("load_neural_index", &load_neural_index, py::arg("path"));
    m.def("save_neural_index", &save_neural_index, py::arg("index"), py::arg("path"));

    m.def(
        "semantic_search",
        [](const NeuralIndex& index, const std::string& query, int k, Gateway& gateway) {
            std::vector<std::pair<std::string, double>> out;
            for (const auto& hit : semantic_search(index, query, k, gateway)) {
                out.emplace_back(hit.node.str(), hit.score);
            }
            return out;
        },
        py::arg("index"), py::arg("query"), py::arg("k"), py::arg("gateway"));

    m.def("build_bm25_index", &build_bm25_index, py::arg("graph"), py::arg("k1") = kBm25K1,
          py::arg("b") = kBm25B);
    m.def(
        "bm25_search",
        [](const Bm25Index& index, const std::string& query, int k) {
            std::vector<std::pair<std::string, double>> out;
            for (const auto& hit : bm25_search(index, query, k)) {
                out.emplace_back(hit.node.str(), hit.score);
            }
            return out;
        },
        py::arg("index"), py::arg("query"), py::arg("k"));

    m.def(
        "page_topk",
        [](const std::vector<std::pair<std::string, double>>& hits, const DocumentGraph& graph,
           int k_pages) {
            std::vector<ScoredHit> scored;
            for (const auto& [id, score] : hits) scored.push_back({NodeId::parse(id), score});
            return page_topk(scored, graph, k_pages);
        },
        py::arg("hits"), py::arg("graph"), py::arg("k_pages"));

    // ── Ingestion ──
    m.def(
        "ingest_pre_extracted",
        [](const std::string& doc_id, const std::filesystem::path& elements_path, Gateway& gateway,
           bool build_index) {
            IngestionOptions options;
            options.build_index = build_index;
            const auto pages = load_pre_extracted(elements_path);
            IngestionResult result = ingest_document(doc_id, pages, gateway, options);
            py::dict report;
            report["pages_processed"] = result.report.pages_processed;
            report["nodes_created"] = result.report.nodes_created;
            report["llm_calls"] = result.report.llm_calls;
            report["warnings"] = result.report.warnings;
            if (build_index) {
                return py::make_tuple(result.graph, std::move(*result.index), report);
            }
            return py::make_tuple(result.graph, py::none(), report);
        },
        py::arg("doc_id"), py::arg("elements_path"), py::arg("gateway"),
        py::arg("build_index") = true);

    // ── Agent ──
    m.def(
        "retrieve",
        [](const std::string& question, const DocumentGraph& graph, const NeuralIndex& index,
           Gateway& gateway, int max_rounds, bool enable_contextualize, bool enable_graph_query) {
            AgentConfig config;
            config.max_rounds = max_rounds;
            config.enable_contextualize = enable_contextualize;
            config.enable_graph_query = enable_graph_query;
            const RetrievalResult result = retrieve(question, graph, index, gateway, config);
            return to_py(result.to_json());
        },
        py::arg("question"), py::arg("graph"), py::arg("index"), py::arg("gateway"),
        py::arg("max_rounds") = 20, py::arg("enable_contextualize") = true,
        py::arg("enable_graph_query") = true);

    // ── Metrics ──
    m.def(
        "perfect_recall",
        [](const std::set<int>& gold, const std::set<int>& retrieved) {
            return perfect_recall(gold, retrieved);
        },
        py::arg("gold"), py::arg("retrieved"));
    m.def(
        "irrelevant_pages_ratio",
        [](const std::set<int>& gold, const std::set<int>& retrieved) {
            return irrelevant_pages_ratio(gold, retrieved);
        },
        py::arg("gold"), py::arg("retrieved"));

    m.attr("__version__") = "0.1.0";
}
