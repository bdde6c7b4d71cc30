#include "ladrag/ingestion.hpp"

#include <algorithm>
#include <charconv>

#include <json.hpp>

#include "ladrag/errors.hpp"
#include "ladrag/graph_io.hpp"
#include "ladrag/prompts.hpp"

namespace ladrag {

using nlohmann::json;

namespace {

// Strips markdown fences some models wrap around JSON.
std::string strip_fences(const std::string& text) {
    std::string s = text;
    auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return s;
    auto last = s.find_last_not_of(" \t\r\n");
    s = s.substr(first, last - first + 1);
    if (s.rfind("```", 0) == 0) {
        auto newline = s.find('\n');
        auto closing = s.rfind("```");
        if (newline != std::string::npos && closing != std::string::npos && closing > newline) {
            s = s.substr(newline + 1, closing - newline - 1);
        }
    }
    return s;
}

// Sends the prompt, parses the reply as JSON; one repair retry, then
// PageParseError carrying the raw output.
json complete_json(Gateway& gateway, std::vector<ChatMessage> messages, int max_tokens) {
    ChatRequest request{messages, kDefaultTemperature, max_tokens};
    ChatResponse response = gateway.complete(request);
    try {
        return json::parse(strip_fences(response.content));
    } catch (const json::parse_error&) {
    }

    messages.push_back({Role::assistant, response.content, {}});
    messages.push_back({Role::user, prompts::repair_notice("it was not valid JSON"), {}});
    ChatResponse retry = gateway.complete({messages, kDefaultTemperature, max_tokens});
    try {
        return json::parse(strip_fences(retry.content));
    } catch (const json::parse_error& e) {
        throw PageParseError(std::string("model output is not valid JSON after repair: ") + e.what(),
                             retry.content);
    }
}

GraphNode element_from_json(const json& je, int page, int index) {
    GraphNode node;
    node.page = page;
    node.id = NodeId{page, index};
    node.element_type = element_type_from_label(je.value("element_type", "other"));
    if (je.contains("bbox") && je.at("bbox").is_array() && je.at("bbox").size() == 4) {
        node.bbox.x0 = je.at("bbox")[0].get<double>();
        node.bbox.y0 = je.at("bbox")[1].get<double>();
        node.bbox.x1 = je.at("bbox")[2].get<double>();
        node.bbox.y1 = je.at("bbox")[3].get<double>();
    }
    node.content = je.value("content", std::string{});
    node.summary = je.value("summary", std::string{});
    if (node.summary.empty()) node.summary = node.content;
    if (je.contains("visual_attributes") && je.at("visual_attributes").is_object()) {
        for (const auto& [key, value] : je.at("visual_attributes").items()) {
            node.visual_attributes[key] =
                value.is_string() ? value.get<std::string>() : value.dump();
        }
    }
    return node;
}

// Walks a page's nodes in reading order, keeping the section stack current,
// and hands every non-header node its governing header (null when none).
template <typename Fn>
void walk_sections(RunningMemory& memory, const std::vector<GraphNode>& nodes, Fn&& on_node) {
    for (const auto& node : nodes) {
        if (node.element_type == ElementType::section_header) {
            memory.push_section(node.content, infer_section_depth(node), node.id);
        } else {
            const SectionEntry* top =
                memory.section_stack.empty() ? nullptr : &memory.section_stack.back();
            on_node(node, top);
        }
    }
}

}  // namespace

int infer_section_depth(const GraphNode& node) {
    auto level = node.visual_attributes.find("header_level");
    if (level != node.visual_attributes.end()) {
        int depth = 0;
        const auto& s = level->second;
        auto result = std::from_chars(s.data(), s.data() + s.size(), depth);
        if (result.ec == std::errc() && depth >= 1) return depth;
    }
    auto font = node.visual_attributes.find("font_size");
    if (font != node.visual_attributes.end()) {
        double size = 0.0;
        try {
            size = std::stod(font->second);
        } catch (const std::exception&) {
            return 1;
        }
        if (size >= 20.0) return 1;
        if (size >= 14.0) return 2;
        return 3;
    }
    return 1;
}

std::vector<GraphNode> parse_page(const PageInput& page, Gateway& gateway) {
    if (!page.valid()) {
        throw PreconditionError("page " + std::to_string(page.page_number) +
                                " must carry exactly one of image / pre_extracted");
    }
    if (page.page_number < 1) throw PreconditionError("page numbers start at 1");

    std::vector<GraphNode> nodes;
    if (page.pre_extracted) {
        int index = 0;
        for (GraphNode node : *page.pre_extracted) {
            node.page = page.page_number;
            node.id = NodeId{page.page_number, index++};
            if (node.summary.empty()) node.summary = node.content;
            nodes.push_back(std::move(node));
        }
        return nodes;
    }

    if (!gateway.has_chat()) {
        throw PreconditionError("image pages require a chat backend (or use --pre-extracted)");
    }
    std::vector<ChatMessage> messages{
        {Role::system, prompts::page_extraction_system(), {}},
        {Role::user, prompts::page_extraction_user(page.page_number), {*page.image}},
    };
    const json parsed = complete_json(gateway, std::move(messages), kMaxTokensIngestion);
    if (!parsed.is_array()) {
        throw PageParseError("page extraction must return a JSON array", parsed.dump());
    }
    int index = 0;
    for (const auto& je : parsed) {
        nodes.push_back(element_from_json(je, page.page_number, index++));
    }
    return nodes;
}

RunningMemory update_memory(const RunningMemory& memory, const std::vector<GraphNode>& new_nodes,
                            Gateway& gateway) {
    if (new_nodes.empty()) return memory;
    const int page = new_nodes.front().page;
    if (memory.max_referenced_page() >= page) {
        throw PreconditionError("memory already covers page " +
                                std::to_string(memory.max_referenced_page()) +
                                "; new nodes must come from the following page");
    }
    for (const auto& node : new_nodes) {
        if (node.page != page) {
            throw PreconditionError("update_memory expects nodes from a single page");
        }
    }

    RunningMemory updated = memory;
    walk_sections(updated, new_nodes, [](const GraphNode&, const SectionEntry*) {});

    if (!gateway.has_chat()) return updated;

    std::vector<ChatMessage> messages{
        {Role::system, prompts::memory_update_system(), {}},
        {Role::user, prompts::memory_update_user(memory, new_nodes), {}},
    };
    const json delta = complete_json(gateway, std::move(messages), kMaxTokensIngestion);
    if (!delta.is_object()) {
        throw PageParseError("memory update must return a JSON object", delta.dump());
    }

    auto known_id = [page](const NodeId& id) { return id.page <= page; };

    if (delta.contains("entities")) {
        for (const auto& [name, mentions] : delta.at("entities").items()) {
            for (const auto& jm : mentions) {
                auto id = NodeId::try_parse(jm.get<std::string>());
                if (!id || !known_id(*id)) continue;  // forward or invented ids never enter memory
                auto& list = updated.entities[name];
                if (std::find(list.begin(), list.end(), *id) == list.end()) list.push_back(*id);
            }
        }
    }
    if (delta.contains("unresolved_refs_added")) {
        for (const auto& jr : delta.at("unresolved_refs_added")) {
            auto id = NodeId::try_parse(jr.value("src", ""));
            if (!id || !known_id(*id)) continue;
            updated.unresolved_refs.push_back({*id, jr.value("target_description", "")});
        }
    }
    if (delta.contains("unresolved_refs_resolved")) {
        for (const auto& jr : delta.at("unresolved_refs_resolved")) {
            auto id = NodeId::try_parse(jr.value("src", ""));
            if (!id) continue;
            const std::string description = jr.value("target_description", "");
            std::erase_if(updated.unresolved_refs, [&](const UnresolvedRef& ref) {
                return ref.src == *id && ref.target_description == description;
            });
        }
    }
    if (delta.contains("themes_added")) {
        for (const auto& jt : delta.at("themes_added")) {
            const std::string theme = jt.get<std::string>();
            if (std::find(updated.themes.begin(), updated.themes.end(), theme) ==
                updated.themes.end()) {
                updated.themes.push_back(theme);
            }
        }
    }
    return updated;
}

EdgeExtraction extract_edges(const RunningMemory& memory, const std::vector<GraphNode>& new_nodes,
                             const DocumentGraph& graph_so_far, Gateway& gateway) {
    EdgeExtraction out;
    if (new_nodes.empty()) return out;

    for (const auto& node : new_nodes) {
        if (!graph_so_far.has_node(node.id)) {
            throw PreconditionError("extract_edges expects new node " + node.id.str() +
                                    " to already be in the graph");
        }
    }

    auto add_edge = [&](NodeId src, NodeId dst, EdgeType type, std::string note = "") {
        if (src == dst) return;
        GraphEdge edge;
        edge.src = src;
        edge.dst = dst;
        edge.edge_type = type;
        edge.provenance = src.page == dst.page ? Provenance::intra_page : Provenance::inter_page;
        edge.note = std::move(note);
        out.edges.push_back(std::move(edge));
    };

    // Reading order: chain consecutive nodes on the page.
    for (std::size_t i = 0; i + 1 < new_nodes.size(); ++i) {
        add_edge(new_nodes[i].id, new_nodes[i + 1].id, EdgeType::reading_order_next);
    }

    // Captions: nearest figure/table/chart above the caption on the same page.
    for (const auto& node : new_nodes) {
        if (node.element_type != ElementType::caption) continue;
        const GraphNode* best = nullptr;
        double best_gap = 0.0;
        for (const auto& candidate : new_nodes) {
            if (candidate.element_type != ElementType::figure &&
                candidate.element_type != ElementType::table &&
                candidate.element_type != ElementType::chart) {
                continue;
            }
            const double gap = node.bbox.y0 - candidate.bbox.y1;
            if (gap < -0.05) continue;  // candidate is not above the caption
            if (!best || gap < best_gap) {
                best = &candidate;
                best_gap = gap;
            }
        }
        if (best) add_edge(node.id, best->id, EdgeType::caption_of);
    }

    // Section membership: page headers as they appear, else the stack from
    // earlier pages (which makes the edge inter-page).
    RunningMemory scratch = memory;
    walk_sections(scratch, new_nodes, [&](const GraphNode& node, const SectionEntry* top) {
        if (top) add_edge(node.id, top->start_node, EdgeType::same_section);
    });

    if (!gateway.has_chat()) return out;

    std::vector<ChatMessage> messages{
        {Role::system, prompts::edge_extraction_system(), {}},
        {Role::user, prompts::edge_extraction_user(memory, new_nodes, graph_so_far), {}},
    };
    const json relations = complete_json(gateway, std::move(messages), kMaxTokensIngestion);
    if (!relations.is_array()) {
        throw PageParseError("edge extraction must return a JSON array", relations.dump());
    }
    for (const auto& jr : relations) {
        const std::string label = jr.value("relation", "");
        auto edge_type = edge_type_from_label(label);
        if (!edge_type) {
            out.warnings.push_back("dropped relation with unmapped label \"" + label + "\"");
            continue;
        }
        if (*edge_type != EdgeType::refers_to && *edge_type != EdgeType::continues_on) {
            out.warnings.push_back("dropped model-reported " + to_string(*edge_type) +
                                   " edge (rule-derived type)");
            continue;
        }
        auto src = NodeId::try_parse(jr.value("src", ""));
        auto dst = NodeId::try_parse(jr.value("dst", ""));
        if (!src || !dst || !graph_so_far.has_node(*src) || !graph_so_far.has_node(*dst)) {
            out.warnings.push_back("dropped relation with unknown endpoint: " + jr.dump());
            continue;
        }
        if (*src == *dst) {
            out.warnings.push_back("dropped self-loop relation on " + src->str());
            continue;
        }
        add_edge(*src, *dst, *edge_type, jr.value("note", ""));
    }
    return out;
}

IngestionResult ingest_document(const std::string& doc_id, const std::vector<PageInput>& pages,
                                Gateway& gateway, const IngestionOptions& options) {
    if (pages.empty()) throw PreconditionError("ingest_document requires at least one page");
    if (pages.front().page_number != 1) {
        throw PreconditionError("pages must start at page 1");
    }
    for (std::size_t i = 0; i + 1 < pages.size(); ++i) {
        if (pages[i + 1].page_number <= pages[i].page_number) {
            throw PreconditionError("pages must be strictly ascending by page_number");
        }
    }

    const long calls_before = gateway.call_count();

    IngestionResult result;
    result.graph.doc_id = doc_id;
    result.graph.page_count = pages.back().page_number;
    result.report.doc_id = doc_id;

    RunningMemory memory;
    for (const auto& page : pages) {
        std::vector<GraphNode> nodes;
        try {
            nodes = parse_page(page, gateway);
        } catch (const PageParseError& e) {
            if (options.fail_fast) throw;
            result.report.warnings.push_back("page " + std::to_string(page.page_number) +
                                             " skipped: " + e.what());
            continue;
        }
        for (const auto& node : nodes) {
            result.graph.nodes.emplace(node.id, node);
        }
        result.report.nodes_created += static_cast<int>(nodes.size());

        try {
            EdgeExtraction extraction = extract_edges(memory, nodes, result.graph, gateway);
            for (auto& edge : extraction.edges) {
                ++result.report.edges_created[edge.edge_type];
                result.graph.edges.push_back(std::move(edge));
            }
            for (auto& warning : extraction.warnings) {
                result.report.warnings.push_back(std::move(warning));
            }
            memory = update_memory(memory, nodes, gateway);
        } catch (const PageParseError& e) {
            if (options.fail_fast) throw;
            result.report.warnings.push_back("page " + std::to_string(page.page_number) +
                                             " linking degraded: " + e.what());
        }
        ++result.report.pages_processed;
    }

    if (!result.graph.nodes.empty()) {
        result.graph.communities = louvain_partition(result.graph, options.louvain);
    }

    auto violations = validate_graph(result.graph);
    if (!violations.empty()) {
        throw ValidationError("ingestion produced an invalid graph: " +
                              to_string(violations.front().kind) + " " +
                              violations.front().subject);
    }

    if (options.build_index && !result.graph.nodes.empty()) {
        result.index = build_neural_index(result.graph, gateway);
    }

    result.report.llm_calls = gateway.call_count() - calls_before;
    return result;
}

std::vector<PageInput> load_pre_extracted(const std::filesystem::path& path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw ParseError("pre-extracted input " + path.string() + ": " + e.what());
    }
    if (!j.is_array()) {
        throw ParseError("pre-extracted input must be a JSON array of pages");
    }
    std::vector<PageInput> pages;
    int page_number = 1;
    for (const auto& jp : j) {
        if (!jp.is_array()) {
            throw ParseError("each page in pre-extracted input must be an array of elements");
        }
        PageInput page;
        page.page_number = page_number++;
        std::vector<GraphNode> elements;
        int index = 0;
        for (const auto& je : jp) {
            GraphNode node = element_from_json(je, page.page_number, index++);
            if (je.contains("page") && je.at("page").get<int>() != page.page_number) {
                throw ParseError("element on page " + std::to_string(page.page_number) +
                                 " claims page " + std::to_string(je.at("page").get<int>()));
            }
            elements.push_back(std::move(node));
        }
        page.pre_extracted = std::move(elements);
        pages.push_back(std::move(page));
    }
    return pages;
}

}  // namespace ladrag
