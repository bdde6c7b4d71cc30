#include "ladrag/http_gateway.hpp"

#include <cstdlib>

#include <httplib.h>
#include <json.hpp>

#include "ladrag/errors.hpp"
#include "ladrag/text.hpp"

namespace ladrag {

using nlohmann::json;

namespace {

struct SplitUrl {
    std::string origin;  // scheme://host[:port]
    std::string prefix;  // path prefix, possibly empty
};

SplitUrl split_base_url(const std::string& base_url) {
    auto scheme_end = base_url.find("://");
    if (scheme_end == std::string::npos) {
        throw ConfigError("base_url must include a scheme: " + base_url);
    }
    auto path_start = base_url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {base_url, ""};
    std::string prefix = base_url.substr(path_start);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    return {base_url.substr(0, path_start), prefix};
}

std::string api_key(const HttpGatewayConfig& config) {
    if (config.api_key_env.empty()) return "";
    const char* value = std::getenv(config.api_key_env.c_str());
    return value ? value : "";
}

json post_json(const HttpGatewayConfig& config, const std::string& path, const json& body) {
    const SplitUrl url = split_base_url(config.base_url);
    httplib::Client client(url.origin);
    client.set_read_timeout(config.timeout_seconds, 0);
    client.set_connection_timeout(config.timeout_seconds, 0);

    httplib::Headers headers;
    const std::string key = api_key(config);
    if (!key.empty()) headers.emplace("Authorization", "Bearer " + key);

    const std::string payload = body.dump();
    httplib::Result result;
    for (int attempt = 0; attempt <= config.retries; ++attempt) {
        result = client.Post(url.prefix + path, headers, payload, "application/json");
        if (result) break;
    }
    if (!result) {
        throw TransportError("POST " + config.base_url + path + " failed: " +
                             httplib::to_string(result.error()));
    }
    if (result->status == 401 || result->status == 403) {
        throw AuthError("authentication failed (" + std::to_string(result->status) + ") for " +
                        config.base_url + path);
    }
    if (result->status != 200) {
        throw TransportError("POST " + config.base_url + path + " returned " +
                             std::to_string(result->status) + ": " +
                             truncate_text(result->body, 300));
    }
    try {
        return json::parse(result->body);
    } catch (const json::parse_error& e) {
        throw TransportError(std::string("response is not JSON: ") + e.what());
    }
}

}  // namespace

HttpGatewayConfig http_config_from_env() {
    HttpGatewayConfig config;
    if (const char* base = std::getenv("LADRAG_BASE_URL")) config.base_url = base;
    return config;
}

HttpChat::HttpChat(HttpGatewayConfig config) : config_(std::move(config)) {
    if (config_.base_url.empty()) {
        throw ConfigError("http chat backend requires a base_url (set LADRAG_BASE_URL)");
    }
}

ChatResponse HttpChat::complete(const ChatRequest& request) {
    json messages = json::array();
    for (const auto& m : request.messages) {
        if (m.images.empty()) {
            messages.push_back({{"role", to_string(m.role)}, {"content", m.content}});
            continue;
        }
        json parts = json::array();
        parts.push_back({{"type", "text"}, {"text", m.content}});
        for (const auto& image : m.images) {
            parts.push_back({{"type", "image_url"},
                             {"image_url", {{"url", "data:image/png;base64," + base64_encode(image)}}}});
        }
        messages.push_back({{"role", to_string(m.role)}, {"content", std::move(parts)}});
    }
    const json body{
        {"model", config_.chat_model},
        {"temperature", request.temperature},
        {"max_tokens", request.max_tokens},
        {"messages", std::move(messages)},
    };
    const json reply = post_json(config_, "/chat/completions", body);

    ChatResponse resp;
    try {
        resp.content = reply.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception& e) {
        throw TransportError(std::string("unexpected chat completion shape: ") + e.what());
    }
    if (reply.contains("usage")) {
        resp.prompt_tokens = reply["usage"].value("prompt_tokens", 0L);
        resp.completion_tokens = reply["usage"].value("completion_tokens", 0L);
    } else {
        long prompt = 0;
        for (const auto& m : request.messages) prompt += estimate_tokens(m.content);
        resp.prompt_tokens = prompt;
        resp.completion_tokens = estimate_tokens(resp.content);
    }
    return resp;
}

HttpEmbedder::HttpEmbedder(HttpGatewayConfig config, int dim)
    : config_(std::move(config)), dim_(dim) {
    if (config_.base_url.empty()) {
        throw ConfigError("http embedder requires a base_url (set LADRAG_BASE_URL)");
    }
    if (dim_ < 1) throw ConfigError("embedding dimension must be >= 1");
}

std::vector<EmbeddingVector> HttpEmbedder::embed(const std::vector<std::string>& texts) {
    const json body{{"model", config_.embed_model}, {"input", texts}};
    const json reply = post_json(config_, "/embeddings", body);

    std::vector<EmbeddingVector> out;
    try {
        for (const auto& item : reply.at("data")) {
            EmbeddingVector v;
            v.values = item.at("embedding").get<std::vector<double>>();
            v.dimension = static_cast<int>(v.values.size());
            if (v.dimension != dim_) {
                throw DimensionMismatchError("provider returned dimension " +
                                             std::to_string(v.dimension) + ", expected " +
                                             std::to_string(dim_));
            }
            out.push_back(std::move(v));
        }
    } catch (const json::exception& e) {
        throw TransportError(std::string("unexpected embeddings shape: ") + e.what());
    }
    return out;
}

}  // namespace ladrag
