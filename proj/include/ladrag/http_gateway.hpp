#pragma once

#include <memory>
#include <string>

#include "ladrag/gateway.hpp"

namespace ladrag {

// OpenAI-compatible endpoints. base_url covers scheme, host, port and any
// path prefix, e.g. "http://localhost:8089/v1". The API key is read from the
// named environment variable at use time, never stored on the command line.
struct HttpGatewayConfig {
    std::string base_url;
    std::string api_key_env = "LADRAG_API_KEY";
    std::string chat_model = "gpt-4o";
    std::string embed_model = "text-embedding-3-small";
    int retries = 2;  // fixed retry count, no backoff
    int timeout_seconds = 120;
};

HttpGatewayConfig http_config_from_env();  // LADRAG_BASE_URL, LADRAG_API_KEY

class HttpChat : public ChatBackend {
public:
    explicit HttpChat(HttpGatewayConfig config);
    ChatResponse complete(const ChatRequest& request) override;
    std::string name() const override { return "http"; }

private:
    HttpGatewayConfig config_;
};

class HttpEmbedder : public Embedder {
public:
    HttpEmbedder(HttpGatewayConfig config, int dim);
    std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) override;
    int dimension() const override { return dim_; }
    std::string name() const override { return "http"; }

private:
    HttpGatewayConfig config_;
    int dim_;
};

}  // namespace ladrag
