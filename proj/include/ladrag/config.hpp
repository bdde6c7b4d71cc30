#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "ladrag/agent.hpp"
#include "ladrag/gateway.hpp"

namespace ladrag {

// Runtime configuration. Secrets stay in environment variables; the config
// file only names which variable to read.
struct Config {
    // gateway
    std::string base_url;  // empty: no live backend
    std::string api_key_env = "LADRAG_API_KEY";
    std::string chat_model = "gpt-4o";
    std::string embed_model = "text-embedding-3-small";

    // index
    std::string embedder = "hashing";  // hashing | http
    int embedding_dim = kDefaultEmbeddingDim;

    // symbolic index
    double louvain_resolution = 1.0;

    AgentConfig agent;

    static Config load(const std::filesystem::path& path);  // ConfigError

    // Explicit path, else LADRAG_CONFIG, else defaults (with LADRAG_BASE_URL
    // folded in when set).
    static Config resolve(const std::optional<std::filesystem::path>& cli_path);
};

// How the chat side of the gateway is driven. At most one of script/replay.
struct GatewaySetup {
    std::optional<std::filesystem::path> replay_transcript;
    std::optional<std::filesystem::path> script;
    std::optional<std::filesystem::path> record_transcript;
};

std::unique_ptr<Gateway> build_gateway(const Config& config, const GatewaySetup& setup = {});

}  // namespace ladrag
