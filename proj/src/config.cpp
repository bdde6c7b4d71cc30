#include "ladrag/config.hpp"

#include <cstdlib>

#include <json.hpp>

#include "ladrag/errors.hpp"
#include "ladrag/graph_io.hpp"
#include "ladrag/http_gateway.hpp"

namespace ladrag {

using nlohmann::json;

Config Config::load(const std::filesystem::path& path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const IoError& e) {
        throw ConfigError(e.what());
    } catch (const json::parse_error& e) {
        throw ConfigError("config " + path.string() + ": " + e.what());
    }

    Config c;
    try {
        c.base_url = j.value("base_url", c.base_url);
        c.api_key_env = j.value("api_key_env", c.api_key_env);
        c.chat_model = j.value("chat_model", c.chat_model);
        c.embed_model = j.value("embed_model", c.embed_model);
        c.embedder = j.value("embedder", c.embedder);
        c.embedding_dim = j.value("embedding_dim", c.embedding_dim);
        c.louvain_resolution = j.value("louvain_resolution", c.louvain_resolution);
        if (j.contains("agent")) {
            const auto& ja = j.at("agent");
            c.agent.max_rounds = ja.value("max_rounds", c.agent.max_rounds);
            c.agent.context_window_tokens =
                ja.value("context_window_tokens", c.agent.context_window_tokens);
            c.agent.context_fill_ratio = ja.value("context_fill_ratio", c.agent.context_fill_ratio);
            c.agent.max_traverse_depth = ja.value("max_traverse_depth", c.agent.max_traverse_depth);
            c.agent.summary_truncate_chars =
                ja.value("summary_truncate_chars", c.agent.summary_truncate_chars);
        }
    } catch (const json::exception& e) {
        throw ConfigError("config " + path.string() + " shape: " + e.what());
    }

    if (c.embedder != "hashing" && c.embedder != "http") {
        throw ConfigError("embedder must be \"hashing\" or \"http\", got \"" + c.embedder + "\"");
    }
    if (c.embedding_dim < 1) throw ConfigError("embedding_dim must be >= 1");
    if (!c.agent.valid()) throw ConfigError("agent settings out of range");
    return c;
}

Config Config::resolve(const std::optional<std::filesystem::path>& cli_path) {
    if (cli_path) return load(*cli_path);
    if (const char* env_path = std::getenv("LADRAG_CONFIG")) return load(env_path);
    Config c;
    if (const char* base = std::getenv("LADRAG_BASE_URL")) c.base_url = base;
    return c;
}

std::unique_ptr<Gateway> build_gateway(const Config& config, const GatewaySetup& setup) {
    if (setup.replay_transcript && setup.script) {
        throw ConfigError("choose either a replay transcript or a script, not both");
    }

    auto gateway = std::make_unique<Gateway>();

    if (config.embedder == "hashing") {
        gateway->set_embedder(std::make_unique<HashingEmbedder>(config.embedding_dim));
    } else {
        HttpGatewayConfig http;
        http.base_url = config.base_url;
        http.api_key_env = config.api_key_env;
        http.embed_model = config.embed_model;
        gateway->set_embedder(std::make_unique<HttpEmbedder>(http, config.embedding_dim));
    }

    if (setup.script) {
        gateway->set_chat(ScriptedChat::from_file(*setup.script));
    } else if (!setup.replay_transcript && !config.base_url.empty()) {
        HttpGatewayConfig http;
        http.base_url = config.base_url;
        http.api_key_env = config.api_key_env;
        http.chat_model = config.chat_model;
        gateway->set_chat(std::make_unique<HttpChat>(http));
    }

    if (setup.record_transcript) gateway->record_session(*setup.record_transcript);
    if (setup.replay_transcript) gateway->replay_session(*setup.replay_transcript);
    return gateway;
}

}  // namespace ladrag
