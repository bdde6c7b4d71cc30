#include "ladrag/gateway.hpp"

#include <cctype>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "ladrag/errors.hpp"
#include "ladrag/sha256.hpp"
#include "ladrag/text.hpp"

namespace ladrag {

using nlohmann::json;

std::string to_string(Role role) {
    switch (role) {
        case Role::system: return "system";
        case Role::user: return "user";
        case Role::assistant: return "assistant";
        case Role::tool: return "tool";
    }
    return "user";
}

double EmbeddingVector::dot(const EmbeddingVector& other) const {
    double sum = 0.0;
    const std::size_t n = std::min(values.size(), other.values.size());
    for (std::size_t i = 0; i < n; ++i) sum += values[i] * other.values[i];
    return sum;
}

double EmbeddingVector::norm() const {
    double sum = 0.0;
    for (double v : values) sum += v * v;
    return std::sqrt(sum);
}

std::string request_fingerprint(const ChatRequest& request) {
    json messages = json::array();
    for (const auto& m : request.messages) {
        json digests = json::array();
        for (const auto& image : m.images) digests.push_back(sha256_hex(image));
        messages.push_back({
            {"role", to_string(m.role)},
            {"content", m.content},
            {"images", std::move(digests)},
        });
    }
    const json canonical{
        {"messages", std::move(messages)},
        {"temperature", request.temperature},
        {"max_tokens", request.max_tokens},
    };
    return sha256_hex(canonical.dump());
}

long estimate_tokens(std::string_view text) {
    return static_cast<long>((text.size() + 3) / 4);
}

HashingEmbedder::HashingEmbedder(int dim) : dim_(dim) {
    if (dim < 1) throw ConfigError("embedding dimension must be >= 1");
}

EmbeddingVector HashingEmbedder::embed_one(const std::string& text) const {
    EmbeddingVector v;
    v.dimension = dim_;
    v.values.assign(static_cast<std::size_t>(dim_), 0.0);
    for (const auto& token : tokenize(text)) {
        const std::uint64_t h = fnv1a64(token);
        const auto bucket = static_cast<std::size_t>(h % static_cast<std::uint64_t>(dim_));
        const double sign = ((h >> 32) & 1u) ? 1.0 : -1.0;
        v.values[bucket] += sign;
    }
    double norm = v.norm();
    if (norm == 0.0) {
        // No alphanumeric tokens at all; pin to a fixed unit vector.
        v.values[0] = 1.0;
        norm = 1.0;
    }
    for (double& x : v.values) x /= norm;
    return v;
}

std::vector<EmbeddingVector> HashingEmbedder::embed(const std::vector<std::string>& texts) {
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const auto& text : texts) out.push_back(embed_one(text));
    return out;
}

ScriptedChat::ScriptedChat(std::vector<std::string> responses) : responses_(std::move(responses)) {}

std::unique_ptr<ScriptedChat> ScriptedChat::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open script " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ParseError("script " + path.string() + ": " + e.what());
    }
    std::vector<std::string> responses;
    const json& items = j.is_array() ? j : j.at("responses");
    for (const auto& item : items) {
        responses.push_back(item.is_string() ? item.get<std::string>() : item.dump());
    }
    return std::make_unique<ScriptedChat>(std::move(responses));
}

ChatResponse ScriptedChat::complete(const ChatRequest& request) {
    if (next_ >= responses_.size()) {
        throw PreconditionError("scripted chat exhausted after " + std::to_string(next_) +
                                " responses");
    }
    ChatResponse resp;
    resp.content = responses_[next_++];
    long prompt = 0;
    for (const auto& m : request.messages) prompt += estimate_tokens(m.content);
    resp.prompt_tokens = prompt;
    resp.completion_tokens = estimate_tokens(resp.content);
    return resp;
}

Gateway::Gateway() : embedder_(std::make_unique<HashingEmbedder>()) {}

void Gateway::set_chat(std::unique_ptr<ChatBackend> chat) { chat_ = std::move(chat); }

void Gateway::set_embedder(std::unique_ptr<Embedder> embedder) {
    if (!embedder) throw ConfigError("embedder must not be null");
    embedder_ = std::move(embedder);
}

bool Gateway::has_chat() const {
    std::lock_guard lock(*mutex_);
    return replaying_ || chat_ != nullptr;
}

ChatResponse Gateway::complete(const ChatRequest& request) {
    if (request.messages.empty()) throw PreconditionError("chat request has no messages");
    if (request.temperature < 0) throw PreconditionError("temperature must be >= 0");
    if (request.max_tokens <= 0) throw PreconditionError("max_tokens must be > 0");

    const std::string fingerprint = request_fingerprint(request);
    ChatResponse resp = complete_inner(request, fingerprint);

    std::lock_guard lock(*mutex_);
    ++call_count_;
    prompt_tokens_ += resp.prompt_tokens;
    completion_tokens_ += resp.completion_tokens;
    if (recording_) {
        std::ofstream out(record_path_, std::ios::app);
        if (!out) throw IoError("cannot append to transcript " + record_path_.string());
        const json line{
            {"fingerprint", fingerprint},
            {"response", resp.content},
            {"tokens", {{"prompt", resp.prompt_tokens}, {"completion", resp.completion_tokens}}},
        };
        out << line.dump() << "\n";
    }
    return resp;
}

ChatResponse Gateway::complete_inner(const ChatRequest& request, const std::string& fingerprint) {
    {
        std::lock_guard lock(*mutex_);
        if (replaying_) {
            auto it = replay_map_.find(fingerprint);
            if (it == replay_map_.end()) {
                throw ReplayMissError(fingerprint,
                                      "no recorded response for fingerprint " + fingerprint);
            }
            return it->second;
        }
    }
    if (!chat_) {
        throw PreconditionError("gateway has no chat backend configured");
    }
    return chat_->complete(request);
}

std::vector<EmbeddingVector> Gateway::embed(const std::vector<std::string>& texts) {
    if (texts.empty()) throw PreconditionError("embed requires at least one text");
    auto vectors = embedder_->embed(texts);
    if (vectors.size() != texts.size()) {
        throw DimensionMismatchError("embedder returned " + std::to_string(vectors.size()) +
                                     " vectors for " + std::to_string(texts.size()) + " texts");
    }
    const int dim = embedder_->dimension();
    for (const auto& v : vectors) {
        if (v.dimension != dim || static_cast<int>(v.values.size()) != dim) {
            throw DimensionMismatchError("embedder returned inconsistent dimensions");
        }
    }
    return vectors;
}

void Gateway::record_session(const std::filesystem::path& path) {
    std::lock_guard lock(*mutex_);
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open transcript for writing: " + path.string());
    record_path_ = path;
    recording_ = true;
}

void Gateway::stop_recording() {
    std::lock_guard lock(*mutex_);
    recording_ = false;
}

void Gateway::replay_session(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open transcript " + path.string());
    std::map<std::string, ChatResponse> map;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ParseError("transcript " + path.string() + " line " + std::to_string(line_no) +
                             ": " + e.what());
        }
        ChatResponse resp;
        resp.content = j.at("response").get<std::string>();
        if (j.contains("tokens")) {
            resp.prompt_tokens = j.at("tokens").value("prompt", 0L);
            resp.completion_tokens = j.at("tokens").value("completion", 0L);
        }
        map[j.at("fingerprint").get<std::string>()] = std::move(resp);
    }
    std::lock_guard lock(*mutex_);
    replay_map_ = std::move(map);
    replaying_ = true;
    recording_ = false;
}

long Gateway::call_count() const {
    std::lock_guard lock(*mutex_);
    return call_count_;
}

long Gateway::total_prompt_tokens() const {
    std::lock_guard lock(*mutex_);
    return prompt_tokens_;
}

long Gateway::total_completion_tokens() const {
    std::lock_guard lock(*mutex_);
    return completion_tokens_;
}

}  // namespace ladrag
