#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace ladrag {

inline constexpr double kDefaultTemperature = 0.0;
inline constexpr int kMaxTokensIngestion = 8192;
inline constexpr int kMaxTokensQa = 2048;

enum class Role { system, user, assistant, tool };

std::string to_string(Role role);

struct ChatMessage {
    Role role = Role::user;
    std::string content;
    std::vector<std::string> images;  // raw bytes; fingerprinted via digest
};

struct ChatRequest {
    std::vector<ChatMessage> messages;
    double temperature = kDefaultTemperature;
    int max_tokens = kMaxTokensIngestion;
};

struct ChatResponse {
    std::string content;
    long prompt_tokens = 0;
    long completion_tokens = 0;
};

struct EmbeddingVector {
    std::vector<double> values;
    int dimension = 0;

    double dot(const EmbeddingVector& other) const;
    double norm() const;
};

// Stable replay key: SHA-256 over the canonicalized request (roles, contents,
// image digests, temperature, max_tokens).
std::string request_fingerprint(const ChatRequest& request);

// Rough token estimate used for context budgeting and for backends that do
// not report usage: ceil(chars / 4).
long estimate_tokens(std::string_view text);

class ChatBackend {
public:
    virtual ~ChatBackend() = default;
    virtual ChatResponse complete(const ChatRequest& request) = 0;
    virtual std::string name() const = 0;
};

class Embedder {
public:
    virtual ~Embedder() = default;
    virtual std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) = 0;
    virtual int dimension() const = 0;
    virtual std::string name() const = 0;
};

inline constexpr int kDefaultEmbeddingDim = 64;

// Deterministic offline embedder: token counts feature-hashed (FNV-1a) into a
// fixed-dimension signed vector, L2-normalized. Same interface as a model
// embedder, so the whole pipeline runs without network access.
class HashingEmbedder : public Embedder {
public:
    explicit HashingEmbedder(int dim = kDefaultEmbeddingDim);

    std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) override;
    EmbeddingVector embed_one(const std::string& text) const;
    int dimension() const override { return dim_; }
    std::string name() const override { return "hashing"; }

private:
    int dim_;
};

// Fixed response sequence; each complete() consumes the next entry. Token
// counts are estimated so scripted runs still exercise instrumentation.
class ScriptedChat : public ChatBackend {
public:
    explicit ScriptedChat(std::vector<std::string> responses);
    static std::unique_ptr<ScriptedChat> from_file(const std::filesystem::path& path);

    ChatResponse complete(const ChatRequest& request) override;
    std::string name() const override { return "scripted"; }
    std::size_t remaining() const { return responses_.size() - next_; }

private:
    std::vector<std::string> responses_;
    std::size_t next_ = 0;
};

// Single boundary to model services: one chat backend (live, scripted, or
// replayed) plus one embedder, with record/replay of chat responses keyed by
// request fingerprint. Shareable across threads; transcript writes and token
// counters are serialized.
class Gateway {
public:
    Gateway();

    void set_chat(std::unique_ptr<ChatBackend> chat);
    void set_embedder(std::unique_ptr<Embedder> embedder);
    bool has_chat() const;
    const Embedder& embedder() const { return *embedder_; }

    ChatResponse complete(const ChatRequest& request);
    std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts);

    // Record every (fingerprint, response) pair to a JSONL transcript.
    void record_session(const std::filesystem::path& path);
    void stop_recording();

    // Serve responses from a transcript; no network calls are made in replay
    // mode, and unknown fingerprints raise ReplayMissError.
    void replay_session(const std::filesystem::path& path);

    long call_count() const;
    long total_prompt_tokens() const;
    long total_completion_tokens() const;

    Gateway(Gateway&&) = default;
    Gateway& operator=(Gateway&&) = default;

private:
    ChatResponse complete_inner(const ChatRequest& request, const std::string& fingerprint);

    std::unique_ptr<ChatBackend> chat_;
    std::unique_ptr<Embedder> embedder_;

    // Boxed so the gateway stays movable.
    mutable std::unique_ptr<std::mutex> mutex_ = std::make_unique<std::mutex>();
    bool replaying_ = false;
    std::map<std::string, ChatResponse> replay_map_;
    std::filesystem::path record_path_;
    bool recording_ = false;
    long call_count_ = 0;
    long prompt_tokens_ = 0;
    long completion_tokens_ = 0;
};

}  // namespace ladrag
