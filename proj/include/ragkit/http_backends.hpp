#pragma once

#include <chrono>
#include <string>

#include "ragkit/embed.hpp"
#include "ragkit/eval.hpp"
#include "ragkit/pipeline.hpp"
#include "ragkit/rerank.hpp"

namespace ragkit {

// Connection target parsed from an http://host:port/prefix URL. Only plain
// http is supported; model backends are expected to run on localhost or a
// trusted network.
struct HttpEndpoint {
    std::string host;
    int port = 80;
    std::string path_prefix; // "" or "/prefix", joined with the route path
};

HttpEndpoint parse_endpoint(const std::string& url);

// Shared transport settings. Retries use bounded exponential backoff:
// attempt n sleeps backoff_base * 2^(n-1); at most max_attempts tries total.
// 4xx responses are not retried (the request itself is wrong).
struct HttpRetryPolicy {
    int max_attempts = 3;
    std::chrono::milliseconds backoff_base{100};
    std::chrono::milliseconds timeout{30000};
};

// POST /embed  {"texts": [...]} -> {"embeddings": [[...], ...], "dim": n}
class HttpEmbedder final : public Embedder {
public:
    HttpEmbedder(HttpEndpoint endpoint, std::size_t expected_dim,
                 HttpRetryPolicy policy = {});

    const std::string& name() const override { return name_; }
    std::size_t dim() const override { return dim_; }
    std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) const override;

private:
    HttpEndpoint endpoint_;
    std::size_t dim_;
    HttpRetryPolicy policy_;
    std::string name_;
};

// POST /score  {"query": "...", "documents": [...]} -> {"scores": [...]}
class HttpCrossEncoder final : public CrossEncoder {
public:
    explicit HttpCrossEncoder(HttpEndpoint endpoint, HttpRetryPolicy policy = {});

    const std::string& name() const override { return name_; }
    std::vector<double> score_batch(const std::string& query,
                                    std::span<const std::string> documents) const override;

private:
    HttpEndpoint endpoint_;
    HttpRetryPolicy policy_;
    std::string name_;
};

// POST /generate  {"system": "...", "prompt": "...", "max_tokens": n,
//                  "temperature": t} -> {"text": "..."}
class HttpLlm final : public LlmBackend {
public:
    explicit HttpLlm(HttpEndpoint endpoint, HttpRetryPolicy policy = {});

    const std::string& name() const override { return name_; }
    std::string generate(const std::string& system_text, const std::string& user_text,
                         const GenerationParams& params) const override;

private:
    HttpEndpoint endpoint_;
    HttpRetryPolicy policy_;
    std::string name_;
};

// LLM-backed judge speaking the same /generate protocol with fixed judging
// prompts. Intended for field runs against a live model; automated tests use
// the lexical judge.
class LlmJudge final : public Judge {
public:
    explicit LlmJudge(std::shared_ptr<const LlmBackend> llm);

    const std::string& name() const override { return name_; }
    std::vector<std::string> decompose(const std::string& answer_text) const override;
    bool is_supported(const std::string& claim, const std::string& context) const override;
    bool is_relevant(const std::string& question, const std::string& statement) const override;

private:
    bool yes_no(const std::string& prompt) const;

    std::shared_ptr<const LlmBackend> llm_;
    std::string name_;
};

} // namespace ragkit
