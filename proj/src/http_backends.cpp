#include "ragkit/http_backends.hpp"

#include <cmath>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "ragkit/errors.hpp"

using json = nlohmann::json;

namespace ragkit {

HttpEndpoint parse_endpoint(const std::string& url) {
    const std::string scheme = "http://";
    if (url.rfind(scheme, 0) != 0) {
        throw ConfigError("backend URL must start with http:// : " + url);
    }
    std::string rest = url.substr(scheme.size());
    HttpEndpoint ep;
    const std::size_t slash = rest.find('/');
    std::string hostport = rest.substr(0, slash);
    if (slash != std::string::npos) {
        ep.path_prefix = rest.substr(slash);
        if (ep.path_prefix == "/") ep.path_prefix.clear();
    }
    const std::size_t colon = hostport.rfind(':');
    if (colon == std::string::npos) {
        ep.host = hostport;
    } else {
        ep.host = hostport.substr(0, colon);
        try {
            ep.port = std::stoi(hostport.substr(colon + 1));
        } catch (const std::exception&) {
            throw ConfigError("invalid port in backend URL: " + url);
        }
    }
    if (ep.host.empty()) throw ConfigError("missing host in backend URL: " + url);
    return ep;
}

namespace {

// Posts JSON with retries and returns the parsed response body. Transport
// failures carry the stage name so pipeline errors identify where they
// happened.
json post_json(const HttpEndpoint& ep, const HttpRetryPolicy& policy, const std::string& stage,
               const std::string& route, const json& body) {
    const std::string path = ep.path_prefix + route;
    const std::string payload = body.dump();

    auto failure = [&](TransportError::Kind kind, const std::string& detail, bool retryable) {
        return TransportError(kind, stage,
                              stage + " backend " + ep.host + ":" + std::to_string(ep.port) +
                                  path + ": " + detail,
                              retryable);
    };

    for (int attempt = 1; attempt <= policy.max_attempts; ++attempt) {
        httplib::Client client(ep.host, ep.port);
        client.set_connection_timeout(policy.timeout);
        client.set_read_timeout(policy.timeout);
        client.set_write_timeout(policy.timeout);

        TransportError error = failure(TransportError::Kind::connect_failed, "no attempt", true);
        bool failed = false;

        auto result = client.Post(path, payload, "application/json");
        if (!result) {
            const bool timed_out = result.error() == httplib::Error::ConnectionTimeout ||
                                   result.error() == httplib::Error::Read ||
                                   result.error() == httplib::Error::Write;
            error = failure(timed_out ? TransportError::Kind::timeout
                                      : TransportError::Kind::connect_failed,
                            httplib::to_string(result.error()), true);
            failed = true;
        } else if (result->status < 200 || result->status >= 300) {
            std::string detail = "HTTP " + std::to_string(result->status);
            try {
                const json err = json::parse(result->body);
                if (err.contains("error")) detail += ": " + err["error"].get<std::string>();
            } catch (const json::parse_error&) {
            }
            const bool retryable = result->status >= 500;
            error = failure(TransportError::Kind::http_status, detail, retryable);
            failed = true;
        } else {
            try {
                return json::parse(result->body);
            } catch (const json::parse_error& e) {
                error = failure(TransportError::Kind::malformed_response, e.what(), true);
                failed = true;
            }
        }

        if (failed) {
            if (!error.retryable() || attempt == policy.max_attempts) throw error;
            std::this_thread::sleep_for(policy.backoff_base * (1 << (attempt - 1)));
        }
    }
    throw failure(TransportError::Kind::connect_failed, "retries exhausted", false);
}

} // namespace

// ---------------------------------------------------------------------------
// Embedder
// ---------------------------------------------------------------------------

HttpEmbedder::HttpEmbedder(HttpEndpoint endpoint, std::size_t expected_dim, HttpRetryPolicy policy)
    : endpoint_(std::move(endpoint)), dim_(expected_dim), policy_(policy),
      name_("http-embed(" + endpoint_.host + ":" + std::to_string(endpoint_.port) + ")") {
    if (dim_ < 1) throw ConfigError("HttpEmbedder: expected_dim must be >= 1");
}

std::vector<EmbeddingVector> HttpEmbedder::embed_batch(std::span<const std::string> texts) const {
    if (texts.empty()) return {};
    json body;
    body["texts"] = std::vector<std::string>(texts.begin(), texts.end());
    json response;
    try {
        response = post_json(endpoint_, policy_, "embed", "/embed", body);
    } catch (const TransportError& e) {
        // Identify the affected inputs: the batch protocol fails as a whole.
        throw TransportError(e.kind(), e.stage(),
                             std::string(e.what()) + " (texts 0.." +
                                 std::to_string(texts.size() - 1) + " of the batch)",
                             e.retryable());
    }

    if (!response.contains("embeddings") || !response["embeddings"].is_array()) {
        throw TransportError(TransportError::Kind::malformed_response, "embed",
                             "embed response lacks embeddings array", false);
    }
    if (response.contains("dim") && response["dim"].get<std::size_t>() != dim_) {
        throw ContractError("embed backend reports dim " +
                            std::to_string(response["dim"].get<std::size_t>()) + ", expected " +
                            std::to_string(dim_));
    }
    const auto& rows = response["embeddings"];
    if (rows.size() != texts.size()) {
        throw ContractError("embed backend returned " + std::to_string(rows.size()) +
                            " vectors for " + std::to_string(texts.size()) + " texts");
    }

    std::vector<EmbeddingVector> out;
    out.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        EmbeddingVector v;
        v.values.reserve(rows[i].size());
        for (const auto& x : rows[i]) v.values.push_back(x.get<double>());
        if (v.dim() != dim_) {
            throw ContractError("embed backend vector " + std::to_string(i) + " has dim " +
                                std::to_string(v.dim()) + ", expected " + std::to_string(dim_));
        }
        for (const double x : v.values) {
            if (!std::isfinite(x)) {
                throw ContractError("embed backend vector " + std::to_string(i) +
                                    " has a non-finite component");
            }
        }
        out.push_back(std::move(v));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Cross-encoder
// ---------------------------------------------------------------------------

HttpCrossEncoder::HttpCrossEncoder(HttpEndpoint endpoint, HttpRetryPolicy policy)
    : endpoint_(std::move(endpoint)), policy_(policy),
      name_("http-score(" + endpoint_.host + ":" + std::to_string(endpoint_.port) + ")") {}

std::vector<double> HttpCrossEncoder::score_batch(const std::string& query,
                                                  std::span<const std::string> documents) const {
    json body;
    body["query"] = query;
    body["documents"] = std::vector<std::string>(documents.begin(), documents.end());
    const json response = post_json(endpoint_, policy_, "score", "/score", body);

    if (!response.contains("scores") || !response["scores"].is_array()) {
        throw TransportError(TransportError::Kind::malformed_response, "score",
                             "score response lacks scores array", false);
    }
    std::vector<double> scores;
    scores.reserve(response["scores"].size());
    for (const auto& s : response["scores"]) scores.push_back(s.get<double>());
    return scores;
}

// ---------------------------------------------------------------------------
// LLM
// ---------------------------------------------------------------------------

HttpLlm::HttpLlm(HttpEndpoint endpoint, HttpRetryPolicy policy)
    : endpoint_(std::move(endpoint)), policy_(policy),
      name_("http-llm(" + endpoint_.host + ":" + std::to_string(endpoint_.port) + ")") {}

std::string HttpLlm::generate(const std::string& system_text, const std::string& user_text,
                              const GenerationParams& params) const {
    json body;
    body["system"] = system_text;
    body["prompt"] = user_text;
    body["max_tokens"] = params.max_tokens;
    body["temperature"] = params.temperature;
    const json response = post_json(endpoint_, policy_, "generate", "/generate", body);
    if (!response.contains("text") || !response["text"].is_string()) {
        throw TransportError(TransportError::Kind::malformed_response, "generate",
                             "generate response lacks text field", false);
    }
    return response["text"].get<std::string>();
}

// ---------------------------------------------------------------------------
// LLM judge
// ---------------------------------------------------------------------------

LlmJudge::LlmJudge(std::shared_ptr<const LlmBackend> llm)
    : llm_(std::move(llm)), name_("llm-judge(" + llm_->name() + ")") {}

std::vector<std::string> LlmJudge::decompose(const std::string& answer_text) const {
    if (answer_text.empty()) return {};
    GenerationParams params;
    const std::string system =
        "You split an answer into its atomic factual claims. Output exactly one claim per "
        "line with no numbering and no extra text.";
    const std::string raw = llm_->generate(system, answer_text, params);
    std::vector<std::string> claims;
    std::size_t start = 0;
    while (start <= raw.size()) {
        std::size_t end = raw.find('\n', start);
        if (end == std::string::npos) end = raw.size();
        std::string line = raw.substr(start, end - start);
        while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.pop_back();
        std::size_t b = 0;
        while (b < line.size() && std::isspace(static_cast<unsigned char>(line[b]))) ++b;
        if (b > 0) line = line.substr(b);
        if (!line.empty()) claims.push_back(std::move(line));
        if (end == raw.size()) break;
        start = end + 1;
    }
    return claims;
}

bool LlmJudge::yes_no(const std::string& prompt) const {
    GenerationParams params;
    params.max_tokens = 4;
    const std::string system = "Answer strictly YES or NO.";
    std::string text = llm_->generate(system, prompt, params);
    for (auto& c : text) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return text.find("YES") != std::string::npos;
}

bool LlmJudge::is_supported(const std::string& claim, const std::string& context) const {
    return yes_no("Context:\n" + context + "\n\nClaim: " + claim +
                  "\n\nIs the claim fully supported by the context?");
}

bool LlmJudge::is_relevant(const std::string& question, const std::string& statement) const {
    return yes_no("Question: " + question + "\n\nStatement: " + statement +
                  "\n\nIs the statement relevant to answering the question?");
}

} // namespace ragkit
