#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ragkit/embed.hpp"
#include "ragkit/index.hpp"
#include "ragkit/rerank.hpp"

namespace ragkit {

enum class Mode { vanilla, basic, advanced };

const char* to_string(Mode m);
Mode mode_from_string(const std::string& s);

struct GenerationParams {
    int max_tokens = 512;
    double temperature = 0.0;
};

// Text generation backend. Implementations wrap either a remote service or
// one of the deterministic stubs below.
class LlmBackend {
public:
    virtual ~LlmBackend() = default;
    virtual const std::string& name() const = 0;
    virtual std::string generate(const std::string& system_text, const std::string& user_text,
                                 const GenerationParams& params) const = 0;
};

// Returns the user prompt verbatim.
class EchoLlm final : public LlmBackend {
public:
    const std::string& name() const override;
    std::string generate(const std::string& system_text, const std::string& user_text,
                         const GenerationParams& params) const override;
};

// Returns the first context block of a grounded prompt verbatim, or a fixed
// refusal sentence when the prompt carries no context. Makes grounded modes
// trivially faithful and the vanilla mode trivially unfaithful, which is what
// the evaluation fixtures need.
class ExtractiveLlm final : public LlmBackend {
public:
    const std::string& name() const override;
    std::string generate(const std::string& system_text, const std::string& user_text,
                         const GenerationParams& params) const override;
};

// System texts are fixed and versioned so prompt golden tests stay stable.
extern const std::string kGroundedSystemText; // version G1
extern const std::string kVanillaSystemText;  // version V1
extern const std::string kNoContextAnswer;

struct PromptBundle {
    std::string system_text;
    std::string user_text;
    std::vector<std::string> context_chunk_ids;
};

// Renders the prompt for a mode. Grounded modes inject every context chunk
// verbatim as a numbered "[Context i]" block followed by the question;
// vanilla passes the question through untouched. Context must be empty for
// vanilla and non-empty otherwise; a context chunk with empty text is a
// contract error.
PromptBundle construct_prompt(const std::string& question, const std::vector<Chunk>& context,
                              Mode mode);

struct GeneratedAnswer {
    std::string question_id;
    Mode mode = Mode::vanilla;
    std::string answer_text;
    std::vector<std::string> context_chunk_ids;
    std::string backend_name;
    std::int64_t elapsed_ms = 0;
    bool insufficient_context = false;
};

// Everything answer() needs for one configuration. vanilla ignores the
// retrieval members; basic needs embedder+index; advanced additionally needs
// the cross-encoder.
struct PipelineConfig {
    Mode mode = Mode::vanilla;
    std::size_t k_retrieve = 10;
    std::size_t k_context = 3;
    GenerationParams generation;
    std::shared_ptr<const LlmBackend> llm;
    std::shared_ptr<const Embedder> embedder;
    std::shared_ptr<const CrossEncoder> cross_encoder;
    const VectorIndex* index = nullptr;
};

// Runs one question through the configured pipeline:
//   vanilla  — no retrieval at all;
//   basic    — top-k_context by cosine, straight into the prompt;
//   advanced — two-stage retrieve (k_retrieve, then cross-encode to
//              k_context).
// Empty retrieval in a grounded mode still generates, with the
// insufficient-context marker recorded.
GeneratedAnswer answer(const PipelineConfig& config, const std::string& question_id,
                       const std::string& question);

// Thin wrapper over the backend with prompt validation.
std::string generate(const LlmBackend& llm, const PromptBundle& prompt,
                     const GenerationParams& params);

std::string answer_to_jsonl(const GeneratedAnswer& a);
GeneratedAnswer answer_from_jsonl(const std::string& line);

} // namespace ragkit
