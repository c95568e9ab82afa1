#include "ragkit/pipeline.hpp"

#include <chrono>

#include <json.hpp>

#include "ragkit/errors.hpp"

using ordered_json = nlohmann::ordered_json;

namespace ragkit {

const char* to_string(Mode m) {
    switch (m) {
    case Mode::vanilla: return "vanilla";
    case Mode::basic: return "basic";
    case Mode::advanced: return "advanced";
    }
    return "unknown";
}

Mode mode_from_string(const std::string& s) {
    if (s == "vanilla") return Mode::vanilla;
    if (s == "basic") return Mode::basic;
    if (s == "advanced") return Mode::advanced;
    throw ConfigError("unknown mode: " + s);
}

const std::string kGroundedSystemText =
    "You are a policy assistant. Answer ONLY using the provided context. If the context "
    "does not contain the answer, say you cannot answer from the provided documents. "
    "Do not use outside knowledge.";

const std::string kVanillaSystemText =
    "You are a policy assistant. Answer the question directly and concisely.";

const std::string kNoContextAnswer = "I cannot answer from the provided documents.";

// ---------------------------------------------------------------------------
// Stub backends
// ---------------------------------------------------------------------------

const std::string& EchoLlm::name() const {
    static const std::string n = "stub:echo";
    return n;
}

std::string EchoLlm::generate(const std::string&, const std::string& user_text,
                              const GenerationParams&) const {
    return user_text;
}

const std::string& ExtractiveLlm::name() const {
    static const std::string n = "stub:extractive";
    return n;
}

std::string ExtractiveLlm::generate(const std::string&, const std::string& user_text,
                                    const GenerationParams&) const {
    const std::string open = "[Context 1]\n";
    if (user_text.rfind(open, 0) != 0) return kNoContextAnswer;
    const std::size_t start = open.size();
    std::size_t end = user_text.find("\n\n[Context 2]", start);
    if (end == std::string::npos) end = user_text.find("\n\nQuestion:", start);
    if (end == std::string::npos) end = user_text.size();
    return user_text.substr(start, end - start);
}

// ---------------------------------------------------------------------------
// Prompt construction and generation
// ---------------------------------------------------------------------------

PromptBundle construct_prompt(const std::string& question, const std::vector<Chunk>& context,
                              Mode mode) {
    if (mode == Mode::vanilla) {
        if (!context.empty()) {
            throw ConfigError("vanilla prompts take no context");
        }
        return {kVanillaSystemText, question, {}};
    }
    if (context.empty()) {
        throw ConfigError("grounded prompts require context");
    }

    PromptBundle bundle;
    bundle.system_text = kGroundedSystemText;
    std::string user;
    for (std::size_t i = 0; i < context.size(); ++i) {
        if (context[i].text.empty()) {
            throw ContractError("context chunk " + context[i].chunk_id + " has empty text");
        }
        user += "[Context " + std::to_string(i + 1) + "]\n";
        user += context[i].text;
        user += "\n\n";
        bundle.context_chunk_ids.push_back(context[i].chunk_id);
    }
    user += "Question: " + question;
    bundle.user_text = std::move(user);
    return bundle;
}

std::string generate(const LlmBackend& llm, const PromptBundle& prompt,
                     const GenerationParams& params) {
    if (prompt.user_text.empty()) {
        throw ConfigError("generate: prompt is empty");
    }
    return llm.generate(prompt.system_text, prompt.user_text, params);
}

// ---------------------------------------------------------------------------
// answer()
// ---------------------------------------------------------------------------

namespace {

void validate_config(const PipelineConfig& config) {
    if (!config.llm) throw ConfigError("pipeline config has no LLM backend");
    if (config.k_context < 1 || config.k_retrieve < config.k_context) {
        throw ConfigError("pipeline config requires k_retrieve >= k_context >= 1");
    }
    if (config.mode != Mode::vanilla) {
        if (!config.embedder) throw ConfigError("grounded modes require an embedder");
        if (!config.index) throw ConfigError("grounded modes require an index");
    }
    if (config.mode == Mode::advanced && !config.cross_encoder) {
        throw ConfigError("advanced mode requires a cross-encoder");
    }
}

Chunk context_chunk_from_index(const VectorIndex& index, const std::string& chunk_id) {
    const auto pos = index.find(chunk_id);
    if (!pos) throw ContractError("context chunk id not present in index: " + chunk_id);
    Chunk c;
    c.chunk_id = chunk_id;
    c.text = index.text_at(*pos);
    return c;
}

} // namespace

GeneratedAnswer answer(const PipelineConfig& config, const std::string& question_id,
                       const std::string& question) {
    validate_config(config);
    const auto t0 = std::chrono::steady_clock::now();

    GeneratedAnswer out;
    out.question_id = question_id;
    out.mode = config.mode;
    out.backend_name = config.llm->name();

    std::vector<Chunk> context;
    if (config.mode == Mode::basic) {
        if (config.index->size() > 0) {
            const auto candidates =
                config.index->top_k(config.embedder->embed(question), config.k_context);
            for (const auto& c : candidates) {
                context.push_back(context_chunk_from_index(*config.index, c.chunk_id));
            }
        }
    } else if (config.mode == Mode::advanced) {
        const auto retrieval =
            dual_stage_retrieve(*config.index, *config.embedder, *config.cross_encoder, question,
                                config.k_retrieve, config.k_context);
        for (const auto& id : retrieval.context_chunk_ids) {
            context.push_back(context_chunk_from_index(*config.index, id));
        }
    }

    PromptBundle prompt;
    if (config.mode != Mode::vanilla && context.empty()) {
        // Retrieval came back empty: still answer, but record the marker.
        out.insufficient_context = true;
        prompt.system_text = kGroundedSystemText;
        prompt.user_text = "[No context was retrieved.]\n\nQuestion: " + question;
    } else {
        prompt = construct_prompt(question, context, config.mode);
    }
    out.context_chunk_ids = prompt.context_chunk_ids;
    out.answer_text = generate(*config.llm, prompt, config.generation);

    out.elapsed_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                         std::chrono::steady_clock::now() - t0)
                         .count();
    return out;
}

// ---------------------------------------------------------------------------
// Answer records
// ---------------------------------------------------------------------------

std::string answer_to_jsonl(const GeneratedAnswer& a) {
    ordered_json j;
    j["question_id"] = a.question_id;
    j["mode"] = to_string(a.mode);
    j["answer_text"] = a.answer_text;
    j["context_chunk_ids"] = a.context_chunk_ids;
    j["backend_name"] = a.backend_name;
    j["elapsed_ms"] = a.elapsed_ms;
    j["insufficient_context"] = a.insufficient_context;
    return j.dump();
}

GeneratedAnswer answer_from_jsonl(const std::string& line) {
    ordered_json j;
    try {
        j = ordered_json::parse(line);
    } catch (const ordered_json::parse_error& e) {
        throw IngestError(std::string("malformed answer line: ") + e.what());
    }
    try {
        GeneratedAnswer a;
        a.question_id = j.at("question_id").get<std::string>();
        a.mode = mode_from_string(j.at("mode").get<std::string>());
        a.answer_text = j.at("answer_text").get<std::string>();
        a.context_chunk_ids = j.at("context_chunk_ids").get<std::vector<std::string>>();
        a.backend_name = j.at("backend_name").get<std::string>();
        a.elapsed_ms = j.at("elapsed_ms").get<std::int64_t>();
        a.insufficient_context = j.value("insufficient_context", false);
        return a;
    } catch (const ordered_json::exception& e) {
        throw IngestError(std::string("answer line missing field: ") + e.what());
    }
}

} // namespace ragkit
