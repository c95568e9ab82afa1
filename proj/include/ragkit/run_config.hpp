#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "ragkit/embed.hpp"
#include "ragkit/eval.hpp"
#include "ragkit/pipeline.hpp"
#include "ragkit/rerank.hpp"

namespace ragkit {

extern const std::string kToolVersion;

// Full provenance for one CLI run: every output artifact carries a copy so
// results can be reproduced from the artifact alone. Backend selectors are
// either "stub" (deterministic local stubs seeded from `seed`) or an
// http:// URL.
struct RunConfig {
    std::string corpus_dir;
    std::string chunking = "recursive"; // "recursive" | "tokens"
    std::size_t max_chars = 1000;
    std::size_t overlap_chars = 200;
    std::size_t window_tokens = 256;
    std::size_t overlap_tokens = 32;

    std::string backend_embed = "stub";
    std::string backend_score = "stub";
    std::string backend_llm = "stub:extractive"; // stub:echo | stub:extractive | URL
    std::string judge = "lexical";               // "lexical" | "llm"
    std::size_t dim = 384;

    std::string mode = "all"; // vanilla | basic | advanced | all
    std::size_t k_retrieve = 10;
    std::size_t k_context = 3;
    int max_tokens = 512;
    double temperature = 0.0;

    std::string out_dir = ".";
    int jobs = 1;
    std::uint64_t seed = 42;

    std::string chunks_file;
    std::string index_file;
    std::string questions_file;
    std::string records_file;
    std::string reported_means_file;
};

std::string run_config_to_json(const RunConfig& config);

// Writes "<artifact_path>.meta.json" carrying the tool version and the full
// run config. Used for artifacts whose own format has no room for metadata
// (line-delimited and binary files).
void write_meta_sidecar(const std::string& artifact_path, const RunConfig& config);

// Backend factories honoring the stub/URL selectors.
std::shared_ptr<const Embedder> make_embedder(const RunConfig& config);
std::shared_ptr<const CrossEncoder> make_cross_encoder(const RunConfig& config);
std::shared_ptr<const LlmBackend> make_llm(const RunConfig& config);
std::shared_ptr<const Judge> make_judge(const RunConfig& config);

struct QuestionEntry {
    std::string id;
    std::string question;
};

// Question-set file: one {"id": ..., "question": ...} object per line.
std::vector<QuestionEntry> read_questions_file(const std::string& path);

// Reported-means file: {"faithfulness": {"<mode>": [values...]}, ...}.
ReportedMeans read_reported_means_file(const std::string& path);

} // namespace ragkit
