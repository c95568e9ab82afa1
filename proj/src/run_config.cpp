#include "ragkit/run_config.hpp"

#include <fstream>

#include <json.hpp>

#include "ragkit/errors.hpp"
#include "ragkit/http_backends.hpp"

using ordered_json = nlohmann::ordered_json;

namespace ragkit {

const std::string kToolVersion = "ragkit 0.1.0";

std::string run_config_to_json(const RunConfig& c) {
    ordered_json j;
    j["corpus_dir"] = c.corpus_dir;
    j["chunking"] = c.chunking;
    j["max_chars"] = c.max_chars;
    j["overlap_chars"] = c.overlap_chars;
    j["window_tokens"] = c.window_tokens;
    j["overlap_tokens"] = c.overlap_tokens;
    j["backend_embed"] = c.backend_embed;
    j["backend_score"] = c.backend_score;
    j["backend_llm"] = c.backend_llm;
    j["judge"] = c.judge;
    j["dim"] = c.dim;
    j["mode"] = c.mode;
    j["k_retrieve"] = c.k_retrieve;
    j["k_context"] = c.k_context;
    j["max_tokens"] = c.max_tokens;
    j["temperature"] = c.temperature;
    j["out_dir"] = c.out_dir;
    j["jobs"] = c.jobs;
    j["seed"] = c.seed;
    j["chunks_file"] = c.chunks_file;
    j["index_file"] = c.index_file;
    j["questions_file"] = c.questions_file;
    j["records_file"] = c.records_file;
    j["reported_means_file"] = c.reported_means_file;
    return j.dump(2);
}

void write_meta_sidecar(const std::string& artifact_path, const RunConfig& config) {
    ordered_json j;
    j["tool"] = kToolVersion;
    j["run_config"] = ordered_json::parse(run_config_to_json(config));
    const std::string path = artifact_path + ".meta.json";
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IngestError("cannot write meta sidecar: " + path);
    out << j.dump(2) << '\n';
}

namespace {

bool is_url(const std::string& selector) {
    return selector.rfind("http://", 0) == 0;
}

} // namespace

std::shared_ptr<const Embedder> make_embedder(const RunConfig& config) {
    if (config.backend_embed == "stub") {
        return std::make_shared<HashEmbedder>(config.dim, config.seed);
    }
    if (is_url(config.backend_embed)) {
        return std::make_shared<HttpEmbedder>(parse_endpoint(config.backend_embed), config.dim);
    }
    throw ConfigError("backend-embed must be 'stub' or an http:// URL, got: " +
                      config.backend_embed);
}

std::shared_ptr<const CrossEncoder> make_cross_encoder(const RunConfig& config) {
    if (config.backend_score == "stub") {
        return std::make_shared<TokenOverlapCrossEncoder>();
    }
    if (is_url(config.backend_score)) {
        return std::make_shared<HttpCrossEncoder>(parse_endpoint(config.backend_score));
    }
    throw ConfigError("backend-score must be 'stub' or an http:// URL, got: " +
                      config.backend_score);
}

std::shared_ptr<const LlmBackend> make_llm(const RunConfig& config) {
    if (config.backend_llm == "stub:echo") return std::make_shared<EchoLlm>();
    if (config.backend_llm == "stub:extractive") return std::make_shared<ExtractiveLlm>();
    if (is_url(config.backend_llm)) {
        return std::make_shared<HttpLlm>(parse_endpoint(config.backend_llm));
    }
    throw ConfigError(
        "backend-llm must be 'stub:echo', 'stub:extractive' or an http:// URL, got: " +
        config.backend_llm);
}

std::shared_ptr<const Judge> make_judge(const RunConfig& config) {
    if (config.judge == "lexical") return std::make_shared<LexicalJudge>();
    if (config.judge == "llm") {
        if (!is_url(config.backend_llm)) {
            throw ConfigError("judge 'llm' requires an http:// LLM backend");
        }
        return std::make_shared<LlmJudge>(make_llm(config));
    }
    throw ConfigError("judge must be 'lexical' or 'llm', got: " + config.judge);
}

std::vector<QuestionEntry> read_questions_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IngestError("cannot open questions file: " + path);
    std::vector<QuestionEntry> questions;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            const auto j = ordered_json::parse(line);
            questions.push_back(
                {j.at("id").get<std::string>(), j.at("question").get<std::string>()});
        } catch (const ordered_json::exception& e) {
            throw IngestError("malformed question on line " + std::to_string(line_no) + " of " +
                              path + ": " + e.what());
        }
    }
    if (questions.empty()) throw IngestError("questions file is empty: " + path);
    return questions;
}

ReportedMeans read_reported_means_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IngestError("cannot open reported-means file: " + path);
    ordered_json j;
    try {
        in >> j;
    } catch (const ordered_json::parse_error& e) {
        throw IngestError(std::string("malformed reported-means file: ") + e.what());
    }
    ReportedMeans means;
    for (const auto& [metric, by_mode] : j.items()) {
        if (metric != "faithfulness" && metric != "relevance") {
            throw IngestError("reported-means metric must be faithfulness or relevance, got: " +
                              metric);
        }
        for (const auto& [mode_name, values] : by_mode.items()) {
            const Mode mode = mode_from_string(mode_name);
            for (const auto& v : values) {
                means[metric][mode].push_back(v.get<double>());
            }
        }
    }
    return means;
}

} // namespace ragkit
