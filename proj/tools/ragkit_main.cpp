// ragkit command-line front end: ingest -> index -> ask/eval -> report.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ragkit/corpus.hpp"
#include "ragkit/errors.hpp"
#include "ragkit/eval.hpp"
#include "ragkit/http_backends.hpp"
#include "ragkit/index.hpp"
#include "ragkit/pipeline.hpp"
#include "ragkit/rerank.hpp"
#include "ragkit/run_config.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;
using namespace ragkit;

namespace {

// Exit codes, one class per error family.
constexpr int kExitOk = 0;
constexpr int kExitUnexpected = 1;
constexpr int kExitConfig = 2;
constexpr int kExitIngest = 3;
constexpr int kExitTransport = 4;
constexpr int kExitContract = 5;

void ensure_out_dir(const RunConfig& config) {
    std::error_code ec;
    fs::create_directories(config.out_dir, ec);
    if (ec) throw IngestError("cannot create output directory: " + config.out_dir);
}

void print_warnings(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

std::vector<Chunk> chunk_documents(const RunConfig& config, const std::vector<Document>& docs,
                                   std::vector<std::string>* warnings) {
    if (config.chunking != "recursive" && config.chunking != "tokens") {
        throw ConfigError("chunking must be 'recursive' or 'tokens', got: " + config.chunking);
    }
    std::vector<Chunk> all;
    const WordTokenizer tokenizer;
    for (const auto& doc : docs) {
        std::vector<Chunk> chunks;
        if (config.chunking == "recursive") {
            RecursiveChunkParams params;
            params.max_chars = config.max_chars;
            params.overlap_chars = config.overlap_chars;
            chunks = chunk_recursive(doc, params, warnings);
        } else if (config.chunking == "tokens") {
            TokenChunkParams params;
            params.window_tokens = config.window_tokens;
            params.overlap_tokens = config.overlap_tokens;
            chunks = chunk_by_tokens(doc, params, tokenizer, warnings);
        }
        all.insert(all.end(), std::make_move_iterator(chunks.begin()),
                   std::make_move_iterator(chunks.end()));
    }
    return all;
}

int cmd_ingest(const RunConfig& config) {
    if (config.corpus_dir.empty()) throw ConfigError("ingest requires --corpus");
    ensure_out_dir(config);

    auto loaded = load_corpus(config.corpus_dir);
    std::vector<std::string> warnings = std::move(loaded.warnings);
    const auto chunks = chunk_documents(config, loaded.documents, &warnings);
    print_warnings(warnings);

    const std::string chunks_path = (fs::path(config.out_dir) / "chunks.jsonl").string();
    write_chunks_file(chunks, chunks_path);
    write_meta_sidecar(chunks_path, config);

    const auto stats = chunk_stats(chunks);
    std::cout << "documents: " << loaded.documents.size() << "\n";
    std::cout << "chunks:    " << stats.chunk_count << "\n";
    if (stats.chunk_count > 0) {
        std::cout << "chars:     min " << *stats.min_chars << "  max " << *stats.max_chars
                  << "  mean " << *stats.mean_chars << "\n";
        std::cout << "tokens:    min " << *stats.min_tokens << "  max " << *stats.max_tokens
                  << "  mean " << *stats.mean_tokens << "\n";
    }
    std::cout << "wrote " << chunks_path << "\n";
    return kExitOk;
}

int cmd_index(const RunConfig& config) {
    if (config.chunks_file.empty()) throw ConfigError("index requires --chunks");
    ensure_out_dir(config);

    const auto chunks = read_chunks_file(config.chunks_file);
    const auto embedder = make_embedder(config);
    std::vector<std::string> warnings;
    const auto index = build_index(chunks, *embedder, &warnings);
    print_warnings(warnings);

    const std::string index_path = (fs::path(config.out_dir) / "index.rki").string();
    save_index(index, index_path);
    write_meta_sidecar(index_path, config);

    std::cout << "indexed " << index.size() << " chunks (dim " << index.dim() << ", embedder "
              << index.embedder_name() << ")\n";
    std::cout << "wrote " << index_path << "\n";
    return kExitOk;
}

PipelineConfig pipeline_for_mode(const RunConfig& config, Mode mode, const VectorIndex* index,
                                 const std::shared_ptr<const Embedder>& embedder,
                                 const std::shared_ptr<const CrossEncoder>& cross,
                                 const std::shared_ptr<const LlmBackend>& llm) {
    PipelineConfig pc;
    pc.mode = mode;
    pc.k_retrieve = config.k_retrieve;
    pc.k_context = config.k_context;
    pc.generation.max_tokens = config.max_tokens;
    pc.generation.temperature = config.temperature;
    pc.llm = llm;
    if (mode != Mode::vanilla) {
        pc.embedder = embedder;
        pc.index = index;
    }
    if (mode == Mode::advanced) pc.cross_encoder = cross;
    return pc;
}

VectorIndex load_index_checked(const RunConfig& config, const Embedder& embedder) {
    if (config.index_file.empty()) throw ConfigError("this command requires --index");
    VectorIndex index = load_index(config.index_file);
    if (index.dim() != embedder.dim()) {
        throw ContractError("configured embedder dim " + std::to_string(embedder.dim()) +
                            " does not match index dim " + std::to_string(index.dim()));
    }
    return index;
}

int cmd_ask(const RunConfig& config, const std::string& question) {
    if (config.mode == "all") throw ConfigError("ask requires a single --mode");
    const Mode mode = mode_from_string(config.mode);

    const auto llm = make_llm(config);
    std::shared_ptr<const Embedder> embedder;
    std::shared_ptr<const CrossEncoder> cross;
    std::optional<VectorIndex> index;
    if (mode != Mode::vanilla) {
        embedder = make_embedder(config);
        index = load_index_checked(config, *embedder);
        if (mode == Mode::advanced) cross = make_cross_encoder(config);
    }

    const auto pc = pipeline_for_mode(config, mode, index ? &*index : nullptr, embedder, cross, llm);
    const auto result = answer(pc, "cli", question);

    std::cout << result.answer_text << "\n";
    if (mode != Mode::vanilla) {
        std::cout << "\ncited chunks:";
        if (result.context_chunk_ids.empty()) {
            std::cout << " (none — insufficient context)";
        }
        for (const auto& id : result.context_chunk_ids) std::cout << " " << id;
        std::cout << "\n";
    }
    return kExitOk;
}

int cmd_eval(const RunConfig& config) {
    ensure_out_dir(config);

    std::vector<Mode> modes;
    if (config.mode == "all") {
        modes = {Mode::vanilla, Mode::basic, Mode::advanced};
    } else {
        modes = {mode_from_string(config.mode)};
    }

    const auto llm = make_llm(config);
    const auto embedder = make_embedder(config);
    const auto cross = make_cross_encoder(config);
    const auto judge = make_judge(config);
    const VectorIndex index = load_index_checked(config, *embedder);
    if (config.questions_file.empty()) throw ConfigError("eval requires --questions");
    const auto questions = read_questions_file(config.questions_file);

    struct Task {
        std::size_t question_idx;
        Mode mode;
    };
    std::vector<Task> tasks;
    for (std::size_t qi = 0; qi < questions.size(); ++qi) {
        for (const Mode m : modes) tasks.push_back({qi, m});
    }

    std::vector<GeneratedAnswer> answers(tasks.size());
    std::vector<EvalRecord> records(tasks.size());
    std::vector<std::string> task_errors(tasks.size());

    const int jobs = std::max(1, config.jobs);
    const std::int64_t n_tasks = static_cast<std::int64_t>(tasks.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(jobs)
#endif
    for (std::int64_t t = 0; t < n_tasks; ++t) {
        const auto& task = tasks[static_cast<std::size_t>(t)];
        const auto& q = questions[task.question_idx];
        try {
            const auto pc =
                pipeline_for_mode(config, task.mode, &index, embedder, cross, llm);
            auto ans = answer(pc, q.id, q.question);
            std::vector<std::string> context_texts;
            for (const auto& id : ans.context_chunk_ids) {
                context_texts.push_back(index.text_at(*index.find(id)));
            }
            records[static_cast<std::size_t>(t)] =
                evaluate_answer(*judge, q.question, ans, context_texts);
            answers[static_cast<std::size_t>(t)] = std::move(ans);
        } catch (const std::exception& e) {
            task_errors[static_cast<std::size_t>(t)] = e.what();
        }
    }
    for (const auto& err : task_errors) {
        if (!err.empty()) throw ContractError("evaluation task failed: " + err);
    }

    // Tasks were laid out question-major; emit records ordered by question id.
    std::vector<std::size_t> order(tasks.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& qa = questions[tasks[a].question_idx].id;
        const auto& qb = questions[tasks[b].question_idx].id;
        if (qa != qb) return natural_less(qa, qb);
        return static_cast<int>(tasks[a].mode) < static_cast<int>(tasks[b].mode);
    });

    std::vector<GeneratedAnswer> answers_sorted;
    std::vector<EvalRecord> records_sorted;
    for (const auto i : order) {
        answers_sorted.push_back(std::move(answers[i]));
        records_sorted.push_back(std::move(records[i]));
    }

    const std::string answers_path = (fs::path(config.out_dir) / "answers.jsonl").string();
    {
        std::ofstream out(answers_path, std::ios::binary | std::ios::trunc);
        if (!out) throw IngestError("cannot write answers file: " + answers_path);
        for (const auto& a : answers_sorted) out << answer_to_jsonl(a) << '\n';
    }
    write_meta_sidecar(answers_path, config);

    const std::string records_path = (fs::path(config.out_dir) / "records.jsonl").string();
    write_eval_records(records_sorted, records_path);
    write_meta_sidecar(records_path, config);

    ReportedMeans reported;
    if (!config.reported_means_file.empty()) {
        reported = read_reported_means_file(config.reported_means_file);
    }
    const auto report = aggregate(records_sorted, reported);

    const std::string report_txt_path = (fs::path(config.out_dir) / "report.txt").string();
    {
        std::ofstream out(report_txt_path, std::ios::binary | std::ios::trunc);
        out << report.render_text();
    }
    const std::string report_json_path = (fs::path(config.out_dir) / "report.json").string();
    {
        ordered_json j = ordered_json::parse(report.to_json());
        j["tool"] = kToolVersion;
        j["run_config"] = ordered_json::parse(run_config_to_json(config));
        std::ofstream out(report_json_path, std::ios::binary | std::ios::trunc);
        out << j.dump(2) << '\n';
    }

    std::cout << report.render_text();
    std::cout << "\nwrote " << records_path << "\n";
    std::cout << "wrote " << report_txt_path << "\n";
    return kExitOk;
}

int cmd_report(const RunConfig& config) {
    if (config.records_file.empty()) throw ConfigError("report requires --records");
    ensure_out_dir(config);

    const auto records = read_eval_records(config.records_file);
    ReportedMeans reported;
    if (!config.reported_means_file.empty()) {
        reported = read_reported_means_file(config.reported_means_file);
    }
    const auto report = aggregate(records, reported);

    const std::string report_txt_path = (fs::path(config.out_dir) / "report.txt").string();
    {
        std::ofstream out(report_txt_path, std::ios::binary | std::ios::trunc);
        out << report.render_text();
    }
    const std::string report_json_path = (fs::path(config.out_dir) / "report.json").string();
    {
        ordered_json j = ordered_json::parse(report.to_json());
        j["tool"] = kToolVersion;
        j["run_config"] = ordered_json::parse(run_config_to_json(config));
        std::ofstream out(report_json_path, std::ios::binary | std::ios::trunc);
        out << j.dump(2) << '\n';
    }

    std::cout << report.render_text();
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"ragkit — two-stage retrieval question answering over plain-text corpora"};
    app.fallthrough();
    app.set_config("--config", "", "key=value config file; command-line flags win");

    RunConfig config;
    std::string question;

    app.add_option("--corpus", config.corpus_dir, "corpus directory of .txt/.md files");
    app.add_option("--chunking", config.chunking, "chunking strategy: recursive | tokens");
    app.add_option("--max-chars", config.max_chars, "recursive chunker: max chunk characters");
    app.add_option("--overlap-chars", config.overlap_chars, "recursive chunker: overlap characters");
    app.add_option("--window-tokens", config.window_tokens, "token chunker: window size");
    app.add_option("--overlap-tokens", config.overlap_tokens, "token chunker: overlap tokens");
    app.add_option("--backend-embed", config.backend_embed, "embedding backend: stub | URL");
    app.add_option("--backend-score", config.backend_score, "cross-encoder backend: stub | URL");
    app.add_option("--backend-llm", config.backend_llm,
                   "LLM backend: stub:echo | stub:extractive | URL");
    app.add_option("--judge", config.judge, "eval judge: lexical | llm");
    app.add_option("--dim", config.dim, "embedding dimension");
    app.add_option("--mode", config.mode, "pipeline mode: vanilla | basic | advanced | all");
    app.add_option("--k-retrieve", config.k_retrieve, "first-stage candidate count");
    app.add_option("--k-context", config.k_context, "final context chunk count");
    app.add_option("--max-tokens", config.max_tokens, "generation token budget");
    app.add_option("--temperature", config.temperature, "generation temperature");
    app.add_option("--out", config.out_dir, "output directory");
    app.add_option("--jobs", config.jobs, "parallel evaluation jobs");
    app.add_option("--seed", config.seed, "seed for all stub randomness");
    app.add_option("--chunks", config.chunks_file, "chunks.jsonl path");
    app.add_option("--index", config.index_file, "index file path");
    app.add_option("--questions", config.questions_file, "question-set JSONL path");
    app.add_option("--records", config.records_file, "eval records JSONL path");
    app.add_option("--reported-means", config.reported_means_file,
                   "JSON of externally reported means to cross-check");

    auto* ingest = app.add_subcommand("ingest", "load a corpus and write chunks");
    auto* index_cmd = app.add_subcommand("index", "embed chunks and persist a vector index");
    auto* ask = app.add_subcommand("ask", "answer one question");
    ask->add_option("question", question, "the question to answer")->required();
    auto* eval_cmd = app.add_subcommand("eval", "run and score a question set");
    auto* report_cmd = app.add_subcommand("report", "aggregate eval records into a report");
    app.require_subcommand(1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (ingest->parsed()) return cmd_ingest(config);
        if (index_cmd->parsed()) return cmd_index(config);
        if (ask->parsed()) return cmd_ask(config, question);
        if (eval_cmd->parsed()) return cmd_eval(config);
        if (report_cmd->parsed()) return cmd_report(config);
        return kExitConfig;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const IndexLoadError& e) {
        std::cerr << "index load error: " << e.what() << "\n";
        return kExitIngest;
    } catch (const IngestError& e) {
        std::cerr << "ingest error: " << e.what() << "\n";
        return kExitIngest;
    } catch (const TransportError& e) {
        std::cerr << "transport error (" << e.stage() << "): " << e.what() << "\n";
        return kExitTransport;
    } catch (const ContractError& e) {
        std::cerr << "contract error: " << e.what() << "\n";
        return kExitContract;
    } catch (const DomainError& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return kExitContract;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return kExitUnexpected;
    }
}
