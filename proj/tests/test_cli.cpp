#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

#include "ragkit/eval.hpp"
#include "ragkit/text.hpp"

#include "support/reference_scores.hpp"

namespace fs = std::filesystem;

namespace {

struct CliResult {
    int exit_code = -1;
    std::string output; // stdout + stderr
};

CliResult run_cli(const std::string& args) {
    const std::string command = std::string(RAGKIT_CLI_BIN) + " " + args + " 2>&1";
    CliResult result;
    FILE* pipe = ::popen(command.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buffer[4096];
    while (std::fgets(buffer, sizeof(buffer), pipe)) result.output += buffer;
    const int status = ::pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

std::string file_bytes(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

std::size_t line_count(const std::string& bytes) {
    std::size_t n = 0;
    for (const char c : bytes) {
        if (c == '\n') ++n;
    }
    return n;
}

// Shared workspace: a tiny corpus plus a question set, built once.
struct CliWorkspace {
    fs::path root;
    fs::path corpus;
    fs::path questions;

    CliWorkspace() {
        root = fs::temp_directory_path() / ("ragkit_cli_" + std::to_string(::getpid()));
        fs::remove_all(root);
        corpus = root / "corpus";
        fs::create_directories(corpus);

        std::ofstream(corpus / "framework.txt")
            << "Policy problems should be reframed around environmental determinants. "
               "Obesity policy is reframed as access to fresh fruits and vegetables.\n\n"
               "The framework lists problem identification and policy analysis steps.\n";
        std::ofstream(corpus / "reporting.txt")
            << "Reporting statutes mandate notification of infectious disease cases "
               "to the state health authority within set deadlines.\n";
        std::ofstream(corpus / "costs.txt")
            << "Program cost analysis compares budget line items across fiscal years.\n";

        questions = root / "questions.jsonl";
        std::ofstream(questions)
            << R"({"id": "Q1", "question": "How should obesity policy be reframed?"})" << "\n"
            << R"({"id": "Q2", "question": "What do reporting statutes mandate?"})" << "\n";
    }
};

CliWorkspace& workspace() {
    static CliWorkspace ws;
    return ws;
}

std::string common_flags(const fs::path& out) {
    return " --dim 64 --seed 11 --out " + out.string();
}

} // namespace

TEST_CASE("cli ingest writes a deterministic chunks artifact") {
    auto& ws = workspace();
    const auto out = ws.root / "ingest";

    const auto first = run_cli("ingest --corpus " + ws.corpus.string() +
                               " --max-chars 120 --overlap-chars 20" + common_flags(out));
    CHECK(first.exit_code == 0);
    REQUIRE(fs::exists(out / "chunks.jsonl"));
    CHECK(fs::exists(out / "chunks.jsonl.meta.json"));
    const auto bytes_1 = file_bytes(out / "chunks.jsonl");

    const auto second = run_cli("ingest --corpus " + ws.corpus.string() +
                                " --max-chars 120 --overlap-chars 20" + common_flags(out));
    CHECK(second.exit_code == 0);
    CHECK(ragkit::fnv1a64(file_bytes(out / "chunks.jsonl")) == ragkit::fnv1a64(bytes_1));

    // The sidecar embeds the run configuration and tool version.
    const auto meta = file_bytes(out / "chunks.jsonl.meta.json");
    CHECK(meta.find("\"tool\"") != std::string::npos);
    CHECK(meta.find("\"seed\": 11") != std::string::npos);
}

TEST_CASE("cli ingest supports the token-window strategy") {
    auto& ws = workspace();
    const auto out = ws.root / "ingest_tokens";
    const auto result = run_cli("ingest --corpus " + ws.corpus.string() +
                                " --chunking tokens --window-tokens 12 --overlap-tokens 3" +
                                common_flags(out));
    CHECK(result.exit_code == 0);
    const auto chunks = file_bytes(out / "chunks.jsonl");
    CHECK(chunks.find("\"strategy\":\"token_window\"") != std::string::npos);
    CHECK(chunks.find("\"token_count\":12") != std::string::npos);
}

TEST_CASE("cli ingest on a missing directory exits with the ingest code") {
    const auto result = run_cli("ingest --corpus /nonexistent/ragkit_corpus --out /tmp/ragkit_x");
    CHECK(result.exit_code == 3);
    CHECK(result.output.find("/nonexistent/ragkit_corpus") != std::string::npos);
}

TEST_CASE("cli index builds deterministically from chunks") {
    auto& ws = workspace();
    const auto out = ws.root / "ingest";
    const auto index_out = ws.root / "index";

    const auto first = run_cli("index --chunks " + (out / "chunks.jsonl").string() +
                               common_flags(index_out));
    CHECK(first.exit_code == 0);
    REQUIRE(fs::exists(index_out / "index.rki"));
    const auto hash_1 = ragkit::fnv1a64(file_bytes(index_out / "index.rki"));

    const auto second = run_cli("index --chunks " + (out / "chunks.jsonl").string() +
                                common_flags(index_out));
    CHECK(second.exit_code == 0);
    CHECK(ragkit::fnv1a64(file_bytes(index_out / "index.rki")) == hash_1);
}

TEST_CASE("cli ask cites chunks in grounded modes only") {
    auto& ws = workspace();
    const auto index_path = (ws.root / "index" / "index.rki").string();

    const auto vanilla = run_cli("ask \"What do reporting statutes mandate?\" --mode vanilla "
                                 "--backend-llm stub:echo" +
                                 common_flags(ws.root / "ask"));
    CHECK(vanilla.exit_code == 0);
    CHECK(vanilla.output.find("cited chunks") == std::string::npos);

    const auto advanced = run_cli("ask \"What do reporting statutes mandate?\" --mode advanced "
                                  "--index " + index_path + common_flags(ws.root / "ask"));
    CHECK(advanced.exit_code == 0);
    CHECK(advanced.output.find("cited chunks:") != std::string::npos);
    CHECK(advanced.output.find("reporting#") != std::string::npos);
}

TEST_CASE("cli ask with a mismatched dim exits with the contract code") {
    auto& ws = workspace();
    const auto index_path = (ws.root / "index" / "index.rki").string();
    const auto result = run_cli("ask \"q\" --mode basic --index " + index_path +
                                " --dim 32 --seed 11 --out " + (ws.root / "ask").string());
    CHECK(result.exit_code == 5);
    CHECK(result.output.find("dim") != std::string::npos);
}

TEST_CASE("cli eval produces a rectangular grid over all three modes") {
    auto& ws = workspace();
    const auto index_path = (ws.root / "index" / "index.rki").string();
    const auto out = ws.root / "eval";

    const auto result = run_cli("eval --index " + index_path + " --questions " +
                                ws.questions.string() + " --jobs 2" + common_flags(out));
    CHECK(result.exit_code == 0);
    REQUIRE(fs::exists(out / "records.jsonl"));
    CHECK(line_count(file_bytes(out / "records.jsonl")) == 6); // 2 questions x 3 modes
    CHECK(fs::exists(out / "answers.jsonl"));
    CHECK(fs::exists(out / "report.txt"));
    CHECK(fs::exists(out / "report.json"));
    CHECK(result.output.find("vanilla_faith") != std::string::npos);
}

TEST_CASE("cli eval restricted to one mode yields a one-mode grid") {
    auto& ws = workspace();
    const auto index_path = (ws.root / "index" / "index.rki").string();
    const auto out = ws.root / "eval_basic";

    const auto result = run_cli("eval --index " + index_path + " --questions " +
                                ws.questions.string() + " --mode basic" + common_flags(out));
    CHECK(result.exit_code == 0);
    CHECK(line_count(file_bytes(out / "records.jsonl")) == 2); // 2 questions x 1 mode
    CHECK(result.output.find("basic_faith") != std::string::npos);
    CHECK(result.output.find("vanilla_faith") == std::string::npos);
}

TEST_CASE("cli ask honors the k-context flag") {
    auto& ws = workspace();
    const auto index_path = (ws.root / "index" / "index.rki").string();
    const auto result = run_cli("ask \"What do reporting statutes mandate?\" --mode advanced "
                                "--index " + index_path + " --k-retrieve 4 --k-context 2" +
                                common_flags(ws.root / "ask"));
    CHECK(result.exit_code == 0);
    const auto cited = result.output.substr(result.output.find("cited chunks:"));
    // Two citations: two '#' separators in the id list.
    CHECK(std::count(cited.begin(), cited.end(), '#') == 2);
}

TEST_CASE("cli report is byte-stable across reruns") {
    auto& ws = workspace();
    const auto records = (ws.root / "eval" / "records.jsonl").string();
    const auto out = ws.root / "report";

    const auto first = run_cli("report --records " + records + common_flags(out));
    CHECK(first.exit_code == 0);
    const auto report_1 = file_bytes(out / "report.txt");
    const auto json_1 = file_bytes(out / "report.json");

    const auto second = run_cli("report --records " + records + common_flags(out));
    CHECK(second.exit_code == 0);
    CHECK(file_bytes(out / "report.txt") == report_1);
    CHECK(file_bytes(out / "report.json") == json_1);
    CHECK(report_1.find("mean") != std::string::npos);
}

TEST_CASE("cli report reproduces the reference-table means and flags discrepancies") {
    auto& ws = workspace();
    const auto records_path = ws.root / "reference_records.jsonl";
    {
        std::ofstream out(records_path);
        for (const auto& rec : ragkit::testing::reference_records()) {
            out << ragkit::eval_record_to_jsonl(rec) << "\n";
        }
    }
    const auto means_path = ws.root / "reported_means.json";
    {
        std::ofstream out(means_path);
        out << R"({"faithfulness": {"vanilla": [0.35, 0.347], "basic": [0.62, 0.621],)"
            << R"( "advanced": [0.80, 0.797]},)"
            << R"( "relevance": {"vanilla": [0.45, 0.450], "basic": [0.70, 0.697],)"
            << R"( "advanced": [0.80, 0.800]}})";
    }

    const auto result = run_cli("report --records " + records_path.string() +
                                " --reported-means " + means_path.string() + " --out " +
                                (ws.root / "ref_report").string());
    CHECK(result.exit_code == 0);
    CHECK(result.output.find("0.347") != std::string::npos);
    CHECK(result.output.find("0.621") != std::string::npos);
    CHECK(result.output.find("0.450") != std::string::npos);
    CHECK(result.output.find("0.800") != std::string::npos);
    CHECK(result.output.find("discrepancy notes") != std::string::npos);
    CHECK(result.output.find("advanced faithfulness") != std::string::npos);
    CHECK(result.output.find("basic relevance") != std::string::npos);
    // 79% vanilla->basic faithfulness shows up in the improvements block.
    CHECK(result.output.find("+79%") != std::string::npos);
}

TEST_CASE("cli surfaces backend failures with the transport code") {
    const auto result = run_cli("ask \"q\" --mode vanilla --backend-llm http://127.0.0.1:1");
    CHECK(result.exit_code == 4);
    CHECK(result.output.find("transport error") != std::string::npos);
}

TEST_CASE("cli eval records are identical across job counts") {
    auto& ws = workspace();
    const auto index_path = (ws.root / "index" / "index.rki").string();
    const auto out_1 = ws.root / "eval_jobs1";
    const auto out_2 = ws.root / "eval_jobs2";

    const auto base = "eval --index " + index_path + " --questions " + ws.questions.string();
    CHECK(run_cli(base + " --jobs 1" + common_flags(out_1)).exit_code == 0);
    CHECK(run_cli(base + " --jobs 2" + common_flags(out_2)).exit_code == 0);
    CHECK(file_bytes(out_1 / "records.jsonl") == file_bytes(out_2 / "records.jsonl"));
    CHECK(file_bytes(out_1 / "report.txt") == file_bytes(out_2 / "report.txt"));
}

TEST_CASE("cli rejects bad configuration with the config code") {
    const auto bad_mode = run_cli("ask \"q\" --mode sideways");
    CHECK(bad_mode.exit_code == 2);

    const auto bad_chunking = run_cli("ingest --corpus /tmp --chunking spiral --out /tmp/r");
    CHECK(bad_chunking.exit_code == 2);

    const auto no_sub = run_cli("");
    CHECK(no_sub.exit_code == 2);
}

TEST_CASE("cli config file supplies defaults and flags win") {
    auto& ws = workspace();
    const auto cfg = ws.root / "run.cfg";
    {
        std::ofstream out(cfg);
        out << "mode=sideways\n"; // invalid on purpose; the flag must override
        out << "dim=64\n";
        out << "seed=11\n";
    }
    const auto index_path = (ws.root / "index" / "index.rki").string();

    const auto overridden = run_cli("ask \"What do reporting statutes mandate?\" --config " +
                                    cfg.string() + " --mode basic --index " + index_path +
                                    " --out " + (ws.root / "ask").string());
    CHECK(overridden.exit_code == 0);

    const auto from_file = run_cli("ask \"q\" --config " + cfg.string() + " --index " +
                                   index_path + " --out " + (ws.root / "ask").string());
    CHECK(from_file.exit_code == 2); // config's invalid mode reaches validation
}
