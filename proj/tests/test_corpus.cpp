#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <unistd.h>
#include <vector>

#include "ragkit/corpus.hpp"
#include "ragkit/errors.hpp"

using namespace ragkit;
namespace fs = std::filesystem;

namespace {

fs::path make_temp_dir(const std::string& tag) {
    auto dir = fs::temp_directory_path() / ("ragkit_test_" + tag + "_" +
                                            std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write_file(const fs::path& p, const std::string& bytes) {
    std::ofstream out(p, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

Document make_doc(std::string text) {
    Document d;
    d.doc_id = "doc";
    d.title = "doc";
    d.text = std::move(text);
    return d;
}

// Overlap-aware reconstruction: drop each chunk's overlapping prefix (the
// bytes its span shares with the predecessor's span) and concatenate.
std::string reconstruct(const std::vector<Chunk>& chunks) {
    std::string text;
    std::size_t prev_end = 0;
    for (const auto& c : chunks) {
        const std::size_t drop = prev_end > c.char_begin ? prev_end - c.char_begin : 0;
        text += c.text.substr(drop);
        prev_end = c.char_end;
    }
    return text;
}

void check_chunk_invariants(const Document& doc, const std::vector<Chunk>& chunks) {
    std::size_t covered_to = 0;
    for (std::size_t i = 0; i < chunks.size(); ++i) {
        const auto& c = chunks[i];
        CHECK(c.ordinal == i);
        CHECK(c.chunk_id == doc.doc_id + "#" + std::to_string(i));
        REQUIRE(c.char_begin < c.char_end);
        REQUIRE(c.char_end <= doc.text.size());
        CHECK(c.text == doc.text.substr(c.char_begin, c.char_end - c.char_begin));
        // Coverage: spans leave no gap.
        CHECK(c.char_begin <= covered_to);
        covered_to = std::max(covered_to, c.char_end);
    }
    if (!chunks.empty()) {
        CHECK(chunks.front().char_begin == 0);
        CHECK(covered_to == doc.text.size());
        CHECK(reconstruct(chunks) == doc.text);
    }
}

std::string random_document_text(std::mt19937_64& rng) {
    static const char* words[] = {"policy",  "health", "report", "budget", "cost",
                                  "analysis", "review", "virus",  "data",   "plan"};
    std::uniform_int_distribution<int> word_pick(0, 9);
    std::uniform_int_distribution<int> sep_pick(0, 99);
    std::uniform_int_distribution<int> len_pick(1, 220);
    std::string text;
    const int n = len_pick(rng);
    for (int i = 0; i < n; ++i) {
        const int roll = sep_pick(rng);
        if (roll < 4) {
            text += "xxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxx"; // unbroken run
        } else {
            text += words[word_pick(rng)];
        }
        if (roll < 10) {
            text += "\n\n";
        } else if (roll < 20) {
            text += "\n";
        } else if (roll < 35) {
            text += ". ";
        } else {
            text += " ";
        }
    }
    return text;
}

} // namespace

// ---------------------------------------------------------------------------
// load_corpus
// ---------------------------------------------------------------------------

TEST_CASE("load_corpus on an empty directory yields no documents") {
    const auto dir = make_temp_dir("empty");
    const auto result = load_corpus(dir.string());
    CHECK(result.documents.empty());
    CHECK(result.warnings.empty());
    fs::remove_all(dir);
}

TEST_CASE("load_corpus sorts by path and normalizes text") {
    const auto dir = make_temp_dir("sorting");
    write_file(dir / "b.txt", "second");
    write_file(dir / "a.txt", "\xEF\xBB\xBFx\r\ny");
    write_file(dir / "ignored.pdf", "binary");

    const auto result = load_corpus(dir.string());
    REQUIRE(result.documents.size() == 2);
    CHECK(result.documents[0].doc_id == "a");
    CHECK(result.documents[1].doc_id == "b");

    // The fixture really contains CRLF and a BOM; loading must strip both.
    std::ifstream raw(dir / "a.txt", std::ios::binary);
    std::string raw_bytes((std::istreambuf_iterator<char>(raw)),
                          std::istreambuf_iterator<char>());
    CHECK(raw_bytes.find('\r') != std::string::npos);
    CHECK(static_cast<unsigned char>(raw_bytes[0]) == 0xEF);
    CHECK(result.documents[0].text == "x\ny");
    fs::remove_all(dir);
}

TEST_CASE("load_corpus rejects a missing directory") {
    CHECK_THROWS_AS(load_corpus("/nonexistent/ragkit/corpus"), IngestError);
}

// ---------------------------------------------------------------------------
// chunk_recursive
// ---------------------------------------------------------------------------

TEST_CASE("short text stays a single chunk") {
    const auto doc = make_doc(std::string(50, 'a'));
    RecursiveChunkParams params;
    params.max_chars = 1000;
    params.overlap_chars = 0;
    const auto chunks = chunk_recursive(doc, params);
    REQUIRE(chunks.size() == 1);
    CHECK(chunks[0].text == doc.text);
    CHECK(chunks[0].strategy == ChunkStrategy::recursive_char);
}

TEST_CASE("a document within max_chars never splits, even with overlap") {
    // 900 chars of prose-ish text with plenty of separators.
    std::string text;
    while (text.size() < 880) text += "some words here. ";
    const auto doc = make_doc(text);
    RecursiveChunkParams params;
    params.max_chars = 1000;
    params.overlap_chars = 200;
    const auto chunks = chunk_recursive(doc, params);
    REQUIRE(chunks.size() == 1);
    CHECK(chunks[0].text == doc.text);
}

TEST_CASE("oversized two-paragraph text splits at the paragraph separator") {
    const std::string p1(30, 'a');
    const std::string p2(30, 'b');
    const auto doc = make_doc(p1 + "\n\n" + p2);
    RecursiveChunkParams params;
    params.max_chars = 40;
    params.overlap_chars = 0;
    const auto chunks = chunk_recursive(doc, params);

    REQUIRE(chunks.size() == 2);
    // Brute-force oracle: every chunk within bound, boundary on the
    // first-priority separator.
    for (const auto& c : chunks) CHECK(c.text.size() <= params.max_chars);
    CHECK(chunks[0].text == p1 + "\n\n");
    CHECK(chunks[1].text == p2);
    check_chunk_invariants(doc, chunks);
}

TEST_CASE("consecutive chunks share exactly the configured overlap") {
    const std::string p1 = "alpha beta gamma delta";
    const std::string p2 = "epsilon zeta eta theta";
    const auto doc = make_doc(p1 + "\n\n" + p2);
    RecursiveChunkParams params;
    params.max_chars = 30;
    params.overlap_chars = 4;
    const auto chunks = chunk_recursive(doc, params);

    REQUIRE(chunks.size() == 2);
    const std::string tail = chunks[0].text.substr(chunks[0].text.size() - 4);
    const std::string head = chunks[1].text.substr(0, 4);
    CHECK(tail == head);
    check_chunk_invariants(doc, chunks);
}

TEST_CASE("chunker parameter and degenerate-input handling") {
    const auto doc = make_doc("text");
    RecursiveChunkParams params;
    params.max_chars = 10;
    params.overlap_chars = 10;
    CHECK_THROWS_AS(chunk_recursive(doc, params), ConfigError);

    params.overlap_chars = 0;
    params.separators = {};
    CHECK_THROWS_AS(chunk_recursive(doc, params), ConfigError);

    std::vector<std::string> warnings;
    const auto chunks = chunk_recursive(make_doc(""), RecursiveChunkParams{}, &warnings);
    CHECK(chunks.empty());
    CHECK(warnings.size() == 1);
}

TEST_CASE("hard split covers separator-free text") {
    const auto doc = make_doc(std::string(95, 'x'));
    RecursiveChunkParams params;
    params.max_chars = 30;
    params.overlap_chars = 0;
    const auto chunks = chunk_recursive(doc, params);
    REQUIRE(chunks.size() == 4); // 30+30+30+5
    for (const auto& c : chunks) CHECK(c.text.size() <= 30);
    check_chunk_invariants(doc, chunks);
}

// ---------------------------------------------------------------------------
// chunk_by_tokens
// ---------------------------------------------------------------------------

namespace {

Document ten_token_doc() {
    // Tokens "aa".."jj" at stride 3: token i spans [3i, 3i+2).
    return make_doc("aa bb cc dd ee ff gg hh ii jj");
}

} // namespace

TEST_CASE("token window larger than the document yields one chunk") {
    const auto doc = ten_token_doc();
    const WordTokenizer tok;
    TokenChunkParams params;
    params.window_tokens = 16;
    params.overlap_tokens = 0;
    const auto chunks = chunk_by_tokens(doc, params, tok);
    REQUIRE(chunks.size() == 1);
    CHECK(chunks[0].token_count == 10);
    CHECK(chunks[0].text == doc.text);
    CHECK(chunks[0].strategy == ChunkStrategy::token_window);
}

TEST_CASE("token windows without overlap partition the token sequence") {
    const auto doc = ten_token_doc();
    const WordTokenizer tok;
    TokenChunkParams params;
    params.window_tokens = 4;
    params.overlap_tokens = 0;
    const auto chunks = chunk_by_tokens(doc, params, tok);

    REQUIRE(chunks.size() == 3);
    // Hand-enumerated boundaries for the fixture: 4, 4, then the 2 leftovers.
    CHECK(chunks[0].token_count == 4);
    CHECK(chunks[1].token_count == 4);
    CHECK(chunks[2].token_count == 2);
    check_chunk_invariants(doc, chunks);
}

TEST_CASE("token window starts follow the stride arithmetic") {
    const auto doc = ten_token_doc();
    const WordTokenizer tok;
    TokenChunkParams params;
    params.window_tokens = 4;
    params.overlap_tokens = 2;
    const auto chunks = chunk_by_tokens(doc, params, tok);

    // Independent stride loop over the 10 tokens.
    std::vector<std::size_t> expected_starts;
    for (std::size_t s = 0; s < 10; s += params.window_tokens - params.overlap_tokens) {
        expected_starts.push_back(s);
    }
    REQUIRE(chunks.size() == expected_starts.size());
    const auto spans = tok.tokenize(doc.text);
    for (std::size_t i = 1; i < chunks.size(); ++i) {
        CHECK(chunks[i].char_begin == spans[expected_starts[i]].begin);
    }
    CHECK(chunks[0].char_begin == 0);
    check_chunk_invariants(doc, chunks);
}

TEST_CASE("token chunker edge cases") {
    const WordTokenizer tok;
    TokenChunkParams params;
    params.window_tokens = 4;
    params.overlap_tokens = 4;
    CHECK_THROWS_AS(chunk_by_tokens(ten_token_doc(), params, tok), ConfigError);

    params.overlap_tokens = 0;
    std::vector<std::string> warnings;
    const auto chunks = chunk_by_tokens(make_doc("   "), params, tok, &warnings);
    CHECK(chunks.empty());
    CHECK(warnings.size() == 1);
}

// ---------------------------------------------------------------------------
// chunk_stats
// ---------------------------------------------------------------------------

TEST_CASE("chunk_stats aggregates") {
    CHECK(chunk_stats({}).chunk_count == 0);
    CHECK_FALSE(chunk_stats({}).mean_chars.has_value());

    Chunk one;
    one.text = "1234567";
    one.token_count = 1;
    auto s1 = chunk_stats({one});
    CHECK(*s1.min_chars == 7);
    CHECK(*s1.max_chars == 7);
    CHECK(*s1.mean_chars == doctest::Approx(7.0));

    Chunk a, b;
    a.text = "12";
    b.text = "1234";
    a.token_count = 1;
    b.token_count = 3;
    auto s2 = chunk_stats({a, b});
    CHECK(*s2.mean_chars == doctest::Approx(3.0));
    CHECK(*s2.min_tokens == 1);
    CHECK(*s2.max_tokens == 3);
    CHECK(*s2.min_chars <= *s2.mean_chars);
    CHECK(*s2.mean_chars <= *s2.max_chars);
}

// ---------------------------------------------------------------------------
// Randomized properties
// ---------------------------------------------------------------------------

TEST_CASE("recursive chunker round-trips and respects bounds on random documents") {
    std::mt19937_64 rng(20240811);
    for (int trial = 0; trial < 25; ++trial) {
        const auto doc = make_doc(random_document_text(rng));
        RecursiveChunkParams params;
        params.max_chars = std::uniform_int_distribution<std::size_t>(20, 200)(rng);
        params.overlap_chars =
            std::uniform_int_distribution<std::size_t>(0, params.max_chars - 1)(rng);
        const auto chunks = chunk_recursive(doc, params);
        REQUIRE_FALSE(chunks.empty());
        for (const auto& c : chunks) CHECK(c.text.size() <= params.max_chars);
        check_chunk_invariants(doc, chunks);
        if (params.overlap_chars == 0) {
            std::string cat;
            for (const auto& c : chunks) cat += c.text;
            CHECK(cat == doc.text);
        }
    }
}

TEST_CASE("token chunker round-trips and respects bounds on random documents") {
    std::mt19937_64 rng(20240812);
    const WordTokenizer tok;
    for (int trial = 0; trial < 25; ++trial) {
        const auto doc = make_doc(random_document_text(rng));
        TokenChunkParams params;
        params.window_tokens = std::uniform_int_distribution<std::size_t>(3, 40)(rng);
        params.overlap_tokens =
            std::uniform_int_distribution<std::size_t>(0, params.window_tokens - 1)(rng);
        const auto chunks = chunk_by_tokens(doc, params, tok);
        if (chunks.empty()) continue; // token-free document
        for (const auto& c : chunks) CHECK(c.token_count <= params.window_tokens);
        check_chunk_invariants(doc, chunks);
        if (params.overlap_tokens == 0) {
            std::string cat;
            for (const auto& c : chunks) cat += c.text;
            CHECK(cat == doc.text);
        }
    }
}

TEST_CASE("chunking is deterministic") {
    std::mt19937_64 rng(7);
    const auto doc = make_doc(random_document_text(rng));
    RecursiveChunkParams params;
    params.max_chars = 64;
    params.overlap_chars = 16;
    const auto a = chunk_recursive(doc, params);
    const auto b = chunk_recursive(doc, params);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(chunk_to_jsonl(a[i]) == chunk_to_jsonl(b[i]));
    }
}

TEST_CASE("chunk JSONL round-trips") {
    const auto doc = make_doc("alpha beta.\n\ngamma delta");
    RecursiveChunkParams params;
    params.max_chars = 14;
    params.overlap_chars = 3;
    const auto chunks = chunk_recursive(doc, params);
    REQUIRE_FALSE(chunks.empty());
    for (const auto& c : chunks) {
        const auto back = chunk_from_jsonl(chunk_to_jsonl(c));
        CHECK(back.chunk_id == c.chunk_id);
        CHECK(back.text == c.text);
        CHECK(back.char_begin == c.char_begin);
        CHECK(back.char_end == c.char_end);
        CHECK(back.strategy == c.strategy);
        CHECK(back.token_count == c.token_count);
    }
    CHECK_THROWS_AS(chunk_from_jsonl("not json"), IngestError);
    CHECK_THROWS_AS(chunk_from_jsonl("{}"), IngestError);
}
