#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ragkit/text.hpp"

namespace ragkit {

// One source file from the corpus, text already normalized (LF endings,
// no BOM). doc_id is unique within a loaded corpus.
struct Document {
    std::string doc_id;
    std::string source_path;
    std::string title;
    std::string text;
};

enum class ChunkStrategy { recursive_char, token_window };

const char* to_string(ChunkStrategy s);
ChunkStrategy chunk_strategy_from_string(const std::string& s);

// An addressable segment of a document. text is always exactly the parent
// substring [char_begin, char_end).
struct Chunk {
    std::string chunk_id; // "doc_id#ordinal"
    std::string doc_id;
    std::size_t ordinal = 0;
    std::string text;
    std::size_t char_begin = 0;
    std::size_t char_end = 0;
    ChunkStrategy strategy = ChunkStrategy::recursive_char;
    std::size_t token_count = 0;
};

struct ChunkStats {
    std::size_t chunk_count = 0;
    std::optional<std::size_t> min_chars;
    std::optional<std::size_t> max_chars;
    std::optional<double> mean_chars;
    std::optional<std::size_t> min_tokens;
    std::optional<std::size_t> max_tokens;
    std::optional<double> mean_tokens;
};

struct CorpusLoadResult {
    std::vector<Document> documents;
    std::vector<std::string> warnings;
};

// Loads every .txt/.md file under dir_path (non-recursive), sorted by path.
// Unreadable files are skipped with a warning; a missing or unreadable
// directory throws IngestError.
CorpusLoadResult load_corpus(const std::string& dir_path);

struct RecursiveChunkParams {
    std::size_t max_chars = 1000;
    std::size_t overlap_chars = 200;
    std::vector<std::string> separators = {"\n\n", "\n", ". ", " "};
};

struct TokenChunkParams {
    std::size_t window_tokens = 256;
    std::size_t overlap_tokens = 32;
};

// Splits doc.text into chunks no longer than max_chars, preferring the
// earliest separator in the hierarchy and falling back to a hard character
// split. When overlap_chars > 0 each chunk is prefixed with the tail of its
// predecessor; dropping those prefixes reconstructs the document exactly.
std::vector<Chunk> chunk_recursive(const Document& doc, const RecursiveChunkParams& params,
                                   std::vector<std::string>* warnings = nullptr);

// Fixed token windows with overlap: window starts walk the token sequence
// with stride window_tokens - overlap_tokens. Char spans are extended over
// inter-token bytes so the spans cover the whole document.
std::vector<Chunk> chunk_by_tokens(const Document& doc, const TokenChunkParams& params,
                                   const Tokenizer& tokenizer,
                                   std::vector<std::string>* warnings = nullptr);

ChunkStats chunk_stats(const std::vector<Chunk>& chunks);

// Line-delimited JSON, one chunk object per line.
std::string chunk_to_jsonl(const Chunk& chunk);
Chunk chunk_from_jsonl(const std::string& line);
void write_chunks_file(const std::vector<Chunk>& chunks, const std::string& path);
std::vector<Chunk> read_chunks_file(const std::string& path);

} // namespace ragkit
