#include "ragkit/corpus.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ragkit/errors.hpp"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace ragkit {

const char* to_string(ChunkStrategy s) {
    switch (s) {
    case ChunkStrategy::recursive_char: return "recursive_char";
    case ChunkStrategy::token_window: return "token_window";
    }
    return "unknown";
}

ChunkStrategy chunk_strategy_from_string(const std::string& s) {
    if (s == "recursive_char") return ChunkStrategy::recursive_char;
    if (s == "token_window") return ChunkStrategy::token_window;
    throw ConfigError("unknown chunk strategy: " + s);
}

// ---------------------------------------------------------------------------
// Corpus loading
// ---------------------------------------------------------------------------

namespace {

bool has_corpus_extension(const fs::path& p) {
    auto ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext == ".txt" || ext == ".md";
}

} // namespace

CorpusLoadResult load_corpus(const std::string& dir_path) {
    std::error_code ec;
    if (!fs::exists(dir_path, ec) || ec) {
        throw IngestError("corpus directory does not exist: " + dir_path);
    }
    if (!fs::is_directory(dir_path, ec) || ec) {
        throw IngestError("corpus path is not a directory: " + dir_path);
    }

    std::vector<fs::path> files;
    fs::directory_iterator it(dir_path, ec);
    if (ec) {
        throw IngestError("corpus directory is not readable: " + dir_path);
    }
    for (const auto& entry : it) {
        if (entry.is_regular_file() && has_corpus_extension(entry.path())) {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end(),
              [](const fs::path& a, const fs::path& b) { return a.string() < b.string(); });

    CorpusLoadResult result;
    for (const auto& path : files) {
        std::ifstream in(path, std::ios::binary);
        if (!in) {
            result.warnings.push_back("skipping unreadable file: " + path.string());
            continue;
        }
        std::ostringstream buf;
        buf << in.rdbuf();
        if (in.bad()) {
            result.warnings.push_back("skipping unreadable file: " + path.string());
            continue;
        }
        Document doc;
        doc.doc_id = path.stem().string();
        doc.source_path = path.string();
        doc.title = path.stem().string();
        doc.text = normalize_text(buf.str());
        result.documents.push_back(std::move(doc));
    }

    // doc_id uniqueness: same stem under different extensions would collide.
    for (std::size_t i = 0; i < result.documents.size(); ++i) {
        for (std::size_t j = i + 1; j < result.documents.size(); ++j) {
            if (result.documents[i].doc_id == result.documents[j].doc_id) {
                result.documents[j].doc_id += "~" + std::to_string(j);
                result.warnings.push_back("duplicate doc_id disambiguated: " +
                                          result.documents[j].source_path);
            }
        }
    }
    return result;
}

// ---------------------------------------------------------------------------
// Recursive character chunking
// ---------------------------------------------------------------------------

namespace {

using Range = std::pair<std::size_t, std::size_t>;

// Splits [lo, hi) at non-overlapping occurrences of the separator, keeping
// the separator attached to the left piece so concatenation is lossless.
// Pieces still longer than the budget recurse into lower-priority separators.
void split_range(const std::string& text, std::size_t lo, std::size_t hi,
                 const std::vector<std::string>& separators, std::size_t sep_idx,
                 std::size_t budget, std::vector<Range>& out) {
    if (hi - lo <= budget) {
        out.emplace_back(lo, hi);
        return;
    }
    for (std::size_t si = sep_idx; si < separators.size(); ++si) {
        const std::string& sep = separators[si];
        std::vector<std::size_t> cuts;
        std::size_t pos = lo;
        while (pos + sep.size() <= hi) {
            const std::size_t found = text.find(sep, pos);
            if (found == std::string::npos || found + sep.size() > hi) break;
            const std::size_t cut = found + sep.size();
            if (cut > lo && cut < hi) cuts.push_back(cut);
            pos = found + sep.size();
        }
        if (cuts.empty()) continue;
        std::size_t piece_lo = lo;
        for (std::size_t k = 0; k <= cuts.size(); ++k) {
            const std::size_t piece_hi = (k < cuts.size()) ? cuts[k] : hi;
            if (piece_hi - piece_lo <= budget) {
                out.emplace_back(piece_lo, piece_hi);
            } else {
                split_range(text, piece_lo, piece_hi, separators, si + 1, budget, out);
            }
            piece_lo = piece_hi;
        }
        return;
    }
    // No separator applies: hard split into budget-sized pieces.
    for (std::size_t p = lo; p < hi; p += budget) {
        out.emplace_back(p, std::min(p + budget, hi));
    }
}

// Greedy left-to-right packing. The first chunk never carries an overlap
// prefix, so it may fill the whole max_chars budget; later chunks must leave
// room for the prefix.
std::vector<Range> merge_adjacent(const std::vector<Range>& pieces, std::size_t first_budget,
                                  std::size_t budget) {
    std::vector<Range> merged;
    for (const auto& piece : pieces) {
        const std::size_t allowed = merged.size() == 1 ? first_budget : budget;
        if (!merged.empty() && piece.second - merged.back().first <= allowed) {
            merged.back().second = piece.second;
        } else {
            merged.push_back(piece);
        }
    }
    return merged;
}

Chunk make_chunk(const Document& doc, std::size_t ordinal, std::size_t begin, std::size_t end,
                 ChunkStrategy strategy, std::size_t token_count) {
    Chunk c;
    c.chunk_id = doc.doc_id + "#" + std::to_string(ordinal);
    c.doc_id = doc.doc_id;
    c.ordinal = ordinal;
    c.text = doc.text.substr(begin, end - begin);
    c.char_begin = begin;
    c.char_end = end;
    c.strategy = strategy;
    c.token_count = token_count;
    return c;
}

void warn(std::vector<std::string>* warnings, std::string message) {
    if (warnings) warnings->push_back(std::move(message));
}

} // namespace

std::vector<Chunk> chunk_recursive(const Document& doc, const RecursiveChunkParams& params,
                                   std::vector<std::string>* warnings) {
    if (params.max_chars <= params.overlap_chars) {
        throw ConfigError("max_chars must exceed overlap_chars");
    }
    if (params.separators.empty()) {
        throw ConfigError("separator hierarchy must not be empty");
    }
    for (const auto& sep : params.separators) {
        if (sep.empty()) throw ConfigError("separators must be non-empty strings");
    }
    if (doc.text.empty()) {
        warn(warnings, "document '" + doc.doc_id + "' is empty, no chunks produced");
        return {};
    }

    // Core pieces are packed against a reduced budget so that prepending the
    // overlap still respects max_chars; only the prefix-free first chunk may
    // use the full budget.
    const std::size_t budget = params.max_chars - params.overlap_chars;
    std::vector<Range> pieces;
    split_range(doc.text, 0, doc.text.size(), params.separators, 0, budget, pieces);
    pieces = merge_adjacent(pieces, params.max_chars, budget);

    const WordTokenizer tokenizer;
    std::vector<Chunk> chunks;
    chunks.reserve(pieces.size());
    std::size_t prev_emitted_begin = 0;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        std::size_t begin = pieces[i].first;
        const std::size_t end = pieces[i].second;
        if (i > 0 && params.overlap_chars > 0) {
            const std::size_t prev_len = pieces[i - 1].second - prev_emitted_begin;
            begin -= std::min(params.overlap_chars, prev_len);
        }
        Chunk c = make_chunk(doc, i, begin, end, ChunkStrategy::recursive_char, 0);
        c.token_count = tokenizer.tokenize(c.text).size();
        prev_emitted_begin = begin;
        chunks.push_back(std::move(c));
    }
    return chunks;
}

std::vector<Chunk> chunk_by_tokens(const Document& doc, const TokenChunkParams& params,
                                   const Tokenizer& tokenizer,
                                   std::vector<std::string>* warnings) {
    if (params.window_tokens <= params.overlap_tokens) {
        throw ConfigError("window_tokens must exceed overlap_tokens");
    }
    const auto tokens = tokenizer.tokenize(doc.text);
    if (tokens.empty()) {
        warn(warnings, "document '" + doc.doc_id + "' has no tokens, no chunks produced");
        return {};
    }

    const std::size_t stride = params.window_tokens - params.overlap_tokens;
    struct Window {
        std::size_t first_token;
        std::size_t end_token;
    };
    std::vector<Window> windows;
    for (std::size_t s = 0; s < tokens.size(); s += stride) {
        windows.push_back({s, std::min(s + params.window_tokens, tokens.size())});
    }

    std::vector<Chunk> chunks;
    chunks.reserve(windows.size());
    for (std::size_t i = 0; i < windows.size(); ++i) {
        const auto& w = windows[i];
        const std::size_t begin = (i == 0) ? 0 : tokens[w.first_token].begin;
        std::size_t end = tokens[w.end_token - 1].end;
        if (i + 1 < windows.size()) {
            // Inter-token bytes up to the next window's first token belong to
            // this chunk, so zero-overlap spans tile the document exactly.
            end = std::max(end, tokens[windows[i + 1].first_token].begin);
        } else {
            end = doc.text.size();
        }
        chunks.push_back(make_chunk(doc, i, begin, end, ChunkStrategy::token_window,
                                    w.end_token - w.first_token));
    }
    return chunks;
}

ChunkStats chunk_stats(const std::vector<Chunk>& chunks) {
    ChunkStats stats;
    stats.chunk_count = chunks.size();
    if (chunks.empty()) return stats;

    std::size_t min_c = chunks[0].text.size(), max_c = min_c, sum_c = 0;
    std::size_t min_t = chunks[0].token_count, max_t = min_t, sum_t = 0;
    for (const auto& c : chunks) {
        min_c = std::min(min_c, c.text.size());
        max_c = std::max(max_c, c.text.size());
        sum_c += c.text.size();
        min_t = std::min(min_t, c.token_count);
        max_t = std::max(max_t, c.token_count);
        sum_t += c.token_count;
    }
    stats.min_chars = min_c;
    stats.max_chars = max_c;
    stats.mean_chars = static_cast<double>(sum_c) / static_cast<double>(chunks.size());
    stats.min_tokens = min_t;
    stats.max_tokens = max_t;
    stats.mean_tokens = static_cast<double>(sum_t) / static_cast<double>(chunks.size());
    return stats;
}

// ---------------------------------------------------------------------------
// Chunk JSONL
// ---------------------------------------------------------------------------

std::string chunk_to_jsonl(const Chunk& chunk) {
    ordered_json j;
    j["chunk_id"] = chunk.chunk_id;
    j["doc_id"] = chunk.doc_id;
    j["ordinal"] = chunk.ordinal;
    j["text"] = chunk.text;
    j["char_span"] = {chunk.char_begin, chunk.char_end};
    j["strategy"] = to_string(chunk.strategy);
    j["token_count"] = chunk.token_count;
    return j.dump();
}

Chunk chunk_from_jsonl(const std::string& line) {
    ordered_json j;
    try {
        j = ordered_json::parse(line);
    } catch (const ordered_json::parse_error& e) {
        throw IngestError(std::string("malformed chunk line: ") + e.what());
    }
    try {
        Chunk c;
        c.chunk_id = j.at("chunk_id").get<std::string>();
        c.doc_id = j.at("doc_id").get<std::string>();
        c.ordinal = j.at("ordinal").get<std::size_t>();
        c.text = j.at("text").get<std::string>();
        c.char_begin = j.at("char_span").at(0).get<std::size_t>();
        c.char_end = j.at("char_span").at(1).get<std::size_t>();
        c.strategy = chunk_strategy_from_string(j.at("strategy").get<std::string>());
        c.token_count = j.at("token_count").get<std::size_t>();
        return c;
    } catch (const ordered_json::exception& e) {
        throw IngestError(std::string("chunk line missing field: ") + e.what());
    }
}

void write_chunks_file(const std::vector<Chunk>& chunks, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IngestError("cannot open chunks file for writing: " + path);
    for (const auto& c : chunks) {
        out << chunk_to_jsonl(c) << '\n';
    }
    if (!out) throw IngestError("failed writing chunks file: " + path);
}

std::vector<Chunk> read_chunks_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IngestError("cannot open chunks file: " + path);
    std::vector<Chunk> chunks;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        chunks.push_back(chunk_from_jsonl(line));
    }
    return chunks;
}

} // namespace ragkit
