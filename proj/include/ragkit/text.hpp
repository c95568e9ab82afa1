#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace ragkit {

// Half-open [begin, end) byte range of a token inside its source text.
struct TokenSpan {
    std::size_t begin = 0;
    std::size_t end = 0;
};

// Tokenizer interface. Implementations must be deterministic: the same
// text always produces the same span list.
class Tokenizer {
public:
    virtual ~Tokenizer() = default;
    virtual const std::string& name() const = 0;
    virtual std::vector<TokenSpan> tokenize(std::string_view text) const = 0;
};

// Word-boundary tokenizer: a token is a maximal run of word bytes (ASCII
// alphanumerics plus any byte >= 0x80, so multibyte UTF-8 stays intact) or a
// maximal run of non-space punctuation glyphs. Whitespace separates tokens
// and is never part of one.
class WordTokenizer final : public Tokenizer {
public:
    const std::string& name() const override;
    std::vector<TokenSpan> tokenize(std::string_view text) const override;
};

// Lowercased word tokens only (punctuation runs dropped). This is the token
// set used by the hash embedder, the overlap cross-encoder stub, and the
// lexical judge.
std::vector<std::string> content_tokens(std::string_view text);

// CRLF -> LF plus UTF-8 BOM removal. Applied to every document at load time.
std::string normalize_text(std::string_view raw);

// 64-bit FNV-1a, optionally seeded. Used for the hash embedder and for
// artifact checksums; must produce identical values on every platform.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 0);

// Orders strings with embedded numbers numerically: "Q2" < "Q10".
bool natural_less(std::string_view a, std::string_view b);

} // namespace ragkit
