#include "ragkit/text.hpp"

#include <algorithm>
#include <cctype>

namespace ragkit {

namespace {

bool is_space_byte(unsigned char c) {
    return std::isspace(c) != 0;
}

bool is_word_byte(unsigned char c) {
    return std::isalnum(c) != 0 || c >= 0x80;
}

} // namespace

const std::string& WordTokenizer::name() const {
    static const std::string n = "word-boundary";
    return n;
}

std::vector<TokenSpan> WordTokenizer::tokenize(std::string_view text) const {
    std::vector<TokenSpan> spans;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        const auto c = static_cast<unsigned char>(text[i]);
        if (is_space_byte(c)) {
            ++i;
            continue;
        }
        const bool word = is_word_byte(c);
        std::size_t j = i + 1;
        while (j < n) {
            const auto cj = static_cast<unsigned char>(text[j]);
            if (is_space_byte(cj) || is_word_byte(cj) != word) break;
            ++j;
        }
        spans.push_back({i, j});
        i = j;
    }
    return spans;
}

std::vector<std::string> content_tokens(std::string_view text) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        if (!is_word_byte(static_cast<unsigned char>(text[i]))) {
            ++i;
            continue;
        }
        std::size_t j = i + 1;
        while (j < n && is_word_byte(static_cast<unsigned char>(text[j]))) ++j;
        std::string tok(text.substr(i, j - i));
        std::transform(tok.begin(), tok.end(), tok.begin(), [](unsigned char c) {
            return static_cast<char>(std::tolower(c));
        });
        tokens.push_back(std::move(tok));
        i = j;
    }
    return tokens;
}

std::string normalize_text(std::string_view raw) {
    std::string_view body = raw;
    if (body.size() >= 3 && static_cast<unsigned char>(body[0]) == 0xEF &&
        static_cast<unsigned char>(body[1]) == 0xBB &&
        static_cast<unsigned char>(body[2]) == 0xBF) {
        body.remove_prefix(3);
    }
    std::string out;
    out.reserve(body.size());
    for (std::size_t i = 0; i < body.size(); ++i) {
        if (body[i] == '\r') {
            if (i + 1 < body.size() && body[i + 1] == '\n') continue; // CRLF -> LF
            out.push_back('\n');                                      // lone CR -> LF
            continue;
        }
        out.push_back(body[i]);
    }
    return out;
}

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed) {
    std::uint64_t h = 14695981039346656037ULL ^ (seed * 0x9E3779B97F4A7C15ULL);
    for (const char c : bytes) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    return h;
}

bool natural_less(std::string_view a, std::string_view b) {
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        const auto ca = static_cast<unsigned char>(a[i]);
        const auto cb = static_cast<unsigned char>(b[j]);
        if (std::isdigit(ca) && std::isdigit(cb)) {
            std::size_t ia = i, jb = j;
            while (ia < a.size() && std::isdigit(static_cast<unsigned char>(a[ia]))) ++ia;
            while (jb < b.size() && std::isdigit(static_cast<unsigned char>(b[jb]))) ++jb;
            std::string_view da = a.substr(i, ia - i);
            std::string_view db = b.substr(j, jb - j);
            std::string_view ta = da.substr(std::min(da.find_first_not_of('0'), da.size()));
            std::string_view tb = db.substr(std::min(db.find_first_not_of('0'), db.size()));
            if (ta.size() != tb.size()) return ta.size() < tb.size();
            if (ta != tb) return ta < tb;
            i = ia;
            j = jb;
            continue;
        }
        if (ca != cb) return ca < cb;
        ++i;
        ++j;
    }
    return a.size() - i < b.size() - j;
}

} // namespace ragkit
