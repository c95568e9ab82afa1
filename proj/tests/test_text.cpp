#include <doctest.h>

#include <algorithm>
#include <string>
#include <vector>

#include "ragkit/text.hpp"

using namespace ragkit;

TEST_CASE("word tokenizer splits alnum runs and punctuation runs") {
    WordTokenizer tok;
    const std::string text = "ab, cd!?ef";
    const auto spans = tok.tokenize(text);
    std::vector<std::string> tokens;
    for (const auto& s : spans) tokens.push_back(text.substr(s.begin, s.end - s.begin));
    CHECK(tokens == std::vector<std::string>{"ab", ",", "cd", "!?", "ef"});
}

TEST_CASE("word tokenizer keeps multibyte utf-8 runs intact") {
    WordTokenizer tok;
    const std::string text = "caf\xC3\xA9 pol\xC3\xADtica";
    const auto spans = tok.tokenize(text);
    REQUIRE(spans.size() == 2);
    CHECK(text.substr(spans[0].begin, spans[0].end - spans[0].begin) == "caf\xC3\xA9");
}

TEST_CASE("content tokens are lowercased word runs") {
    CHECK(content_tokens("Hello, WORLD! x9") ==
          std::vector<std::string>{"hello", "world", "x9"});
    CHECK(content_tokens("...!?").empty());
    CHECK(content_tokens("").empty());
}

TEST_CASE("normalize_text strips BOM and folds line endings") {
    CHECK(normalize_text("\xEF\xBB\xBFx\r\ny") == "x\ny");
    CHECK(normalize_text("a\rb") == "a\nb");
    CHECK(normalize_text("plain") == "plain");
    CHECK(normalize_text("") == "");
}

TEST_CASE("fnv1a64 is stable and seed-sensitive") {
    // Unseeded FNV-1a of "a" is a published constant.
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(fnv1a64("a", 1) != fnv1a64("a", 2));
    CHECK(fnv1a64("abc", 7) == fnv1a64("abc", 7));
}

TEST_CASE("natural_less orders embedded numbers numerically") {
    CHECK(natural_less("Q2", "Q10"));
    CHECK_FALSE(natural_less("Q10", "Q2"));
    CHECK(natural_less("Q1", "Q2"));
    CHECK(natural_less("a", "b"));
    CHECK_FALSE(natural_less("Q1", "Q1"));
    CHECK(natural_less("Q09", "Q10"));

    std::vector<std::string> ids = {"Q10", "Q1", "Q2"};
    std::sort(ids.begin(), ids.end(),
              [](const std::string& a, const std::string& b) { return natural_less(a, b); });
    CHECK(ids == std::vector<std::string>{"Q1", "Q2", "Q10"});
}
