#include "ragkit/embed.hpp"

#include <algorithm>
#include <cmath>

#include "ragkit/errors.hpp"
#include "ragkit/text.hpp"

namespace ragkit {

bool EmbeddingVector::is_zero() const {
    return std::all_of(values.begin(), values.end(), [](double v) { return v == 0.0; });
}

std::vector<float> to_float32(const EmbeddingVector& v) {
    std::vector<float> out(v.values.size());
    for (std::size_t i = 0; i < v.values.size(); ++i) {
        out[i] = static_cast<float>(v.values[i]);
    }
    return out;
}

EmbeddingVector Embedder::embed(const std::string& text) const {
    const std::string texts[] = {text};
    auto out = embed_batch(texts);
    return std::move(out.front());
}

double euclidean_norm(const EmbeddingVector& v) {
    double acc = 0.0;
    for (const double x : v.values) {
        acc += x * x;
    }
    return std::sqrt(acc);
}

EmbeddingVector normalize(const EmbeddingVector& v) {
    const double norm = euclidean_norm(v);
    if (norm == 0.0) {
        throw DomainError("cannot normalize a zero vector");
    }
    EmbeddingVector out;
    out.values.resize(v.values.size());
    for (std::size_t i = 0; i < v.values.size(); ++i) {
        out.values[i] = v.values[i] / norm;
    }
    return out;
}

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
    if (a.dim() != b.dim()) {
        throw DomainError("cosine_similarity: dimension mismatch (" + std::to_string(a.dim()) +
                          " vs " + std::to_string(b.dim()) + ")");
    }
    const double na = euclidean_norm(a);
    const double nb = euclidean_norm(b);
    if (na == 0.0 || nb == 0.0) {
        throw DomainError("cosine_similarity: zero vector operand");
    }
    double dot = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        dot += a.values[i] * b.values[i];
    }
    return std::clamp(dot / (na * nb), -1.0, 1.0);
}

double unit_dot(std::span<const float> a, std::span<const float> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        acc += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    }
    return std::clamp(acc, -1.0, 1.0);
}

EmbeddingVector hash_embed(const std::string& text, std::size_t dim, std::uint64_t seed) {
    if (dim < 1) throw ConfigError("hash_embed: dim must be >= 1");
    EmbeddingVector v;
    v.values.resize(dim, 0.0);
    bool any = false;
    for (const auto& token : content_tokens(text)) {
        const std::uint64_t h = fnv1a64(token, seed);
        const std::size_t bucket = static_cast<std::size_t>(h % dim);
        v.values[bucket] += (h >> 63) ? -1.0 : 1.0;
        any = true;
    }
    if (!any) return v; // all-zeros sentinel for token-free text
    if (v.is_zero()) return v; // opposing signs cancelled out entirely
    return normalize(v);
}

HashEmbedder::HashEmbedder(std::size_t dim, std::uint64_t seed)
    : dim_(dim), seed_(seed),
      name_("hash-stub(dim=" + std::to_string(dim) + ",seed=" + std::to_string(seed) + ")") {
    if (dim < 1) throw ConfigError("HashEmbedder: dim must be >= 1");
}

std::vector<EmbeddingVector> HashEmbedder::embed_batch(std::span<const std::string> texts) const {
    std::vector<EmbeddingVector> out(texts.size());
    const std::int64_t n = static_cast<std::int64_t>(texts.size());
#pragma omp parallel for schedule(static) if (n >= 64)
    for (std::int64_t i = 0; i < n; ++i) {
        out[static_cast<std::size_t>(i)] = hash_embed(texts[static_cast<std::size_t>(i)], dim_, seed_);
    }
    return out;
}

} // namespace ragkit
