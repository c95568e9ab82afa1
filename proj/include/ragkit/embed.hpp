#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace ragkit {

// Fixed-dimension dense vector. Held in double precision; the vector index
// narrows to float32 at storage time (its unit-norm tolerance is 1e-6,
// against 1e-9 here).
struct EmbeddingVector {
    std::vector<double> values;

    std::size_t dim() const { return values.size(); }
    bool is_zero() const;
};

// Narrowing cast used at the index storage boundary.
std::vector<float> to_float32(const EmbeddingVector& v);

// Bi-encoder interface. Implementations must be deterministic for a fixed
// model identity: the same text always maps to the same vector.
class Embedder {
public:
    virtual ~Embedder() = default;
    virtual const std::string& name() const = 0;
    virtual std::size_t dim() const = 0;

    // One vector per input text, order preserved. Batch output must equal
    // per-item calls.
    virtual std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) const = 0;

    EmbeddingVector embed(const std::string& text) const;
};

// Scales v to unit Euclidean norm. Throws DomainError on a zero vector.
// Idempotent within 1e-9.
EmbeddingVector normalize(const EmbeddingVector& v);

double euclidean_norm(const EmbeddingVector& v);

// Cosine similarity, clamped to [-1, 1]. Throws DomainError on mismatched
// dimensions or a zero operand. Exactly symmetric in its arguments.
double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b);

// Dot product of two already-normalized float32 rows, accumulated in double
// strictly in index order and clamped to [-1, 1]. This is the exact
// arithmetic the vector index applies per entry.
double unit_dot(std::span<const float> a, std::span<const float> b);

// Deterministic bag-of-words stub standing in for a sentence encoder.
// Each lowercased word token is hashed (seeded FNV-1a 64); the hash picks a
// bucket (h % dim) and a sign (top bit), the bucket accumulates +/-1 per
// occurrence, and the result is unit-normalized. A text with no word tokens
// maps to the all-zeros sentinel, which is flagged unembeddable upstream.
EmbeddingVector hash_embed(const std::string& text, std::size_t dim, std::uint64_t seed);

class HashEmbedder final : public Embedder {
public:
    HashEmbedder(std::size_t dim, std::uint64_t seed);

    const std::string& name() const override { return name_; }
    std::size_t dim() const override { return dim_; }
    std::uint64_t seed() const { return seed_; }
    std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) const override;

private:
    std::size_t dim_;
    std::uint64_t seed_;
    std::string name_;
};

} // namespace ragkit
