#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "ragkit/corpus.hpp"
#include "ragkit/embed.hpp"

namespace ragkit {

// One retrieval candidate: first-stage similarity, plus the second-stage
// score once re-ranking has run. index_pos is the entry's insertion position,
// which is also the deterministic tie-break key.
struct ScoredCandidate {
    std::string chunk_id;
    double bi_score = 0.0;
    std::optional<double> cross_score;
    std::size_t index_pos = 0;
};

// Exact-scan dense vector index. Stores unit-normalized vectors in insertion
// order; immutable once built, so concurrent queries are safe.
class VectorIndex {
public:
    VectorIndex(std::size_t dim, std::string embedder_name);

    // Appends an entry. The vector must already be unit-normalized; dim
    // mismatch, non-unit norm (beyond 1e-6), and duplicate chunk ids are
    // contract errors.
    void add_entry(const std::string& chunk_id, const std::string& text,
                   std::span<const float> unit_vector);

    std::size_t size() const { return chunk_ids_.size(); }
    std::size_t dim() const { return dim_; }
    const std::string& embedder_name() const { return embedder_name_; }

    const std::string& chunk_id_at(std::size_t pos) const { return chunk_ids_[pos]; }
    const std::string& text_at(std::size_t pos) const { return texts_[pos]; }
    std::span<const float> vector_at(std::size_t pos) const;
    std::optional<std::size_t> find(const std::string& chunk_id) const;

    // Exact top-k by cosine: scans every entry, sorts by descending score,
    // breaks ties by ascending insertion position. The query is normalized
    // internally; k is clamped to the index size.
    std::vector<ScoredCandidate> top_k(const EmbeddingVector& query, std::size_t k) const;

private:
    std::size_t dim_;
    std::string embedder_name_;
    std::vector<std::string> chunk_ids_;
    std::vector<std::string> texts_;
    std::vector<float> matrix_; // row-major, size() x dim_
    std::unordered_map<std::string, std::size_t> id_to_pos_;
};

// Embeds every chunk and assembles the index. Chunks that hash to the
// zero-vector sentinel are excluded with a warning. An embedder transport
// failure aborts the build, reporting how far it got.
VectorIndex build_index(const std::vector<Chunk>& chunks, const Embedder& embedder,
                        std::vector<std::string>* warnings = nullptr);

// Binary persistence: fixed little-endian header (magic, version, dim,
// count, embedder name), float32 vector payload, JSON chunk table, FNV-1a
// checksum over everything before it. Byte-identical for identical inputs.
void save_index(const VectorIndex& index, const std::string& path);
VectorIndex load_index(const std::string& path);

} // namespace ragkit
