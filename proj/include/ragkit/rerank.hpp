#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ragkit/embed.hpp"
#include "ragkit/index.hpp"

namespace ragkit {

// Cross-encoder interface: scores (query, document) pairs jointly. Scores
// are unbounded relevance logits. Implementations must be deterministic for
// a pinned backend or stub.
class CrossEncoder {
public:
    virtual ~CrossEncoder() = default;
    virtual const std::string& name() const = 0;

    // One finite score per document, order preserved.
    virtual std::vector<double> score_batch(const std::string& query,
                                            std::span<const std::string> documents) const = 0;
};

// Validates and returns cross-encoder scores for a non-empty chunk list.
// NaN or missing scores are contract errors.
std::vector<double> cross_score(const CrossEncoder& ce, const std::string& query,
                                std::span<const std::string> documents);

// Stub cross-encoder: score = number of query word tokens that occur in the
// document. Crude, but deterministic and rank-sensitive enough for tests.
class TokenOverlapCrossEncoder final : public CrossEncoder {
public:
    const std::string& name() const override;
    std::vector<double> score_batch(const std::string& query,
                                    std::span<const std::string> documents) const override;
};

// Degenerate cross-encoder that reproduces the first-stage similarity
// bit-for-bit: it re-embeds both sides with the same embedder the index was
// built with, normalizes, and takes the clamped dot product. With this
// scorer the two-stage pipeline collapses to plain top-k.
class BiScoreCrossEncoder final : public CrossEncoder {
public:
    explicit BiScoreCrossEncoder(std::shared_ptr<const Embedder> embedder);

    const std::string& name() const override { return name_; }
    std::vector<double> score_batch(const std::string& query,
                                    std::span<const std::string> documents) const override;

private:
    std::shared_ptr<const Embedder> embedder_;
    std::string name_;
};

struct StageTimings {
    std::int64_t embed_us = 0;
    std::int64_t scan_us = 0;
    std::int64_t rerank_us = 0;
};

// Outcome of one two-stage retrieval: the first-stage candidates (with
// cross scores filled in), and the final context selection ordered by
// descending cross score.
struct RetrievalResult {
    std::string query;
    std::vector<ScoredCandidate> candidates;
    std::vector<std::string> context_chunk_ids;
    StageTimings stage_timings;
    std::vector<std::string> warnings;
};

// Over-retrieve and filter: stage 1 takes the k_retrieve nearest chunks by
// cosine, stage 2 cross-scores exactly those candidates and keeps the
// k_context best. The cross-encoder never sees a chunk outside the stage-1
// output. Cross-score ties fall back to bi_score, then insertion order.
RetrievalResult dual_stage_retrieve(const VectorIndex& index, const Embedder& embedder,
                                    const CrossEncoder& ce, const std::string& query,
                                    std::size_t k_retrieve = 10, std::size_t k_context = 3);

} // namespace ragkit
