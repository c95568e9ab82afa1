#include "ragkit/rerank.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "ragkit/errors.hpp"
#include "ragkit/text.hpp"

namespace ragkit {

std::vector<double> cross_score(const CrossEncoder& ce, const std::string& query,
                                std::span<const std::string> documents) {
    if (documents.empty()) throw ConfigError("cross_score: document list is empty");
    const auto scores = ce.score_batch(query, documents);
    if (scores.size() != documents.size()) {
        throw ContractError("cross-encoder returned " + std::to_string(scores.size()) +
                            " scores for " + std::to_string(documents.size()) + " documents");
    }
    for (const double s : scores) {
        if (!std::isfinite(s)) throw ContractError("cross-encoder returned a non-finite score");
    }
    return scores;
}

const std::string& TokenOverlapCrossEncoder::name() const {
    static const std::string n = "token-overlap-stub";
    return n;
}

std::vector<double> TokenOverlapCrossEncoder::score_batch(
    const std::string& query, std::span<const std::string> documents) const {
    const auto query_tokens = content_tokens(query);
    std::vector<double> scores(documents.size(), 0.0);
    const std::int64_t n = static_cast<std::int64_t>(documents.size());
#pragma omp parallel for schedule(static) if (n >= 16)
    for (std::int64_t d = 0; d < n; ++d) {
        const auto doc_tokens = content_tokens(documents[static_cast<std::size_t>(d)]);
        const std::unordered_set<std::string> doc_set(doc_tokens.begin(), doc_tokens.end());
        double hits = 0.0;
        for (const auto& t : query_tokens) {
            if (doc_set.contains(t)) hits += 1.0;
        }
        scores[static_cast<std::size_t>(d)] = hits;
    }
    return scores;
}

BiScoreCrossEncoder::BiScoreCrossEncoder(std::shared_ptr<const Embedder> embedder)
    : embedder_(std::move(embedder)), name_("bi-score(" + embedder_->name() + ")") {}

std::vector<double> BiScoreCrossEncoder::score_batch(
    const std::string& query, std::span<const std::string> documents) const {
    // Mirrors the index arithmetic exactly: double normalization, float32
    // narrowing, in-order double dot with clamp.
    const std::vector<float> unit_query = to_float32(normalize(embedder_->embed(query)));
    std::vector<std::string> doc_texts(documents.begin(), documents.end());
    const auto doc_vectors = embedder_->embed_batch(doc_texts);
    std::vector<double> scores;
    scores.reserve(documents.size());
    for (const auto& dv : doc_vectors) {
        const std::vector<float> unit_doc = to_float32(normalize(dv));
        scores.push_back(unit_dot(unit_query, unit_doc));
    }
    return scores;
}

RetrievalResult dual_stage_retrieve(const VectorIndex& index, const Embedder& embedder,
                                    const CrossEncoder& ce, const std::string& query,
                                    std::size_t k_retrieve, std::size_t k_context) {
    if (k_context < 1 || k_retrieve < k_context) {
        throw ConfigError("dual_stage_retrieve requires k_retrieve >= k_context >= 1");
    }

    using clock = std::chrono::steady_clock;
    const auto as_us = [](clock::duration d) {
        return std::chrono::duration_cast<std::chrono::microseconds>(d).count();
    };

    RetrievalResult result;
    result.query = query;
    if (index.size() == 0) {
        result.warnings.push_back("index is empty, retrieval produced no context");
        return result;
    }

    const auto t0 = clock::now();
    const EmbeddingVector query_vec = embedder.embed(query);
    const auto t1 = clock::now();
    result.candidates = index.top_k(query_vec, k_retrieve);
    const auto t2 = clock::now();

    // Stage 2 sees exactly the stage-1 candidates, nothing else.
    std::vector<std::string> candidate_texts;
    candidate_texts.reserve(result.candidates.size());
    for (const auto& c : result.candidates) candidate_texts.push_back(index.text_at(c.index_pos));
    const auto scores = cross_score(ce, query, candidate_texts);
    for (std::size_t i = 0; i < scores.size(); ++i) {
        result.candidates[i].cross_score = scores[i];
    }
    const auto t3 = clock::now();

    std::vector<std::size_t> order(result.candidates.size());
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& ca = result.candidates[a];
        const auto& cb = result.candidates[b];
        if (*ca.cross_score != *cb.cross_score) return *ca.cross_score > *cb.cross_score;
        if (ca.bi_score != cb.bi_score) return ca.bi_score > cb.bi_score;
        return ca.index_pos < cb.index_pos;
    });
    const std::size_t take = std::min(k_context, order.size());
    for (std::size_t i = 0; i < take; ++i) {
        result.context_chunk_ids.push_back(result.candidates[order[i]].chunk_id);
    }

    result.stage_timings.embed_us = as_us(t1 - t0);
    result.stage_timings.scan_us = as_us(t2 - t1);
    result.stage_timings.rerank_us = as_us(t3 - t2);
    return result;
}

} // namespace ragkit
