#include "ragkit/index.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "ragkit/errors.hpp"
#include "ragkit/text.hpp"
#include "ragkit/topk_kernel.hpp"

using ordered_json = nlohmann::ordered_json;

namespace ragkit {

VectorIndex::VectorIndex(std::size_t dim, std::string embedder_name)
    : dim_(dim), embedder_name_(std::move(embedder_name)) {
    if (dim_ == 0) throw ConfigError("VectorIndex: dim must be >= 1");
}

void VectorIndex::add_entry(const std::string& chunk_id, const std::string& text,
                            std::span<const float> unit_vector) {
    if (unit_vector.size() != dim_) {
        throw ContractError("index entry dimension " + std::to_string(unit_vector.size()) +
                            " does not match index dim " + std::to_string(dim_));
    }
    if (id_to_pos_.contains(chunk_id)) {
        throw ContractError("duplicate chunk_id in index: " + chunk_id);
    }
    double norm_sq = 0.0;
    for (const float v : unit_vector) {
        if (!std::isfinite(v)) throw ContractError("non-finite component in vector for " + chunk_id);
        norm_sq += static_cast<double>(v) * static_cast<double>(v);
    }
    if (std::abs(std::sqrt(norm_sq) - 1.0) > 1e-6) {
        throw ContractError("vector for " + chunk_id + " is not unit-normalized");
    }
    id_to_pos_.emplace(chunk_id, chunk_ids_.size());
    chunk_ids_.push_back(chunk_id);
    texts_.push_back(text);
    matrix_.insert(matrix_.end(), unit_vector.begin(), unit_vector.end());
}

std::span<const float> VectorIndex::vector_at(std::size_t pos) const {
    return {matrix_.data() + pos * dim_, dim_};
}

std::optional<std::size_t> VectorIndex::find(const std::string& chunk_id) const {
    const auto it = id_to_pos_.find(chunk_id);
    if (it == id_to_pos_.end()) return std::nullopt;
    return it->second;
}

std::vector<ScoredCandidate> VectorIndex::top_k(const EmbeddingVector& query,
                                                std::size_t k) const {
    if (k < 1) throw ConfigError("top_k: k must be >= 1");
    if (query.dim() != dim_) {
        throw DomainError("top_k: query dimension " + std::to_string(query.dim()) +
                          " does not match index dim " + std::to_string(dim_));
    }
    if (size() == 0) return {};
    // Normalize in double, then narrow to the storage precision the rows use.
    const std::vector<float> unit_query = to_float32(normalize(query));

    std::vector<double> scores(size());
    kernel::score_rows(matrix_, dim_, unit_query, scores);
    const auto order = kernel::select_top_k(scores, k);

    std::vector<ScoredCandidate> result;
    result.reserve(order.size());
    for (const auto pos : order) {
        ScoredCandidate c;
        c.chunk_id = chunk_ids_[pos];
        c.bi_score = scores[pos];
        c.index_pos = pos;
        result.push_back(std::move(c));
    }
    return result;
}

VectorIndex build_index(const std::vector<Chunk>& chunks, const Embedder& embedder,
                        std::vector<std::string>* warnings) {
    if (chunks.empty()) throw ConfigError("build_index: chunk list is empty");

    std::vector<std::string> texts;
    texts.reserve(chunks.size());
    for (const auto& c : chunks) texts.push_back(c.text);

    std::vector<EmbeddingVector> vectors;
    try {
        vectors = embedder.embed_batch(texts);
    } catch (const TransportError& e) {
        throw TransportError(e.kind(), e.stage(),
                             std::string("index build aborted, 0/") +
                                 std::to_string(chunks.size()) + " chunks embedded: " + e.what(),
                             e.retryable());
    }
    if (vectors.size() != chunks.size()) {
        throw ContractError("embedder returned " + std::to_string(vectors.size()) +
                            " vectors for " + std::to_string(chunks.size()) + " chunks");
    }

    VectorIndex index(embedder.dim(), embedder.name());
    for (std::size_t i = 0; i < chunks.size(); ++i) {
        if (vectors[i].dim() != embedder.dim()) {
            throw ContractError("embedder produced dim " + std::to_string(vectors[i].dim()) +
                                ", declared dim " + std::to_string(embedder.dim()));
        }
        if (vectors[i].is_zero()) {
            if (warnings) {
                warnings->push_back("chunk " + chunks[i].chunk_id +
                                    " is unembeddable (zero vector), excluded from index");
            }
            continue;
        }
        index.add_entry(chunks[i].chunk_id, chunks[i].text, to_float32(normalize(vectors[i])));
    }
    return index;
}

// ---------------------------------------------------------------------------
// Persistence
// ---------------------------------------------------------------------------

namespace {

constexpr char kMagic[4] = {'R', 'K', 'I', 'X'};
constexpr std::uint32_t kFormatVersion = 1;

void put_u32(std::string& buf, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_u64(std::string& buf, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

class Reader {
public:
    Reader(const std::string& bytes, std::size_t limit) : bytes_(bytes), limit_(limit) {}

    std::uint32_t u32(const char* what) {
        need(4, what);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) {
            v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
        }
        pos_ += 4;
        return v;
    }

    std::uint64_t u64(const char* what) {
        need(8, what);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) {
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
        }
        pos_ += 8;
        return v;
    }

    std::string_view raw(std::size_t n, const char* what) {
        need(n, what);
        std::string_view v(bytes_.data() + pos_, n);
        pos_ += n;
        return v;
    }

    std::size_t pos() const { return pos_; }

private:
    void need(std::size_t n, const char* what) {
        if (pos_ + n > limit_) {
            throw IndexLoadError(IndexLoadError::Category::truncated,
                                 std::string("index file truncated while reading ") + what);
        }
    }

    const std::string& bytes_;
    std::size_t limit_;
    std::size_t pos_ = 0;
};

} // namespace

void save_index(const VectorIndex& index, const std::string& path) {
    std::string buf;
    buf.append(kMagic, sizeof(kMagic));
    put_u32(buf, kFormatVersion);
    put_u32(buf, static_cast<std::uint32_t>(index.dim()));
    put_u64(buf, index.size());
    put_u32(buf, static_cast<std::uint32_t>(index.embedder_name().size()));
    buf.append(index.embedder_name());

    for (std::size_t pos = 0; pos < index.size(); ++pos) {
        for (const float v : index.vector_at(pos)) {
            put_u32(buf, std::bit_cast<std::uint32_t>(v));
        }
    }

    ordered_json table = ordered_json::array();
    for (std::size_t pos = 0; pos < index.size(); ++pos) {
        table.push_back({{"chunk_id", index.chunk_id_at(pos)}, {"text", index.text_at(pos)}});
    }
    const std::string table_bytes = table.dump();
    put_u64(buf, table_bytes.size());
    buf.append(table_bytes);

    put_u64(buf, fnv1a64(buf));

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IngestError("cannot open index file for writing: " + path);
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw IngestError("failed writing index file: " + path);
}

VectorIndex load_index(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IngestError("cannot open index file: " + path);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    if (bytes.size() < sizeof(kMagic) || std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
        throw IndexLoadError(IndexLoadError::Category::bad_magic,
                             "not a ragkit index file (bad magic): " + path);
    }
    if (bytes.size() < 8) {
        throw IndexLoadError(IndexLoadError::Category::truncated, "index file truncated: " + path);
    }

    const std::size_t body_len = bytes.size() - 8;
    Reader checksum_reader(bytes, bytes.size());
    checksum_reader.raw(body_len, "body");
    const std::uint64_t stored_checksum = checksum_reader.u64("checksum");
    const std::uint64_t computed = fnv1a64(std::string_view(bytes.data(), body_len));

    Reader r(bytes, body_len);
    r.raw(sizeof(kMagic), "magic");
    const std::uint32_t version = r.u32("version");
    if (version != kFormatVersion) {
        throw IndexLoadError(IndexLoadError::Category::bad_version,
                             "unsupported index format version " + std::to_string(version));
    }
    const std::uint32_t dim = r.u32("dim");
    const std::uint64_t count = r.u64("count");
    if (dim != 0 && count > (body_len / 4) / dim) {
        throw IndexLoadError(IndexLoadError::Category::truncated,
                             "index file truncated: vector payload cannot fit");
    }
    const std::uint32_t name_len = r.u32("embedder name length");
    const std::string embedder_name(r.raw(name_len, "embedder name"));

    std::vector<float> matrix;
    matrix.reserve(static_cast<std::size_t>(count) * dim);
    for (std::uint64_t i = 0; i < count * dim; ++i) {
        matrix.push_back(std::bit_cast<float>(r.u32("vector payload")));
    }

    const std::uint64_t table_len = r.u64("table length");
    const std::string_view table_bytes = r.raw(table_len, "chunk table");

    if (stored_checksum != computed) {
        throw IndexLoadError(IndexLoadError::Category::checksum_mismatch,
                             "index checksum mismatch: " + path);
    }

    ordered_json table;
    try {
        table = ordered_json::parse(table_bytes);
    } catch (const ordered_json::parse_error& e) {
        throw IndexLoadError(IndexLoadError::Category::malformed_table,
                             std::string("malformed chunk table: ") + e.what());
    }
    if (!table.is_array() || table.size() != count) {
        throw IndexLoadError(IndexLoadError::Category::malformed_table,
                             "chunk table does not match entry count");
    }

    VectorIndex index(dim, embedder_name);
    for (std::size_t pos = 0; pos < count; ++pos) {
        const auto& row = table[pos];
        index.add_entry(row.at("chunk_id").get<std::string>(), row.at("text").get<std::string>(),
                        std::span<const float>(matrix.data() + pos * dim, dim));
    }
    return index;
}

} // namespace ragkit
