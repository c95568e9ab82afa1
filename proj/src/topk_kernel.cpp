#include "ragkit/topk_kernel.hpp"

#include <algorithm>
#include <numeric>

namespace ragkit::kernel {

namespace {

inline double row_dot(std::span<const float> matrix, std::size_t dim,
                      std::span<const float> query, std::size_t row) {
    const float* base = matrix.data() + row * dim;
    double acc = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
        acc += static_cast<double>(base[i]) * static_cast<double>(query[i]);
    }
    return std::clamp(acc, -1.0, 1.0);
}

} // namespace

void score_rows_serial(std::span<const float> matrix, std::size_t dim,
                       std::span<const float> query, std::span<double> out_scores) {
    const std::size_t rows = out_scores.size();
    for (std::size_t r = 0; r < rows; ++r) {
        out_scores[r] = row_dot(matrix, dim, query, r);
    }
}

void score_rows_parallel(std::span<const float> matrix, std::size_t dim,
                         std::span<const float> query, std::span<double> out_scores) {
    const std::int64_t rows = static_cast<std::int64_t>(out_scores.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t r = 0; r < rows; ++r) {
        out_scores[static_cast<std::size_t>(r)] =
            row_dot(matrix, dim, query, static_cast<std::size_t>(r));
    }
}

void score_rows(std::span<const float> matrix, std::size_t dim,
                std::span<const float> query, std::span<double> out_scores) {
    if (out_scores.size() >= parallel_row_threshold) {
        score_rows_parallel(matrix, dim, query, out_scores);
    } else {
        score_rows_serial(matrix, dim, query, out_scores);
    }
}

std::vector<std::uint32_t> select_top_k(std::span<const double> scores, std::size_t k) {
    std::vector<std::uint32_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0u);
    const auto better = [&scores](std::uint32_t a, std::uint32_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return a < b;
    };
    const std::size_t take = std::min(k, order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take),
                      order.end(), better);
    order.resize(take);
    return order;
}

} // namespace ragkit::kernel
