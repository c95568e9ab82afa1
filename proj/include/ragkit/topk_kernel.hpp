#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace ragkit::kernel {

// Exact scoring kernels over a row-major matrix of unit vectors
// (rows x dim floats). Each output score is the dot product of one row with
// the query, accumulated in double strictly in index order and clamped to
// [-1, 1]. Accumulation order is part of the contract: the serial and
// parallel kernels produce bit-identical scores, because parallelism is only
// across rows.

// Serial reference implementation (kept for testing and benchmarking).
void score_rows_serial(std::span<const float> matrix, std::size_t dim,
                       std::span<const float> query, std::span<double> out_scores);

// OpenMP-parallel row scan. Falls back to the serial loop when built
// without OpenMP.
void score_rows_parallel(std::span<const float> matrix, std::size_t dim,
                         std::span<const float> query, std::span<double> out_scores);

// Dispatch: parallel scan for large row counts, serial otherwise. Output is
// identical either way.
void score_rows(std::span<const float> matrix, std::size_t dim,
                std::span<const float> query, std::span<double> out_scores);

inline constexpr std::size_t parallel_row_threshold = 2048;

// Indices of the k best scores, ordered by descending score with ties broken
// by ascending row index. Returns all rows (sorted) when k >= row count.
std::vector<std::uint32_t> select_top_k(std::span<const double> scores, std::size_t k);

} // namespace ragkit::kernel
