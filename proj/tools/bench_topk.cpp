// Benchmark of the exact top-k scan: serial reference vs OpenMP-parallel
// kernel over a synthetic unit-vector matrix.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <random>
#include <vector>

#include <CLI11.hpp>

#include "ragkit/topk_kernel.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

std::vector<float> random_unit_rows(std::size_t rows, std::size_t dim, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<float> matrix(rows * dim);
    for (std::size_t r = 0; r < rows; ++r) {
        double norm_sq = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
            const double x = gauss(rng);
            matrix[r * dim + i] = static_cast<float>(x);
            norm_sq += x * x;
        }
        const double norm = std::sqrt(norm_sq);
        for (std::size_t i = 0; i < dim; ++i) {
            matrix[r * dim + i] = static_cast<float>(matrix[r * dim + i] / norm);
        }
    }
    return matrix;
}

template <typename Kernel>
double time_ms(Kernel&& kernel, int repeat) {
    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < repeat; ++i) kernel();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count() / repeat;
}

} // namespace

int main(int argc, char** argv) {
    std::size_t rows = 200000;
    std::size_t dim = 384;
    std::size_t k = 10;
    int repeat = 5;
    std::uint64_t seed = 1;

    CLI::App app{"top-k scan benchmark: serial reference vs parallel kernel"};
    app.add_option("--rows", rows, "number of index entries");
    app.add_option("--dim", dim, "vector dimension");
    app.add_option("--k", k, "top-k to select");
    app.add_option("--repeat", repeat, "timed repetitions");
    app.add_option("--seed", seed, "matrix seed");
    CLI11_PARSE(app, argc, argv);

    const auto matrix = random_unit_rows(rows, dim, seed);
    const auto query = random_unit_rows(1, dim, seed + 1);
    std::vector<double> scores_serial(rows), scores_parallel(rows);

    const double serial_ms = time_ms(
        [&] {
            ragkit::kernel::score_rows_serial(matrix, dim, query, scores_serial);
            ragkit::kernel::select_top_k(scores_serial, k);
        },
        repeat);
    const double parallel_ms = time_ms(
        [&] {
            ragkit::kernel::score_rows_parallel(matrix, dim, query, scores_parallel);
            ragkit::kernel::select_top_k(scores_parallel, k);
        },
        repeat);

    bool identical = true;
    for (std::size_t i = 0; i < rows; ++i) {
        if (scores_serial[i] != scores_parallel[i]) {
            identical = false;
            break;
        }
    }

    int threads = 1;
#ifdef _OPENMP
#pragma omp parallel
#pragma omp master
    threads = omp_get_num_threads();
#endif

    std::printf("rows=%zu dim=%zu k=%zu repeat=%d threads=%d\n", rows, dim, k, repeat, threads);
    std::printf("%-18s %10.3f ms\n", "serial reference", serial_ms);
    std::printf("%-18s %10.3f ms\n", "parallel kernel", parallel_ms);
    std::printf("%-18s %10.2fx\n", "speedup", serial_ms / parallel_ms);
    std::printf("scores bit-identical: %s\n", identical ? "yes" : "NO");
    return identical ? 0 : 1;
}
