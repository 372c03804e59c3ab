// Serial reference kernels against their OpenMP counterparts. Run with
// OMP_NUM_THREADS set to compare thread counts.

#include <cmath>
#include <random>

#include <benchmark/benchmark.h>

#include "lugeon/kernels.hpp"

using namespace lugeon;
using kernels::Exec;

namespace {

Matrix uniform(std::size_t rows, std::size_t cols, std::uint64_t seed, double lo = 0.0, double hi = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) m(i, j) = u(rng);
    return m;
}

Matrix grid_neighborhood(std::size_t side, double sigma) {
    const std::size_t k = side * side;
    Matrix h(k, k);
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < k; ++b) {
            const double dr = double(a / side) - double(b / side), dc = double(a % side) - double(b % side);
            h(a, b) = std::exp(-(dr * dr + dc * dc) / (2 * sigma * sigma));
        }
    return h;
}

Exec exec_of(const benchmark::State& state) { return state.range(0) ? Exec::parallel : Exec::serial; }

void BM_AssignBmu(benchmark::State& state) {
    const auto data = uniform(static_cast<std::size_t>(state.range(1)), 7, 1);
    const auto protos = uniform(100, 7, 2);
    for (auto _ : state) benchmark::DoNotOptimize(kernels::assign_bmu(protos, data, exec_of(state)));
    state.SetItemsProcessed(state.iterations() * state.range(1));
}

void BM_SomEpoch(benchmark::State& state) {
    const auto data = uniform(static_cast<std::size_t>(state.range(1)), 7, 3);
    const auto protos = uniform(100, 7, 4);
    const auto h = grid_neighborhood(10, 2.0);
    for (auto _ : state) benchmark::DoNotOptimize(kernels::som_epoch(protos, data, h, exec_of(state)));
    state.SetItemsProcessed(state.iterations() * state.range(1));
}

void BM_DiscernCells(benchmark::State& state) {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> cat(1, 5);
    kernels::CodeMatrix table;
    table.rows = static_cast<std::size_t>(state.range(1));
    table.cols = 7;
    for (std::size_t i = 0; i < table.rows * table.cols; ++i) table.codes.push_back(cat(rng));
    const std::vector<std::size_t> columns{0, 1, 2, 3, 4, 5};
    for (auto _ : state) benchmark::DoNotOptimize(kernels::discern_cells(table, columns, exec_of(state)));
    state.SetItemsProcessed(state.iterations() * state.range(1) * (state.range(1) - 1) / 2);
}

void BM_NormalizedFiring(benchmark::State& state) {
    const auto inputs = uniform(static_cast<std::size_t>(state.range(1)), 3, 6);
    const auto centers = uniform(8, 3, 7);
    const auto sigmas = uniform(8, 3, 8, 0.05, 0.4);
    for (auto _ : state) benchmark::DoNotOptimize(kernels::normalized_firing(centers, sigmas, inputs, exec_of(state)));
    state.SetItemsProcessed(state.iterations() * state.range(1));
}

}  // namespace

BENCHMARK(BM_AssignBmu)->ArgNames({"omp", "n"})->ArgsProduct({{0, 1}, {1000, 20000}});
BENCHMARK(BM_SomEpoch)->ArgNames({"omp", "n"})->ArgsProduct({{0, 1}, {1000, 20000}});
BENCHMARK(BM_DiscernCells)->ArgNames({"omp", "n"})->ArgsProduct({{0, 1}, {500, 2000}});
BENCHMARK(BM_NormalizedFiring)->ArgNames({"omp", "n"})->ArgsProduct({{0, 1}, {1000, 50000}});

BENCHMARK_MAIN();
