#pragma once

// Data-parallel inner loops. Every kernel has a serial reference in
// `kernels::serial` and an OpenMP version in `kernels::omp`; both produce
// bit-identical results (no parallel floating-point reductions).

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "lugeon/matrix.hpp"

namespace lugeon::kernels {

enum class Exec { serial, parallel };

/// Attribute set over at most 64 columns.
using AttrMask = std::uint64_t;

/// Symbolic codes, row-major n x m.
struct CodeMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<int> codes;

    int operator()(std::size_t i, std::size_t j) const { return codes[i * cols + j]; }
};

/// Index of the nearest prototype (squared Euclidean) per data row; ties to the lowest index.
using BmuFn = std::vector<std::size_t>(const Matrix& prototypes, const Matrix& data);

/// One batch-SOM epoch. `neighborhood` is K x K with h(j, c). Neurons whose
/// neighborhood weight sums to zero keep their prototype.
using SomEpochFn = Matrix(const Matrix& prototypes, const Matrix& data, const Matrix& neighborhood);

/// Strictly lower-triangular discernibility cells, row-major over i > j:
/// cell(i, j) at i*(i-1)/2 + j. Bit b set iff column `columns[b]` differs.
using DiscernFn = std::vector<AttrMask>(const CodeMatrix& table, std::span<const std::size_t> columns);

/// Normalized TSK firing strengths, n x R, computed in log domain.
using FiringFn = Matrix(const Matrix& centers, const Matrix& sigmas, const Matrix& inputs);

/// out[i] = f(i) for every i.
using FillFn = void(std::span<double> out, const std::function<double(std::size_t)>& f);

/// Calls f(i) for i in [0, n). f must only write state owned by index i.
using ForEachFn = void(std::size_t n, const std::function<void(std::size_t)>& f);

namespace serial {
BmuFn assign_bmu;
SomEpochFn som_epoch;
DiscernFn discern_cells;
FiringFn normalized_firing;
FillFn fill;
ForEachFn for_each_index;
}  // namespace serial

namespace omp {
BmuFn assign_bmu;
SomEpochFn som_epoch;
DiscernFn discern_cells;
FiringFn normalized_firing;
FillFn fill;
ForEachFn for_each_index;
}  // namespace omp

std::vector<std::size_t> assign_bmu(const Matrix& prototypes, const Matrix& data, Exec exec);
Matrix som_epoch(const Matrix& prototypes, const Matrix& data, const Matrix& neighborhood, Exec exec);
std::vector<AttrMask> discern_cells(const CodeMatrix& table, std::span<const std::size_t> columns, Exec exec);
Matrix normalized_firing(const Matrix& centers, const Matrix& sigmas, const Matrix& inputs, Exec exec);
void fill(std::span<double> out, const std::function<double(std::size_t)>& f, Exec exec);
void for_each_index(std::size_t n, const std::function<void(std::size_t)>& f, Exec exec);

inline std::size_t cell_index(std::size_t i, std::size_t j) noexcept { return i * (i - 1) / 2 + j; }

}  // namespace lugeon::kernels
