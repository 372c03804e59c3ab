#include <cstdint>

#include "kernels_detail.hpp"

namespace lugeon::kernels::omp {

std::vector<std::size_t> assign_bmu(const Matrix& prototypes, const Matrix& data) {
    std::vector<std::size_t> out(data.rows());
    const auto n = static_cast<std::int64_t>(data.rows());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) out[i] = detail::nearest(prototypes, data.row(i));
    return out;
}

Matrix som_epoch(const Matrix& prototypes, const Matrix& data, const Matrix& neighborhood) {
    const auto bmu = assign_bmu(prototypes, data);
    // ordered reduction: hit sums accumulate in sample order
    const auto hits = detail::hit_sums(data, bmu, prototypes.rows());
    Matrix out(prototypes.rows(), prototypes.cols());
    const auto k = static_cast<std::int64_t>(prototypes.rows());
#pragma omp parallel for schedule(static)
    for (std::int64_t j = 0; j < k; ++j) detail::update_neuron(j, prototypes, hits, neighborhood, out);
    return out;
}

std::vector<AttrMask> discern_cells(const CodeMatrix& table, std::span<const std::size_t> columns) {
    const std::size_t n = table.rows;
    std::vector<AttrMask> cells(n * (n - (n ? 1 : 0)) / 2);
    const auto rows = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic, 16)
    for (std::int64_t i = 1; i < rows; ++i)
        detail::discern_row(table, columns, i, cells.data() + cell_index(i, 0));
    return cells;
}

Matrix normalized_firing(const Matrix& centers, const Matrix& sigmas, const Matrix& inputs) {
    Matrix out(inputs.rows(), centers.rows());
    const auto n = static_cast<std::int64_t>(inputs.rows());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) detail::firing_row(centers, sigmas, inputs.row(i), out.row(i));
    return out;
}

void fill(std::span<double> out, const std::function<double(std::size_t)>& f) {
    const auto n = static_cast<std::int64_t>(out.size());
#pragma omp parallel for schedule(dynamic, 64)
    for (std::int64_t i = 0; i < n; ++i) out[i] = f(static_cast<std::size_t>(i));
}

void for_each_index(std::size_t n, const std::function<void(std::size_t)>& f) {
    const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic, 8)
    for (std::int64_t i = 0; i < count; ++i) f(static_cast<std::size_t>(i));
}

}  // namespace lugeon::kernels::omp
