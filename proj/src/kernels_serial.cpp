#include "kernels_detail.hpp"

namespace lugeon::kernels::serial {

std::vector<std::size_t> assign_bmu(const Matrix& prototypes, const Matrix& data) {
    std::vector<std::size_t> out(data.rows());
    for (std::size_t i = 0; i < data.rows(); ++i) out[i] = detail::nearest(prototypes, data.row(i));
    return out;
}

Matrix som_epoch(const Matrix& prototypes, const Matrix& data, const Matrix& neighborhood) {
    const auto bmu = assign_bmu(prototypes, data);
    const auto hits = detail::hit_sums(data, bmu, prototypes.rows());
    Matrix out(prototypes.rows(), prototypes.cols());
    for (std::size_t k = 0; k < prototypes.rows(); ++k) detail::update_neuron(k, prototypes, hits, neighborhood, out);
    return out;
}

std::vector<AttrMask> discern_cells(const CodeMatrix& table, std::span<const std::size_t> columns) {
    const std::size_t n = table.rows;
    std::vector<AttrMask> cells(n * (n - (n ? 1 : 0)) / 2);
    for (std::size_t i = 1; i < n; ++i) detail::discern_row(table, columns, i, cells.data() + cell_index(i, 0));
    return cells;
}

Matrix normalized_firing(const Matrix& centers, const Matrix& sigmas, const Matrix& inputs) {
    Matrix out(inputs.rows(), centers.rows());
    for (std::size_t i = 0; i < inputs.rows(); ++i) detail::firing_row(centers, sigmas, inputs.row(i), out.row(i));
    return out;
}

void fill(std::span<double> out, const std::function<double(std::size_t)>& f) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(i);
}

void for_each_index(std::size_t n, const std::function<void(std::size_t)>& f) {
    for (std::size_t i = 0; i < n; ++i) f(i);
}

}  // namespace lugeon::kernels::serial

namespace lugeon::kernels {

std::vector<std::size_t> assign_bmu(const Matrix& prototypes, const Matrix& data, Exec exec) {
    return exec == Exec::parallel ? omp::assign_bmu(prototypes, data) : serial::assign_bmu(prototypes, data);
}

Matrix som_epoch(const Matrix& prototypes, const Matrix& data, const Matrix& neighborhood, Exec exec) {
    return exec == Exec::parallel ? omp::som_epoch(prototypes, data, neighborhood)
                                  : serial::som_epoch(prototypes, data, neighborhood);
}

std::vector<AttrMask> discern_cells(const CodeMatrix& table, std::span<const std::size_t> columns, Exec exec) {
    return exec == Exec::parallel ? omp::discern_cells(table, columns) : serial::discern_cells(table, columns);
}

Matrix normalized_firing(const Matrix& centers, const Matrix& sigmas, const Matrix& inputs, Exec exec) {
    return exec == Exec::parallel ? omp::normalized_firing(centers, sigmas, inputs)
                                  : serial::normalized_firing(centers, sigmas, inputs);
}

void fill(std::span<double> out, const std::function<double(std::size_t)>& f, Exec exec) {
    if (exec == Exec::parallel)
        omp::fill(out, f);
    else
        serial::fill(out, f);
}

void for_each_index(std::size_t n, const std::function<void(std::size_t)>& f, Exec exec) {
    if (exec == Exec::parallel)
        omp::for_each_index(n, f);
    else
        serial::for_each_index(n, f);
}

}  // namespace lugeon::kernels
