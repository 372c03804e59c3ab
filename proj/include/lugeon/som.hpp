#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "lugeon/kernels.hpp"
#include "lugeon/matrix.hpp"
#include "lugeon/tabular.hpp"

namespace lugeon::som {

struct Topology {
    enum class Shape { grid, line };

    Shape shape = Shape::line;
    std::size_t rows = 1;
    std::size_t cols = 1;

    static Topology grid(std::size_t rows, std::size_t cols);
    static Topology line(std::size_t k);

    std::size_t neurons() const noexcept { return rows * cols; }
    /// Squared lattice distance between neurons a and b (row-major numbering).
    double distance_sq(std::size_t a, std::size_t b) const noexcept;

    friend bool operator==(const Topology&, const Topology&) = default;
};

/// Trained map. Prototypes live in the min-max normalized input space.
struct SomModel {
    Topology topology;
    Matrix prototypes;
    MinMax normalization;
    int epochs_trained = 0;

    std::size_t dims() const noexcept { return prototypes.cols(); }
    /// Prototypes mapped back to input units.
    Matrix denormalized() const;
    void validate() const;
};

/// Batch SOM: Euclidean BMU on normalized inputs, Gaussian neighborhood,
/// sigma decaying linearly from sigma0 to 0.5. Seed picks the initial
/// prototypes among the data rows.
SomModel train_som(const Matrix& data, const Topology& topology, int epochs, double sigma0, std::uint64_t seed,
                   kernels::Exec exec = kernels::Exec::parallel);

/// Neighborhood width used at `epoch` (0-based) of `epochs`.
double sigma_at(double sigma0, int epoch, int epochs) noexcept;

/// BMU of a sample given in input units. Ties go to the lowest index.
std::size_t best_matching_unit(const SomModel& model, std::span<const double> sample);
std::vector<std::size_t> best_matching_units(const SomModel& model, const Matrix& data,
                                             kernels::Exec exec = kernels::Exec::parallel);

/// Crisp granules: prototypes (input units) of every neuron that wins at
/// least one row of `data`, in neuron order.
Matrix granulate(const SomModel& model, const Matrix& data);
DecisionTable granulate(const SomModel& model, const DecisionTable& data);

/// Sorted prototype levels of a trained 1-D line map.
OrdinalScale ordinal_scale(const SomModel& model);
std::vector<int> discretize_1d(const SomModel& model, std::span<const double> values);

/// Trains a line(k) map on one attribute and returns its ordinal scale.
OrdinalScale fit_ordinal_scale(std::span<const double> values, std::size_t k, std::uint64_t seed, int epochs = 100);

/// One row per neuron: `neuron,row,col,<names...>`, prototypes in input units.
void write_prototypes(const SomModel& model, std::span<const std::string> names, std::ostream& out);

}  // namespace lugeon::som
