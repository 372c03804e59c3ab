#include "lugeon/som.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <stdexcept>

namespace lugeon::som {

Topology Topology::grid(std::size_t rows, std::size_t cols) {
    if (rows < 1 || cols < 1) throw std::invalid_argument("som: grid dimensions must be >= 1");
    return {Shape::grid, rows, cols};
}

Topology Topology::line(std::size_t k) {
    if (k < 1) throw std::invalid_argument("som: line length must be >= 1");
    return {Shape::line, 1, k};
}

double Topology::distance_sq(std::size_t a, std::size_t b) const noexcept {
    const double dr = static_cast<double>(a / cols) - static_cast<double>(b / cols);
    const double dc = static_cast<double>(a % cols) - static_cast<double>(b % cols);
    return dr * dr + dc * dc;
}

Matrix SomModel::denormalized() const {
    Matrix out(prototypes.rows(), prototypes.cols());
    for (std::size_t k = 0; k < prototypes.rows(); ++k)
        for (std::size_t j = 0; j < prototypes.cols(); ++j) out(k, j) = normalization.inverse(j, prototypes(k, j));
    return out;
}

void SomModel::validate() const {
    if (prototypes.rows() != topology.neurons())
        throw std::invalid_argument("som: prototype count does not match topology");
    if (normalization.dims() != prototypes.cols())
        throw std::invalid_argument("som: normalization width does not match prototype dimension");
    for (double v : prototypes.values())
        if (!std::isfinite(v)) throw std::invalid_argument("som: non-finite prototype component");
}

double sigma_at(double sigma0, int epoch, int epochs) noexcept {
    if (epochs <= 1) return sigma0;
    const double t = static_cast<double>(epoch) / static_cast<double>(epochs - 1);
    return sigma0 + (0.5 - sigma0) * t;
}

SomModel train_som(const Matrix& data, const Topology& topology, int epochs, double sigma0, std::uint64_t seed,
                   kernels::Exec exec) {
    if (data.empty() || data.cols() == 0) throw std::invalid_argument("train_som: empty data");
    if (epochs < 1) throw std::invalid_argument("train_som: epochs must be >= 1");
    if (!(sigma0 > 0.0)) throw std::invalid_argument("train_som: sigma0 must be positive");
    for (double v : data.values())
        if (!std::isfinite(v)) throw std::invalid_argument("train_som: non-finite input value");

    SomModel model;
    model.topology = topology;
    model.normalization = MinMax::fit(data);
    const Matrix norm = model.normalization.forward(data);

    const std::size_t k = topology.neurons();
    model.prototypes = Matrix(k, data.cols());
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, data.rows() - 1);
    for (std::size_t j = 0; j < k; ++j) {
        const auto src = norm.row(pick(rng));
        std::copy(src.begin(), src.end(), model.prototypes.row(j).begin());
    }

    Matrix neighborhood(k, k);
    for (int e = 0; e < epochs; ++e) {
        const double s = sigma_at(sigma0, e, epochs);
        for (std::size_t a = 0; a < k; ++a)
            for (std::size_t b = 0; b < k; ++b) neighborhood(a, b) = std::exp(-topology.distance_sq(a, b) / (2 * s * s));
        model.prototypes = kernels::som_epoch(model.prototypes, norm, neighborhood, exec);
    }
    model.epochs_trained = epochs;
    return model;
}

std::size_t best_matching_unit(const SomModel& model, std::span<const double> sample) {
    if (sample.size() != model.dims())
        throw std::invalid_argument("best_matching_unit: sample has " + std::to_string(sample.size()) +
                                    " components, model expects " + std::to_string(model.dims()));
    Matrix one(1, sample.size(), model.normalization.forward(sample));
    return kernels::serial::assign_bmu(model.prototypes, one).front();
}

std::vector<std::size_t> best_matching_units(const SomModel& model, const Matrix& data, kernels::Exec exec) {
    if (data.cols() != model.dims()) throw std::invalid_argument("best_matching_units: dimension mismatch");
    return kernels::assign_bmu(model.prototypes, model.normalization.forward(data), exec);
}

Matrix granulate(const SomModel& model, const Matrix& data) {
    if (model.epochs_trained < 1) throw std::logic_error("granulate: model is untrained");
    const auto bmu = best_matching_units(model, data);
    std::vector<bool> hit(model.topology.neurons(), false);
    for (auto b : bmu) hit[b] = true;
    const Matrix protos = model.denormalized();
    Matrix out(0, data.cols());
    for (std::size_t k = 0; k < hit.size(); ++k)
        if (hit[k]) out.append_row(protos.row(k));
    return out;
}

DecisionTable granulate(const SomModel& model, const DecisionTable& data) {
    return DecisionTable(data.attributes(), granulate(model, data.values()));
}

OrdinalScale ordinal_scale(const SomModel& model) {
    if (model.topology.shape != Topology::Shape::line || model.dims() != 1)
        throw std::invalid_argument("discretize_1d: model must be a 1-D line map over one attribute");
    if (model.epochs_trained < 1) throw std::logic_error("discretize_1d: model is untrained");
    OrdinalScale scale;
    const Matrix protos = model.denormalized();
    for (std::size_t k = 0; k < protos.rows(); ++k) scale.levels.push_back(protos(k, 0));
    std::sort(scale.levels.begin(), scale.levels.end());
    return scale;
}

std::vector<int> discretize_1d(const SomModel& model, std::span<const double> values) {
    const auto scale = ordinal_scale(model);
    std::vector<int> out;
    out.reserve(values.size());
    for (double v : values) out.push_back(scale.categorize(v));
    return out;
}

OrdinalScale fit_ordinal_scale(std::span<const double> values, std::size_t k, std::uint64_t seed, int epochs) {
    Matrix data(values.size(), 1, std::vector<double>(values.begin(), values.end()));
    const double sigma0 = std::max(1.0, static_cast<double>(k) / 2.0);
    return ordinal_scale(train_som(data, Topology::line(k), epochs, sigma0, seed, kernels::Exec::serial));
}

void write_prototypes(const SomModel& model, std::span<const std::string> names, std::ostream& out) {
    out << "neuron,row,col";
    for (const auto& n : names) out << ',' << n;
    out << '\n';
    const Matrix protos = model.denormalized();
    for (std::size_t k = 0; k < protos.rows(); ++k) {
        out << k << ',' << k / model.topology.cols << ',' << k % model.topology.cols;
        for (double v : protos.row(k)) out << ',' << v;
        out << '\n';
    }
}

}  // namespace lugeon::som
