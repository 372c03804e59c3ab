#include "lugeon/geo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include "lugeon/random.hpp"

namespace lugeon::geo {

namespace {

double nearest_code(double level) {
    const auto codes = twr_codes();
    double best = codes.front();
    for (double c : codes)
        if (std::abs(c - level) < std::abs(best - level)) best = c;
    return best;
}

}  // namespace

void Bounds::validate() const {
    for (std::size_t a = 0; a < 3; ++a)
        if (!(max[a] > min[a]) || !std::isfinite(min[a]) || !std::isfinite(max[a]))
            throw std::invalid_argument("bounds: axis " + std::string(1, "xyz"[a]) + " is degenerate");
}

void SiteSpec::validate() const {
    bounds.validate();
    if (n_boreholes < 1 || samples_per_borehole < 1) throw std::invalid_argument("site: counts must be >= 1");
    if (!(noise_sigma >= 0.0)) throw std::invalid_argument("site: noise_sigma must be >= 0");
    if (!(interval > 0.0)) throw std::invalid_argument("site: interval must be positive");
    if (const auto* l = std::get_if<LayeredTruth>(&ground_truth)) {
        if (l->means.size() != l->boundaries.size() + 1)
            throw std::invalid_argument("site: layered truth needs one more mean than boundaries");
        if (!std::is_sorted(l->boundaries.begin(), l->boundaries.end()))
            throw std::invalid_argument("site: layer boundaries must ascend");
    } else {
        const auto& f = std::get<SmoothTruth>(ground_truth).field;
        if (f != "sine_decay" && f != "linear_z") throw std::invalid_argument("site: unknown smooth field '" + f + "'");
    }
}

GroundTruth::GroundTruth(const SiteSpec& spec) : bounds_(spec.bounds), truth_(spec.ground_truth) {}

double GroundTruth::operator()(double x, double, double z) const {
    if (const auto* l = std::get_if<LayeredTruth>(&truth_)) {
        const auto layer = std::upper_bound(l->boundaries.begin(), l->boundaries.end(), z) - l->boundaries.begin();
        return l->means[static_cast<std::size_t>(layer)];
    }
    const double lz = bounds_.extent(2);
    const double dz = z - bounds_.min[2];
    if (std::get<SmoothTruth>(truth_).field == "linear_z") return 10.0 + 80.0 * dz / lz;
    const double phase = 2.0 * std::numbers::pi * (x - bounds_.min[0]) / bounds_.extent(0);
    return 50.0 + 40.0 * std::sin(phase) * std::exp(-dz / lz);
}

Zone zone_of(const SiteSpec& spec, double x) {
    return x - spec.bounds.min[0] > spec.anomaly_x_fraction * spec.bounds.extent(0) ? Zone::anomalous
                                                                                     : Zone::theoretic;
}

Site generate_synthetic_site(const SiteSpec& spec) {
    spec.validate();
    GroundTruth truth(spec);
    const auto& b = spec.bounds;

    std::mt19937_64 geometry(derive_seed(spec.seed, "synth.geometry"));
    std::mt19937_64 noise(derive_seed(spec.seed, "synth.noise"));
    std::mt19937_64 quality(derive_seed(spec.seed, "synth.rqd"));
    std::mt19937_64 weathering(derive_seed(spec.seed, "synth.twr"));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    const double step = std::min(spec.interval, b.extent(2) / static_cast<double>(spec.samples_per_borehole));
    Matrix rows(0, 7);
    for (std::size_t h = 0; h < spec.n_boreholes; ++h) {
        const double x = b.min[0] + unit(geometry) * b.extent(0);
        const double y = b.min[1] + unit(geometry) * b.extent(1);
        for (std::size_t s = 0; s < spec.samples_per_borehole; ++s) {
            const double jitter = (unit(geometry) - 0.5) * 0.4 * step;
            const double z = b.max[2] - (static_cast<double>(s) + 0.5) * step + jitter;
            const double length = 2.0 + 4.0 * unit(geometry);

            double lu = truth(x, y, z);
            if (spec.noise_sigma > 0.0) lu += spec.noise_sigma * gauss(noise);
            lu = clamp_lugeon(std::max(0.0, lu));

            double rqd = zone_of(spec, x) == Zone::theoretic ? 95.0 - 0.8 * lu + 5.0 * gauss(quality)
                                                             : 25.0 + 0.6 * lu + 5.0 * gauss(quality);
            rqd = std::clamp(rqd, 0.0, 100.0);

            const double depth = (b.max[2] - z) / b.extent(2);
            const double twr = nearest_code(4.0 * (1.0 - depth) + 0.6 * gauss(weathering));

            const double row[] = {x, y, z, length, rqd, twr, lu};
            rows.append_row(row);
        }
    }
    if (spec.max_rows > 0 && rows.rows() > spec.max_rows) {
        std::vector<double> kept(rows.values().begin(),
                                 rows.values().begin() + static_cast<std::ptrdiff_t>(spec.max_rows * rows.cols()));
        rows = Matrix(spec.max_rows, 7, std::move(kept));
    }
    return {DecisionTable(site_schema(), std::move(rows)), truth};
}

double GridSpec::spacing(std::size_t axis) const {
    return bounds.extent(axis) / static_cast<double>(resolution.at(axis) - 1);
}

std::array<double, 3> GridSpec::node(std::size_t index) const {
    const std::size_t i = index % resolution[0];
    const std::size_t j = (index / resolution[0]) % resolution[1];
    const std::size_t k = index / (resolution[0] * resolution[1]);
    return {bounds.min[0] + static_cast<double>(i) * spacing(0), bounds.min[1] + static_cast<double>(j) * spacing(1),
            bounds.min[2] + static_cast<double>(k) * spacing(2)};
}

void GridSpec::validate(std::size_t min_per_axis) const {
    bounds.validate();
    for (std::size_t a = 0; a < 3; ++a)
        if (resolution[a] < min_per_axis)
            throw std::invalid_argument("grid: resolution must be >= " + std::to_string(min_per_axis) + " per axis");
}

ScalarField evaluate_grid(const Predictor& predictor, const GridSpec& grid, FieldKind kind, kernels::Exec exec) {
    grid.validate();
    ScalarField field{grid, std::vector<double>(grid.nodes()), kind};
    kernels::fill(
        field.values,
        [&](std::size_t n) {
            const auto p = grid.node(n);
            return predictor(p[0], p[1], p[2]);
        },
        exec);
    return field;
}

ScalarField evaluate_grid(const tsk::TskModel& model, const GridSpec& grid, kernels::Exec exec) {
    if (model.input_dim() != 3)
        throw std::invalid_argument("evaluate_grid: model takes " + std::to_string(model.input_dim()) +
                                    " inputs, a spatial grid needs 3");
    grid.validate();
    Matrix nodes(grid.nodes(), 3);
    for (std::size_t n = 0; n < grid.nodes(); ++n) {
        const auto p = grid.node(n);
        std::copy(p.begin(), p.end(), nodes.row(n).begin());
    }
    return {grid, tsk::infer(model, nodes, exec), FieldKind::continuous};
}

ScalarField evaluate_grid(const rough::RoughModel& model, const GridSpec& grid, kernels::Exec exec) {
    if (model.inputs() != 3)
        throw std::invalid_argument("evaluate_grid: rule model takes " + std::to_string(model.inputs()) +
                                    " inputs, a spatial grid needs 3");
    return evaluate_grid(
        [&model](double x, double y, double z) {
            const double in[] = {x, y, z};
            return static_cast<double>(model.predict(in));
        },
        grid, FieldKind::categorical, exec);
}

ScalarField variation_field(const ScalarField& field) {
    if (field.kind == FieldKind::categorical)
        throw std::invalid_argument("variation_field: categorical fields (with unknown codes) have no gradient");
    field.grid.validate(3);
    const auto& res = field.grid.resolution;
    ScalarField out{field.grid, std::vector<double>(field.values.size()), FieldKind::continuous};

    auto derivative = [&](std::size_t axis, std::array<std::size_t, 3> at) {
        const double h = field.grid.spacing(axis);
        const std::size_t n = res[axis];
        auto lo = at, hi = at;
        double span = 2.0 * h;
        if (at[axis] == 0) {
            hi[axis] = 1;
            span = h;
        } else if (at[axis] == n - 1) {
            lo[axis] = n - 2;
            span = h;
        } else {
            lo[axis] -= 1;
            hi[axis] += 1;
        }
        return (field.at(hi[0], hi[1], hi[2]) - field.at(lo[0], lo[1], lo[2])) / span;
    };

    for (std::size_t k = 0; k < res[2]; ++k)
        for (std::size_t j = 0; j < res[1]; ++j)
            for (std::size_t i = 0; i < res[0]; ++i) {
                double sum = 0.0;
                for (std::size_t a = 0; a < 3; ++a) {
                    const double g = derivative(a, {i, j, k});
                    sum += g * g;
                }
                out.values[(k * res[1] + j) * res[0] + i] = std::sqrt(sum);
            }
    return out;
}

void write_field(const ScalarField& field, std::ostream& out) {
    out << "x,y,z,value\n";
    char line[128];
    for (std::size_t n = 0; n < field.values.size(); ++n) {
        const auto p = field.grid.node(n);
        std::snprintf(line, sizeof line, "%.6g,%.6g,%.6g,%.6g\n", p[0], p[1], p[2], field.values[n]);
        out << line;
    }
}

void export_field(const ScalarField& field, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    write_field(field, out);
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

ScalarField read_field(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("x,y,z,value", 0) != 0) throw ParseError("field CSV: bad header");
    std::vector<std::array<double, 4>> rows;
    std::size_t row_no = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        ++row_no;
        std::array<double, 4> r{};
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &r[0], &r[1], &r[2], &r[3]) != 4)
            throw ParseError("field CSV: malformed row " + std::to_string(row_no), row_no);
        rows.push_back(r);
    }
    if (rows.empty()) throw ParseError("field CSV: no nodes");

    ScalarField field;
    for (std::size_t a = 0; a < 3; ++a) {
        std::vector<double> axis;
        for (const auto& r : rows) axis.push_back(r[a]);
        std::sort(axis.begin(), axis.end());
        axis.erase(std::unique(axis.begin(), axis.end()), axis.end());
        field.grid.resolution[a] = axis.size();
        field.grid.bounds.min[a] = axis.front();
        field.grid.bounds.max[a] = axis.back();
    }
    if (field.grid.nodes() != rows.size()) throw ParseError("field CSV: nodes do not form a regular grid");
    for (const auto& r : rows) field.values.push_back(r[3]);
    return field;
}

ScalarField load_field(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    return read_field(in);
}

}  // namespace lugeon::geo
