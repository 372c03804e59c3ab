#pragma once

// Synthetic borehole sites with known ground truth, and regular 3-D grids of
// model predictions for contouring.

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "lugeon/kernels.hpp"
#include "lugeon/rough.hpp"
#include "lugeon/tabular.hpp"
#include "lugeon/tsk.hpp"

namespace lugeon::geo {

struct Bounds {
    std::array<double, 3> min{0.0, 0.0, 1100.0};
    std::array<double, 3> max{500.0, 300.0, 1320.0};

    double extent(std::size_t axis) const { return max.at(axis) - min.at(axis); }
    void validate() const;
    friend bool operator==(const Bounds&, const Bounds&) = default;
};

/// Piecewise-constant lugeon by elevation. `boundaries` ascending in z;
/// layer i holds `means[i]`, so means.size() == boundaries.size() + 1.
struct LayeredTruth {
    std::vector<double> boundaries;
    std::vector<double> means;
};

/// Named analytic field:
///  "sine_decay": 50 + 40 sin(2 pi (x - xmin) / Lx) exp(-(z - zmin) / Lz)
///  "linear_z":   10 + 80 (z - zmin) / Lz
struct SmoothTruth {
    std::string field = "sine_decay";
};

struct SiteSpec {
    Bounds bounds;
    std::size_t n_boreholes = 20;
    std::size_t samples_per_borehole = 40;
    std::size_t max_rows = 789;  // 0 keeps every sample
    double interval = 5.0;       // metres between test sections
    double noise_sigma = 5.0;    // lugeon
    std::uint64_t seed = 1;
    std::variant<LayeredTruth, SmoothTruth> ground_truth = SmoothTruth{};
    /// Boreholes with x beyond this fraction of the x extent sit in the
    /// anomalous zone, where RQD no longer falls as permeability rises.
    double anomaly_x_fraction = 0.6;

    void validate() const;
};

class GroundTruth {
public:
    explicit GroundTruth(const SiteSpec& spec);
    /// Unclamped, noiseless field value.
    double operator()(double x, double y, double z) const;

private:
    Bounds bounds_;
    std::variant<LayeredTruth, SmoothTruth> truth_;
};

enum class Zone { theoretic, anomalous };
Zone zone_of(const SiteSpec& spec, double x);

struct Site {
    DecisionTable table;  // site schema x,y,z,l,rqd,twr,lu
    GroundTruth truth;
};

/// Vertical boreholes at seeded positions sampled every `interval` metres
/// from the top. Geometry, noise, RQD and TWR draw from separate seed
/// streams, so changing the truth never moves the sample positions.
Site generate_synthetic_site(const SiteSpec& spec);

struct GridSpec {
    Bounds bounds;
    std::array<std::size_t, 3> resolution{2, 2, 2};

    std::size_t nodes() const noexcept { return resolution[0] * resolution[1] * resolution[2]; }
    double spacing(std::size_t axis) const;
    /// Coordinates of node `index` (x fastest, then y, then z).
    std::array<double, 3> node(std::size_t index) const;
    void validate(std::size_t min_per_axis = 2) const;
};

enum class FieldKind { continuous, categorical };

struct ScalarField {
    GridSpec grid;
    std::vector<double> values;
    FieldKind kind = FieldKind::continuous;

    double at(std::size_t i, std::size_t j, std::size_t k) const {
        return values[(k * grid.resolution[1] + j) * grid.resolution[0] + i];
    }
};

using Predictor = std::function<double(double x, double y, double z)>;

ScalarField evaluate_grid(const Predictor& predictor, const GridSpec& grid, FieldKind kind,
                          kernels::Exec exec = kernels::Exec::parallel);
ScalarField evaluate_grid(const tsk::TskModel& model, const GridSpec& grid,
                          kernels::Exec exec = kernels::Exec::parallel);
/// Category codes 1..k, or k + 1 where no rule applies.
ScalarField evaluate_grid(const rough::RoughModel& model, const GridSpec& grid,
                          kernels::Exec exec = kernels::Exec::parallel);

/// Gradient norm per node (central differences inside, one-sided on the
/// boundary): the local rate of variation in value units per metre.
ScalarField variation_field(const ScalarField& field);

/// CSV `x,y,z,value`, x fastest, 6 significant digits.
void write_field(const ScalarField& field, std::ostream& out);
void export_field(const ScalarField& field, const std::filesystem::path& path);
ScalarField read_field(std::istream& in);
ScalarField load_field(const std::filesystem::path& path);

}  // namespace lugeon::geo
