#pragma once

// First-order Takagi-Sugeno-Kang fuzzy inference with Gaussian premises.
//
// Inputs are min-max normalized inside the model: premise centers/sigmas and
// consequent slopes are expressed in normalized input coordinates, and the
// consequent output is in target units. Callers always pass raw inputs.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "lugeon/kernels.hpp"
#include "lugeon/matrix.hpp"

namespace lugeon::tsk {

inline constexpr double kSigmaFloor = 1e-6;

struct GaussianMf {
    double center = 0.0;
    double sigma = 1.0;
    friend bool operator==(const GaussianMf&, const GaussianMf&) = default;
};

double gaussian_mf(double x, const GaussianMf& mf);

struct TskRule {
    std::vector<GaussianMf> premise;   // one per input
    std::vector<double> consequent;    // slopes p_1..p_d then bias
    friend bool operator==(const TskRule&, const TskRule&) = default;
};

struct TskModel {
    std::vector<TskRule> rules;
    MinMax normalization;
    /// Target spread; the premise-training loss is measured in these units.
    double output_scale = 1.0;
    std::vector<std::string> input_names;
    std::string output_name;

    std::size_t input_dim() const noexcept { return normalization.dims(); }
    std::size_t parameters_per_rule() const noexcept { return input_dim() + 1; }
    void validate() const;

    Matrix centers() const;
    Matrix sigmas() const;

    friend bool operator==(const TskModel&, const TskModel&) = default;
};

double infer(const TskModel& model, std::span<const double> input);
std::vector<double> infer(const TskModel& model, const Matrix& inputs, kernels::Exec exec = kernels::Exec::parallel);

struct SubtractiveOptions {
    double radius = 0.5;
    double squash = 1.5;
    double accept_ratio = 0.5;
    double reject_ratio = 0.15;
};

/// Chiu subtractive clustering on data already scaled to [0,1] per column.
/// Returns cluster centers as rows (at least one).
Matrix subtractive_cluster(const Matrix& data, const SubtractiveOptions& options = {});

/// Same potential and revision steps, but keeps selecting the highest
/// remaining potential until `count` centers exist, ignoring the stopping
/// ratios. May return fewer when the data has fewer distinct points.
Matrix subtractive_cluster_count(const Matrix& data, double radius, std::size_t count, double squash = 1.5);

/// One rule per center (normalized coordinates; only the first d columns are
/// used). Sigma per input = sigma_scale * radius * range / sqrt(8), floored
/// at kSigmaFloor. Consequents come from global least squares.
TskModel init_tsk(const Matrix& centers, const Matrix& inputs, std::span<const double> targets, double radius,
                  double sigma_scale = 1.0);

/// Grid partition: `mfs_per_input` Gaussians per input evenly spaced on
/// [0,1] (sigma 0.5/(m-1)), full cross product of rules.
TskModel init_grid(const Matrix& inputs, std::span<const double> targets, std::size_t mfs_per_input = 3);

/// Least-squares consequents for fixed premises (minimum-norm if singular).
void fit_consequents(TskModel& model, const Matrix& inputs, std::span<const double> targets,
                     kernels::Exec exec = kernels::Exec::parallel);

double training_rmse(const TskModel& model, const Matrix& inputs, std::span<const double> targets,
                     kernels::Exec exec = kernels::Exec::parallel);
double training_sse(const TskModel& model, const Matrix& inputs, std::span<const double> targets);

/// Premise loss (1/2n) * sum(((f - t) / output_scale)^2).
double premise_loss(const TskModel& model, const Matrix& inputs, std::span<const double> targets);

struct PremiseGradient {
    Matrix centers;  // rules x inputs
    Matrix sigmas;
};

PremiseGradient premise_gradient(const TskModel& model, const Matrix& inputs, std::span<const double> targets,
                                 kernels::Exec exec = kernels::Exec::parallel);

/// Max relative discrepancy between analytic premise gradients and central
/// finite differences with step h in normalized units.
double gradient_check(const TskModel& model, const Matrix& inputs, std::span<const double> targets, double h = 1e-5);

struct TrainResult {
    TskModel model;             // lowest training RMSE seen (post least-squares)
    std::vector<double> trace;  // training RMSE after each epoch's least-squares step
    std::size_t best_epoch = 0;
};

/// Hybrid learning: each epoch solves consequents by least squares, then takes
/// one gradient-descent step on premise centers and sigmas.
TrainResult train_hybrid(TskModel model, const Matrix& inputs, std::span<const double> targets, int epochs,
                         double learning_rate = 0.01, kernels::Exec exec = kernels::Exec::parallel);

nlohmann::json to_json(const TskModel& model);
TskModel tsk_model_from_json(const nlohmann::json& j);

}  // namespace lugeon::tsk
