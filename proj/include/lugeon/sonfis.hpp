#pragma once

// SOM -> NFIS (or RST) successive granulation with close-open iterations:
// each iteration trains on SOM granules (closed world) and is re-scored on
// raw held-out objects (open world).

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "lugeon/kernels.hpp"
#include "lugeon/rough.hpp"
#include "lugeon/som.hpp"
#include "lugeon/tabular.hpp"
#include "lugeon/tsk.hpp"

namespace lugeon::sonfis {

enum class SecondStage { nfis, rst };

/// Neuron counts drawn uniformly from [min_neurons, max_neurons].
struct RandomGrowth {
    std::size_t min_neurons = 4;
    std::size_t max_neurons = 100;
};

/// Neuron counts start, start + step, start + 2*step, ...
struct RegularGrowth {
    std::size_t start = 4;
    std::size_t step = 4;
};

struct SonfisConfig {
    std::variant<RandomGrowth, RegularGrowth> neuron_growth = RandomGrowth{};
    std::size_t min_rules = 5;
    std::size_t max_rules = 8;
    std::size_t iterations = 10;
    double error_level = 0.0;
    SecondStage second_stage = SecondStage::nfis;
    std::uint64_t seed = 1;

    std::vector<std::string> inputs;  // empty: every condition attribute

    int som_epochs = 500;
    double som_sigma0 = 0.0;  // 0: half the longer grid side, at least 1

    int tsk_epochs = 30;
    double learning_rate = 0.01;
    double sigma_scale = 1.0;
    double radius_min = 0.05;
    double radius_max = 1.0;
    int radius_probes = 20;

    std::size_t categories = 5;  // rst stage
    double strength_threshold = 0.0;
    int discretize_epochs = 100;

    void validate() const;
};

struct TrialRecord {
    std::size_t iteration = 0;
    std::size_t neurons = 0;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::size_t granules = 0;
    std::size_t rules = 0;
    double train_rmse = 0.0;
    double test_rmse = 0.0;
    /// "ok", "fallback" (rule count forced after the radius search failed) or "skipped: <why>".
    std::string status = "ok";
    double accuracy = 0.0;    // rst stage only
    std::size_t unknown = 0;  // rst stage only

    bool skipped() const noexcept { return status.rfind("skipped", 0) == 0; }
};

using BestModel = std::variant<std::monostate, tsk::TskModel, rough::RoughModel>;

struct SonfisResult {
    std::vector<TrialRecord> trials;
    std::optional<std::size_t> best;  // index into trials
    BestModel best_model;
    std::optional<som::SomModel> best_som;
    std::vector<Prediction> best_predictions;  // on the test objects
};

/// (rows, cols) with rows <= cols and minimal cols - rows, for the smallest
/// n >= neuron_count that has a factor >= 2 (when neuron_count >= 4).
std::pair<std::size_t, std::size_t> grid_shape_for(std::size_t neuron_count);

/// Neuron counts for every iteration, in order.
std::vector<std::size_t> neuron_schedule(const SonfisConfig& config);

SonfisResult run_sonfis_r(const DecisionTable& train, const DecisionTable& test, const SonfisConfig& config,
                          kernels::Exec exec = kernels::Exec::parallel);

SonfisResult run_sorst(const DecisionTable& train, const DecisionTable& test, const SonfisConfig& config,
                       kernels::Exec exec = kernels::Exec::parallel);

/// Rule-count controlled NFIS on a granule table: bisection on the
/// subtractive radius, then a forced-count fallback.
struct NfisFit {
    tsk::TskModel model;
    double radius = 0.0;
    bool fallback = false;
};
std::optional<NfisFit> fit_nfis(const Matrix& inputs, std::span<const double> targets, std::size_t rules,
                                const SonfisConfig& config, kernels::Exec exec = kernels::Exec::parallel);

/// `iteration,neurons,rows,cols,rules,train_rmse,test_rmse,status`, plus
/// `accuracy,unknown` columns when `with_accuracy` is set.
void write_trial_log(const SonfisResult& result, std::ostream& out, bool with_accuracy = false);

}  // namespace lugeon::sonfis
