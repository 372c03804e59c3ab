#include "lugeon/sonfis.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <functional>
#include <limits>
#include <ostream>
#include <random>
#include <stdexcept>

#include "lugeon/random.hpp"

namespace lugeon::sonfis {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), ptr);
}

/// Input columns followed by the decision column.
std::vector<std::size_t> stage_columns(const DecisionTable& table, const SonfisConfig& config) {
    std::vector<std::size_t> cols;
    if (config.inputs.empty()) {
        cols = table.condition_indices();
    } else {
        for (const auto& name : config.inputs) {
            const auto j = table.index_of(name);
            if (j == table.decision_index())
                throw std::invalid_argument("sonfis: decision attribute '" + name + "' listed as an input");
            cols.push_back(j);
        }
    }
    cols.push_back(table.decision_index());
    return cols;
}

DecisionTable project(const DecisionTable& table, std::span<const std::size_t> cols) {
    Schema schema;
    for (auto j : cols) schema.push_back(table.attribute(j));
    Matrix m(table.objects(), cols.size());
    for (std::size_t i = 0; i < table.objects(); ++i)
        for (std::size_t c = 0; c < cols.size(); ++c) m(i, c) = table.at(i, cols[c]);
    return DecisionTable(std::move(schema), std::move(m));
}

Matrix inputs_of(const DecisionTable& staged) {
    Matrix m(staged.objects(), staged.width() - 1);
    for (std::size_t i = 0; i < staged.objects(); ++i)
        for (std::size_t j = 0; j + 1 < staged.width(); ++j) m(i, j) = staged.at(i, j);
    return m;
}

std::vector<double> targets_of(const DecisionTable& staged) { return staged.values().column(staged.width() - 1); }

struct StageOutcome {
    TrialRecord record;
    BestModel model;
    std::vector<Prediction> predictions;
};

// One granule table in, one or more trial records out.
using SecondStageFn = std::function<std::vector<StageOutcome>(const DecisionTable& granules, std::size_t iteration)>;

SonfisResult run_loop(const DecisionTable& train, const DecisionTable& test, const SonfisConfig& config,
                      kernels::Exec exec, const SecondStageFn& second_stage) {
    config.validate();
    if (test.objects() == 0) throw std::invalid_argument("sonfis: empty test set");
    if (train.attributes() != test.attributes()) throw std::invalid_argument("sonfis: train/test schemas differ");

    const auto cols = stage_columns(train, config);
    const DecisionTable staged = project(train, cols);
    const auto schedule = neuron_schedule(config);

    SonfisResult result;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t it = 0; it < schedule.size(); ++it) {
        const auto [rows, grid_cols] = grid_shape_for(schedule[it]);
        const double sigma0 =
            config.som_sigma0 > 0.0 ? config.som_sigma0
                                    : std::max(1.0, static_cast<double>(std::max(rows, grid_cols)) / 2.0);
        auto som_model = som::train_som(staged.values(), som::Topology::grid(rows, grid_cols), config.som_epochs,
                                        sigma0, derive_seed(config.seed, "som", it), exec);
        const DecisionTable granules = som::granulate(som_model, staged);

        bool stop = false;
        for (auto& outcome : second_stage(granules, it)) {
            auto& rec = outcome.record;
            rec.iteration = it + 1;
            rec.neurons = rows * grid_cols;
            rec.rows = rows;
            rec.cols = grid_cols;
            rec.granules = granules.objects();
            if (!rec.skipped() && rec.test_rmse < best) {
                best = rec.test_rmse;
                result.best = result.trials.size();
                result.best_model = std::move(outcome.model);
                result.best_som = som_model;
                result.best_predictions = std::move(outcome.predictions);
            }
            if (!rec.skipped() && rec.test_rmse <= config.error_level) stop = true;
            result.trials.push_back(std::move(rec));
            if (stop) break;
        }
        if (stop) break;
    }
    return result;
}

TrialRecord skipped(std::string why) {
    TrialRecord r;
    r.status = "skipped: " + std::move(why);
    r.train_rmse = r.test_rmse = r.accuracy = kNaN;
    return r;
}

}  // namespace

void SonfisConfig::validate() const {
    if (iterations < 1) throw std::invalid_argument("sonfis config: iterations must be >= 1");
    if (min_rules < 1 || min_rules > max_rules) throw std::invalid_argument("sonfis config: need 1 <= min_rules <= max_rules");
    if (!(error_level >= 0.0)) throw std::invalid_argument("sonfis config: error_level must be >= 0");
    if (const auto* r = std::get_if<RandomGrowth>(&neuron_growth)) {
        if (r->min_neurons < 1 || r->min_neurons > r->max_neurons)
            throw std::invalid_argument("sonfis config: need 1 <= min_neurons <= max_neurons");
    } else {
        const auto& g = std::get<RegularGrowth>(neuron_growth);
        if (g.start < 1) throw std::invalid_argument("sonfis config: growth start must be >= 1");
    }
    if (som_epochs < 1 || tsk_epochs < 1) throw std::invalid_argument("sonfis config: epochs must be >= 1");
    if (!(radius_min > 0.0 && radius_min < radius_max && radius_max <= 1.0))
        throw std::invalid_argument("sonfis config: need 0 < radius_min < radius_max <= 1");
    if (second_stage == SecondStage::rst && categories < 2)
        throw std::invalid_argument("sonfis config: rst stage needs at least 2 categories");
}

std::pair<std::size_t, std::size_t> grid_shape_for(std::size_t neuron_count) {
    if (neuron_count <= 1) return {1, 1};
    if (neuron_count < 4) return {1, neuron_count};
    for (std::size_t n = neuron_count;; ++n) {
        std::size_t best_r = 1;
        for (std::size_t r = 2; r * r <= n; ++r)
            if (n % r == 0) best_r = r;
        if (best_r >= 2) return {best_r, n / best_r};
    }
}

std::vector<std::size_t> neuron_schedule(const SonfisConfig& config) {
    std::vector<std::size_t> out;
    if (const auto* r = std::get_if<RandomGrowth>(&config.neuron_growth)) {
        std::mt19937_64 rng(derive_seed(config.seed, "growth"));
        std::uniform_int_distribution<std::size_t> draw(r->min_neurons, r->max_neurons);
        for (std::size_t t = 0; t < config.iterations; ++t) out.push_back(draw(rng));
    } else {
        const auto& g = std::get<RegularGrowth>(config.neuron_growth);
        for (std::size_t t = 0; t < config.iterations; ++t) out.push_back(g.start + t * g.step);
    }
    return out;
}

std::optional<NfisFit> fit_nfis(const Matrix& inputs, std::span<const double> targets, std::size_t rules,
                                const SonfisConfig& config, kernels::Exec exec) {
    Matrix joint(inputs.rows(), inputs.cols() + 1);
    for (std::size_t i = 0; i < inputs.rows(); ++i) {
        for (std::size_t j = 0; j < inputs.cols(); ++j) joint(i, j) = inputs(i, j);
        joint(i, inputs.cols()) = targets[i];
    }
    joint = MinMax::fit(joint).forward(joint);

    double lo = config.radius_min, hi = config.radius_max, radius = 0.5 * (lo + hi);
    std::optional<Matrix> centers;
    for (int probe = 0; probe < config.radius_probes; ++probe) {
        radius = 0.5 * (lo + hi);
        auto found = tsk::subtractive_cluster(joint, {.radius = radius});
        if (found.rows() == rules) {
            centers = std::move(found);
            break;
        }
        if (found.rows() > rules)
            lo = radius;
        else
            hi = radius;
    }
    const bool fallback = !centers;
    if (fallback) {
        centers = tsk::subtractive_cluster_count(joint, radius, rules);
        if (centers->rows() < rules) return std::nullopt;
    }
    auto model = tsk::init_tsk(*centers, inputs, targets, radius, config.sigma_scale);
    auto trained = tsk::train_hybrid(std::move(model), inputs, targets, config.tsk_epochs, config.learning_rate, exec);
    return NfisFit{std::move(trained.model), radius, fallback};
}

SonfisResult run_sonfis_r(const DecisionTable& train, const DecisionTable& test, const SonfisConfig& config,
                          kernels::Exec exec) {
    const auto cols = stage_columns(test, config);
    const DecisionTable staged_test = project(test, cols);
    const Matrix test_inputs = inputs_of(staged_test);
    const auto test_targets = targets_of(staged_test);

    auto stage = [&](const DecisionTable& granules, std::size_t) {
        std::vector<StageOutcome> out;
        const Matrix g_inputs = inputs_of(granules);
        const auto g_targets = targets_of(granules);
        for (std::size_t rules = config.min_rules; rules <= config.max_rules; ++rules) {
            if (granules.objects() < rules) {
                out.push_back({skipped("granules (" + std::to_string(granules.objects()) + ") fewer than rules (" +
                                       std::to_string(rules) + ")"),
                               {},
                               {}});
                out.back().record.rules = rules;
                continue;
            }
            auto fit = fit_nfis(g_inputs, g_targets, rules, config, exec);
            if (!fit) {
                out.push_back({skipped("fewer distinct granules than rules"), {}, {}});
                out.back().record.rules = rules;
                continue;
            }
            for (std::size_t j = 0; j < cols.size() - 1; ++j) fit->model.input_names.push_back(granules.attribute(j).name);
            fit->model.output_name = granules.attribute(cols.size() - 1).name;

            StageOutcome o;
            o.record.rules = fit->model.rules.size();
            o.record.status = fit->fallback ? "fallback" : "ok";
            o.record.train_rmse = tsk::training_rmse(fit->model, g_inputs, g_targets, exec);
            const auto f = tsk::infer(fit->model, test_inputs, exec);
            for (std::size_t i = 0; i < f.size(); ++i) o.predictions.push_back({f[i], test_targets[i]});
            o.record.test_rmse = rmse(o.predictions);
            o.record.accuracy = kNaN;
            o.model = std::move(fit->model);
            out.push_back(std::move(o));
        }
        return out;
    };
    return run_loop(train, test, config, exec, stage);
}

SonfisResult run_sorst(const DecisionTable& train, const DecisionTable& test, const SonfisConfig& config,
                       kernels::Exec exec) {
    if (config.categories < 2) throw std::invalid_argument("run_sorst: need at least 2 categories");
    const auto cols = stage_columns(test, config);
    const DecisionTable staged_test = project(test, cols);
    const std::size_t d = cols.size() - 1;

    struct Scored {
        double rmse = kNaN;
        double accuracy = 0.0;
        std::size_t unknown = 0;
        std::vector<Prediction> predictions;
    };
    auto score = [d](const rough::RoughModel& model, const DecisionTable& table) {
        Scored s;
        std::size_t correct = 0;
        const auto& decision_scale = model.scales.at(d);
        for (std::size_t i = 0; i < table.objects(); ++i) {
            const auto row = table.row(i);
            const int predicted = model.predict(row.first(d));
            const double actual = row[d];
            if (predicted == decision_scale.categorize(actual)) ++correct;
            if (predicted == model.rules.unknown_code)
                ++s.unknown;
            else
                s.predictions.push_back({decision_scale.representative(predicted), actual});
        }
        s.accuracy = static_cast<double>(correct) / static_cast<double>(table.objects());
        if (!s.predictions.empty()) s.rmse = rmse(s.predictions);
        return s;
    };

    auto stage = [&](const DecisionTable& granules, std::size_t iteration) {
        std::vector<StageOutcome> out;
        auto disc = rough::discretize_table(granules, config.categories, derive_seed(config.seed, "discretize", iteration),
                                            config.discretize_epochs);
        rough::RoughModel model{rough::induce_rules(disc.table, config.strength_threshold, exec), std::move(disc.scales)};
        if (model.rules.rules.empty()) {
            out.push_back({skipped("no rules induced"), {}, {}});
            return out;
        }
        const auto on_train = score(model, granules);
        auto on_test = score(model, staged_test);
        StageOutcome o;
        o.record.rules = model.rules.rules.size();
        o.record.accuracy = on_test.accuracy;
        o.record.unknown = on_test.unknown;
        o.record.train_rmse = on_train.rmse;
        if (on_test.predictions.empty()) {
            o.record.status = "skipped: every test object unknown";
            o.record.test_rmse = kNaN;
        } else {
            o.record.test_rmse = on_test.rmse;
            o.predictions = std::move(on_test.predictions);
            o.model = std::move(model);
        }
        out.push_back(std::move(o));
        return out;
    };
    SonfisConfig rst = config;
    rst.second_stage = SecondStage::rst;
    return run_loop(train, test, rst, exec, stage);
}

void write_trial_log(const SonfisResult& result, std::ostream& out, bool with_accuracy) {
    out << "iteration,neurons,rows,cols,rules,train_rmse,test_rmse,status";
    if (with_accuracy) out << ",accuracy,unknown";
    out << '\n';
    for (const auto& t : result.trials) {
        out << t.iteration << ',' << t.neurons << ',' << t.rows << ',' << t.cols << ',' << t.rules << ','
            << fmt(t.train_rmse) << ',' << fmt(t.test_rmse) << ',' << t.status;
        if (with_accuracy) out << ',' << fmt(t.accuracy) << ',' << t.unknown;
        out << '\n';
    }
}

}  // namespace lugeon::sonfis
