#include "lugeon/tsk.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <nlohmann/json.hpp>
#include <stdexcept>

#include "lugeon/tabular.hpp"

namespace lugeon::tsk {

namespace {

void check_data(const TskModel& model, const Matrix& inputs, std::span<const double> targets, const char* who) {
    if (inputs.cols() != model.input_dim())
        throw std::invalid_argument(std::string(who) + ": input dimension " + std::to_string(inputs.cols()) +
                                    " does not match model dimension " + std::to_string(model.input_dim()));
    if (inputs.rows() != targets.size()) throw std::invalid_argument(std::string(who) + ": inputs/targets size mismatch");
    if (inputs.empty()) throw std::invalid_argument(std::string(who) + ": empty batch");
}

double rule_output(const TskRule& rule, std::span<const double> u) {
    double y = rule.consequent.back();
    for (std::size_t j = 0; j < u.size(); ++j) y += rule.consequent[j] * u[j];
    return y;
}

double spread(std::span<const double> v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    const double s = *hi - *lo;
    return s > 0.0 ? s : 1.0;
}

double sq_dist(std::span<const double> a, std::span<const double> b) {
    double d = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) d += (a[j] - b[j]) * (a[j] - b[j]);
    return d;
}

std::vector<double> potentials(const Matrix& data, double alpha) {
    std::vector<double> p(data.rows(), 0.0);
    for (std::size_t i = 0; i < data.rows(); ++i)
        for (std::size_t j = 0; j < data.rows(); ++j) p[i] += std::exp(-alpha * sq_dist(data.row(i), data.row(j)));
    return p;
}

void revise(std::vector<double>& p, const Matrix& data, std::size_t center, double peak, double beta) {
    for (std::size_t i = 0; i < data.rows(); ++i)
        p[i] -= peak * std::exp(-beta * sq_dist(data.row(i), data.row(center)));
    p[center] = 0.0;
}

std::size_t argmax(const std::vector<double>& p) {
    return static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
}

void check_cluster_args(const Matrix& data, double radius) {
    if (data.empty()) throw std::invalid_argument("subtractive_cluster: empty data");
    if (!(radius > 0.0 && radius <= 1.0)) throw std::invalid_argument("subtractive_cluster: radius must lie in (0, 1]");
}

std::vector<double> predictions(const TskModel& model, const Matrix& normalized, const Matrix& firing) {
    std::vector<double> f(normalized.rows(), 0.0);
    for (std::size_t i = 0; i < normalized.rows(); ++i)
        for (std::size_t r = 0; r < model.rules.size(); ++r)
            f[i] += firing(i, r) * rule_output(model.rules[r], normalized.row(i));
    return f;
}

}  // namespace

double gaussian_mf(double x, const GaussianMf& mf) {
    if (!(mf.sigma > 0.0)) throw std::invalid_argument("gaussian_mf: sigma must be positive");
    const double z = (x - mf.center) / mf.sigma;
    return std::exp(-0.5 * z * z);
}

void TskModel::validate() const {
    if (rules.empty()) throw std::invalid_argument("TskModel: at least one rule required");
    const std::size_t d = input_dim();
    for (const auto& r : rules) {
        if (r.premise.size() != d || r.consequent.size() != d + 1)
            throw std::invalid_argument("TskModel: rule shape does not match input dimension");
        for (const auto& mf : r.premise)
            if (!(mf.sigma > 0.0) || !std::isfinite(mf.center) || !std::isfinite(mf.sigma))
                throw std::invalid_argument("TskModel: invalid membership function");
        for (double c : r.consequent)
            if (!std::isfinite(c)) throw std::invalid_argument("TskModel: non-finite consequent");
    }
}

Matrix TskModel::centers() const {
    Matrix m(rules.size(), input_dim());
    for (std::size_t r = 0; r < rules.size(); ++r)
        for (std::size_t j = 0; j < input_dim(); ++j) m(r, j) = rules[r].premise[j].center;
    return m;
}

Matrix TskModel::sigmas() const {
    Matrix m(rules.size(), input_dim());
    for (std::size_t r = 0; r < rules.size(); ++r)
        for (std::size_t j = 0; j < input_dim(); ++j) m(r, j) = rules[r].premise[j].sigma;
    return m;
}

double infer(const TskModel& model, std::span<const double> input) {
    if (input.size() != model.input_dim())
        throw std::invalid_argument("infer: input has " + std::to_string(input.size()) + " components, model expects " +
                                    std::to_string(model.input_dim()));
    Matrix u(1, input.size(), model.normalization.forward(input));
    const Matrix w = kernels::serial::normalized_firing(model.centers(), model.sigmas(), u);
    return predictions(model, u, w).front();
}

std::vector<double> infer(const TskModel& model, const Matrix& inputs, kernels::Exec exec) {
    if (inputs.cols() != model.input_dim()) throw std::invalid_argument("infer: input dimension mismatch");
    const Matrix u = model.normalization.forward(inputs);
    return predictions(model, u, kernels::normalized_firing(model.centers(), model.sigmas(), u, exec));
}

Matrix subtractive_cluster(const Matrix& data, const SubtractiveOptions& o) {
    check_cluster_args(data, o.radius);
    const double alpha = 4.0 / (o.radius * o.radius);
    const double rb = o.squash * o.radius;
    const double beta = 4.0 / (rb * rb);

    auto p = potentials(data, alpha);
    Matrix centers(0, data.cols());
    std::vector<std::size_t> chosen;
    const std::size_t first = argmax(p);
    const double reference = p[first];

    for (;;) {
        const std::size_t k = argmax(p);
        const double peak = p[k];
        if (chosen.empty()) {
            // first center is always accepted
        } else if (peak <= 0.0 || peak < o.reject_ratio * reference) {
            break;
        } else if (peak <= o.accept_ratio * reference) {
            double dmin = std::numeric_limits<double>::infinity();
            for (auto c : chosen) dmin = std::min(dmin, std::sqrt(sq_dist(data.row(k), data.row(c))));
            if (dmin / o.radius + peak / reference < 1.0) {
                p[k] = 0.0;
                continue;
            }
        }
        chosen.push_back(k);
        centers.append_row(data.row(k));
        revise(p, data, k, peak, beta);
    }
    return centers;
}

Matrix subtractive_cluster_count(const Matrix& data, double radius, std::size_t count, double squash) {
    check_cluster_args(data, radius);
    const double alpha = 4.0 / (radius * radius);
    const double rb = squash * radius;
    const double beta = 4.0 / (rb * rb);
    auto p = potentials(data, alpha);
    Matrix centers(0, data.cols());
    while (centers.rows() < count) {
        const std::size_t k = argmax(p);
        if (!(p[k] > 0.0)) break;
        const double peak = p[k];
        centers.append_row(data.row(k));
        revise(p, data, k, peak, beta);
    }
    return centers;
}

TskModel init_tsk(const Matrix& centers, const Matrix& inputs, std::span<const double> targets, double radius,
                  double sigma_scale) {
    if (centers.empty()) throw std::invalid_argument("init_tsk: no cluster centers");
    if (inputs.empty() || inputs.rows() != targets.size()) throw std::invalid_argument("init_tsk: bad training data");
    const std::size_t d = inputs.cols();
    if (centers.cols() < d) throw std::invalid_argument("init_tsk: centers narrower than the input dimension");

    TskModel model;
    model.normalization = MinMax::fit(inputs);
    model.output_scale = spread(targets);
    for (std::size_t c = 0; c < centers.rows(); ++c) {
        TskRule rule;
        for (std::size_t j = 0; j < d; ++j) {
            const double range = model.normalization.hi[j] - model.normalization.lo[j];
            const double sigma = std::max(kSigmaFloor, sigma_scale * radius * range / std::sqrt(8.0));
            rule.premise.push_back({centers(c, j), sigma / model.normalization.span(j)});
        }
        rule.consequent.assign(d + 1, 0.0);
        model.rules.push_back(std::move(rule));
    }
    fit_consequents(model, inputs, targets);
    return model;
}

TskModel init_grid(const Matrix& inputs, std::span<const double> targets, std::size_t mfs_per_input) {
    if (inputs.empty() || inputs.rows() != targets.size()) throw std::invalid_argument("init_grid: bad training data");
    if (mfs_per_input < 1) throw std::invalid_argument("init_grid: need at least one MF per input");
    const std::size_t d = inputs.cols();
    if (d > 3) throw std::invalid_argument("init_grid: full cross product supported for at most 3 inputs");

    TskModel model;
    model.normalization = MinMax::fit(inputs);
    model.output_scale = spread(targets);
    const double sigma = mfs_per_input > 1 ? 0.5 / static_cast<double>(mfs_per_input - 1) : 0.5;
    std::size_t total = 1;
    for (std::size_t j = 0; j < d; ++j) total *= mfs_per_input;
    for (std::size_t r = 0; r < total; ++r) {
        TskRule rule;
        std::size_t code = r;
        for (std::size_t j = 0; j < d; ++j) {
            const std::size_t m = code % mfs_per_input;
            code /= mfs_per_input;
            const double center =
                mfs_per_input > 1 ? static_cast<double>(m) / static_cast<double>(mfs_per_input - 1) : 0.5;
            rule.premise.push_back({center, sigma});
        }
        rule.consequent.assign(d + 1, 0.0);
        model.rules.push_back(std::move(rule));
    }
    fit_consequents(model, inputs, targets);
    return model;
}

void fit_consequents(TskModel& model, const Matrix& inputs, std::span<const double> targets, kernels::Exec exec) {
    check_data(model, inputs, targets, "fit_consequents");
    const Matrix u = model.normalization.forward(inputs);
    const Matrix w = kernels::normalized_firing(model.centers(), model.sigmas(), u, exec);
    const std::size_t d = model.input_dim();
    const std::size_t p = model.parameters_per_rule();
    const std::size_t rules = model.rules.size();

    Eigen::MatrixXd a(u.rows(), rules * p);
    Eigen::VectorXd b(u.rows());
    for (std::size_t i = 0; i < u.rows(); ++i) {
        for (std::size_t r = 0; r < rules; ++r) {
            for (std::size_t j = 0; j < d; ++j) a(i, r * p + j) = w(i, r) * u(i, j);
            a(i, r * p + d) = w(i, r);
        }
        b(i) = targets[i];
    }
    const Eigen::VectorXd x = a.completeOrthogonalDecomposition().solve(b);
    for (std::size_t r = 0; r < rules; ++r)
        for (std::size_t j = 0; j < p; ++j) model.rules[r].consequent[j] = x(r * p + j);
}

double training_sse(const TskModel& model, const Matrix& inputs, std::span<const double> targets) {
    check_data(model, inputs, targets, "training_sse");
    const auto f = infer(model, inputs, kernels::Exec::serial);
    double sse = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) sse += (f[i] - targets[i]) * (f[i] - targets[i]);
    return sse;
}

double training_rmse(const TskModel& model, const Matrix& inputs, std::span<const double> targets,
                     kernels::Exec exec) {
    check_data(model, inputs, targets, "training_rmse");
    const auto f = infer(model, inputs, exec);
    std::vector<Prediction> preds;
    for (std::size_t i = 0; i < f.size(); ++i) preds.push_back({f[i], targets[i]});
    return rmse(preds);
}

double premise_loss(const TskModel& model, const Matrix& inputs, std::span<const double> targets) {
    const double sse = training_sse(model, inputs, targets);
    return sse / (2.0 * static_cast<double>(inputs.rows()) * model.output_scale * model.output_scale);
}

PremiseGradient premise_gradient(const TskModel& model, const Matrix& inputs, std::span<const double> targets,
                                 kernels::Exec exec) {
    check_data(model, inputs, targets, "premise_gradient");
    const Matrix u = model.normalization.forward(inputs);
    const Matrix c = model.centers();
    const Matrix s = model.sigmas();
    const Matrix w = kernels::normalized_firing(c, s, u, exec);
    const std::size_t n = u.rows(), rules = model.rules.size(), d = model.input_dim();
    const double scale = 1.0 / (static_cast<double>(n) * model.output_scale * model.output_scale);

    // Per-sample contributions, then an ordered sum over samples.
    Matrix parts(n, 2 * rules * d);
    kernels::for_each_index(
        n,
        [&](std::size_t i) {
            const auto ui = u.row(i);
            std::vector<double> y(rules);
            double f = 0.0;
            for (std::size_t r = 0; r < rules; ++r) {
                y[r] = rule_output(model.rules[r], ui);
                f += w(i, r) * y[r];
            }
            const double g = (f - targets[i]) * scale;
            auto out = parts.row(i);
            for (std::size_t r = 0; r < rules; ++r) {
                const double common = g * w(i, r) * (y[r] - f);
                for (std::size_t j = 0; j < d; ++j) {
                    const double diff = ui[j] - c(r, j);
                    const double s2 = s(r, j) * s(r, j);
                    out[r * d + j] = common * diff / s2;
                    out[rules * d + r * d + j] = common * diff * diff / (s2 * s(r, j));
                }
            }
        },
        exec);

    PremiseGradient grad{Matrix(rules, d), Matrix(rules, d)};
    for (std::size_t i = 0; i < n; ++i) {
        const auto part = parts.row(i);
        for (std::size_t r = 0; r < rules; ++r)
            for (std::size_t j = 0; j < d; ++j) {
                grad.centers(r, j) += part[r * d + j];
                grad.sigmas(r, j) += part[rules * d + r * d + j];
            }
    }
    return grad;
}

double gradient_check(const TskModel& model, const Matrix& inputs, std::span<const double> targets, double h) {
    const auto analytic = premise_gradient(model, inputs, targets, kernels::Exec::serial);
    TskModel probe = model;
    double worst = 0.0;
    auto compare = [&](double& param, double exact) {
        const double saved = param;
        param = saved + h;
        const double up = premise_loss(probe, inputs, targets);
        param = saved - h;
        const double down = premise_loss(probe, inputs, targets);
        param = saved;
        const double numeric = (up - down) / (2.0 * h);
        const double denom = std::max({std::abs(exact), std::abs(numeric), 1e-8});
        worst = std::max(worst, std::abs(exact - numeric) / denom);
    };
    for (std::size_t r = 0; r < probe.rules.size(); ++r) {
        for (std::size_t j = 0; j < probe.input_dim(); ++j) {
            compare(probe.rules[r].premise[j].center, analytic.centers(r, j));
            compare(probe.rules[r].premise[j].sigma, analytic.sigmas(r, j));
        }
    }
    return worst;
}

TrainResult train_hybrid(TskModel model, const Matrix& inputs, std::span<const double> targets, int epochs,
                         double learning_rate, kernels::Exec exec) {
    if (epochs < 1) throw std::invalid_argument("train_hybrid: epochs must be >= 1");
    check_data(model, inputs, targets, "train_hybrid");
    model.validate();

    TrainResult result;
    double best = std::numeric_limits<double>::infinity();
    for (int e = 0; e < epochs; ++e) {
        fit_consequents(model, inputs, targets, exec);
        const double err = training_rmse(model, inputs, targets, exec);
        result.trace.push_back(err);
        if (err < best) {
            best = err;
            result.model = model;
            result.best_epoch = static_cast<std::size_t>(e);
        }
        if (learning_rate == 0.0) continue;
        const auto grad = premise_gradient(model, inputs, targets, exec);
        for (std::size_t r = 0; r < model.rules.size(); ++r) {
            for (std::size_t j = 0; j < model.input_dim(); ++j) {
                const double gc = grad.centers(r, j), gs = grad.sigmas(r, j);
                if (!std::isfinite(gc) || !std::isfinite(gs))
                    throw std::runtime_error("train_hybrid: non-finite premise gradient at epoch " +
                                             std::to_string(e + 1) + ", rule " + std::to_string(r) + ", input " +
                                             std::to_string(j));
                auto& mf = model.rules[r].premise[j];
                mf.center -= learning_rate * gc;
                mf.sigma = std::max(kSigmaFloor, mf.sigma - learning_rate * gs);
            }
        }
    }
    return result;
}

nlohmann::json to_json(const TskModel& model) {
    using nlohmann::json;
    json rules = json::array();
    for (const auto& r : model.rules) {
        std::vector<double> centers, sigmas;
        for (const auto& mf : r.premise) {
            centers.push_back(mf.center);
            sigmas.push_back(mf.sigma);
        }
        rules.push_back({{"centers", centers}, {"sigmas", sigmas}, {"consequent", r.consequent}});
    }
    return {{"type", "tsk"},
            {"input_dim", model.input_dim()},
            {"inputs", model.input_names},
            {"output", model.output_name},
            {"normalization", {{"lo", model.normalization.lo}, {"hi", model.normalization.hi}}},
            {"output_scale", model.output_scale},
            {"rules", rules}};
}

TskModel tsk_model_from_json(const nlohmann::json& j) {
    if (j.at("type").get<std::string>() != "tsk") throw std::invalid_argument("model file is not a TSK model");
    TskModel m;
    m.normalization.lo = j.at("normalization").at("lo").get<std::vector<double>>();
    m.normalization.hi = j.at("normalization").at("hi").get<std::vector<double>>();
    m.output_scale = j.at("output_scale").get<double>();
    m.input_names = j.value("inputs", std::vector<std::string>{});
    m.output_name = j.value("output", std::string{});
    for (const auto& r : j.at("rules")) {
        TskRule rule;
        const auto centers = r.at("centers").get<std::vector<double>>();
        const auto sigmas = r.at("sigmas").get<std::vector<double>>();
        if (centers.size() != sigmas.size()) throw std::invalid_argument("TSK model: centers/sigmas length mismatch");
        for (std::size_t k = 0; k < centers.size(); ++k) rule.premise.push_back({centers[k], sigmas[k]});
        rule.consequent = r.at("consequent").get<std::vector<double>>();
        m.rules.push_back(std::move(rule));
    }
    if (j.at("input_dim").get<std::size_t>() != m.input_dim())
        throw std::invalid_argument("TSK model: input_dim disagrees with normalization");
    m.validate();
    return m;
}

}  // namespace lugeon::tsk
