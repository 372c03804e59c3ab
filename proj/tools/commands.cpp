#include "commands.hpp"

#include <fstream>
#include <iostream>

#include <nlohmann/json.hpp>

#include "config_io.hpp"
#include "lugeon/geo.hpp"
#include "lugeon/random.hpp"
#include "lugeon/rough.hpp"
#include "lugeon/som.hpp"
#include "lugeon/sonfis.hpp"
#include "lugeon/tabular.hpp"
#include "lugeon/tsk.hpp"

namespace lugeon::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Resolved {
    json config = json::object();
    std::optional<RunManifest> replay;
    fs::path out;
};

// Config source precedence: a replayed manifest, then --config, then defaults.
Resolved resolve(const CommonArgs& args, const std::string& command) {
    Resolved r;
    if (args.manifest) {
        auto m = manifest_from_json(read_json(*args.manifest));
        if (m.command != command)
            throw ConfigError("manifest was written by '" + m.command + "', not '" + command + "'");
        r.config = m.config;
        r.replay = std::move(m);
    } else if (args.config) {
        r.config = read_json(*args.config);
    }
    if (!args.out.empty())
        r.out = args.out;
    else if (r.replay && r.replay->outputs.contains("out"))
        r.out = r.replay->outputs.at("out").get<std::string>();
    else
        throw ConfigError("missing --out");
    return r;
}

fs::path input_path(const fs::path& given, const Resolved& r, const char* key) {
    if (!given.empty()) return given;
    if (r.replay && r.replay->inputs.contains(key)) return r.replay->inputs.at(key).get<std::string>();
    throw ConfigError(std::string("missing input '") + key + "'");
}

std::ofstream open_out(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

fs::path sibling(const fs::path& path, const std::string& suffix) { return fs::path(path.string() + suffix); }

DecisionTable project(const DecisionTable& table, const std::vector<std::string>& conditions,
                      const std::string& decision) {
    Schema schema;
    std::vector<std::size_t> cols;
    for (const auto& name : conditions) {
        cols.push_back(table.index_of(name));
        schema.push_back(AttributeMeta::numeric(name));
    }
    cols.push_back(table.index_of(decision));
    schema.push_back(AttributeMeta::numeric(decision, AttrKind::decision));
    Matrix m(table.objects(), cols.size());
    for (std::size_t i = 0; i < table.objects(); ++i)
        for (std::size_t c = 0; c < cols.size(); ++c) m(i, c) = table.at(i, cols[c]);
    return DecisionTable(std::move(schema), std::move(m));
}

}  // namespace

int cmd_synth(const SynthArgs& args) {
    const auto r = resolve(args.common, "synth");
    auto spec = site_spec_from_json(r.config, args.common.config.has_value() && !r.replay);
    if (args.common.seed) spec.seed = *args.common.seed;

    const auto site = geo::generate_synthetic_site(spec);
    if (r.out.has_parent_path()) fs::create_directories(r.out.parent_path());
    save_table(site.table, r.out);

    RunManifest m;
    m.command = "synth";
    m.config = to_json(spec);
    m.seed = spec.seed;
    for (const char* s : {"synth.geometry", "synth.noise", "synth.rqd", "synth.twr"}) m.seeds[s] = derive_seed(spec.seed, s);
    m.outputs = {{"out", r.out.string()}, {"rows", site.table.objects()}};
    write_json(to_json(m), sibling(r.out, ".manifest.json"));
    std::cout << "wrote " << site.table.objects() << " rows to " << r.out.string() << '\n';
    return kOk;
}

int cmd_sonfis(const SonfisArgs& args) {
    const auto r = resolve(args.common, "sonfis");
    auto run = sonfis_run_from_json(r.config);
    auto& config = run.config;
    if (args.common.seed) config.seed = *args.common.seed;
    if (args.second_stage) {
        if (*args.second_stage == "nfis")
            config.second_stage = sonfis::SecondStage::nfis;
        else if (*args.second_stage == "rst")
            config.second_stage = sonfis::SecondStage::rst;
        else
            throw ConfigError("--second-stage must be 'nfis' or 'rst'");
    }
    const auto data = input_path(args.data, r, "data");

    const auto table = load_table(data, site_schema());
    const auto split_seed = derive_seed(config.seed, "split");
    const auto parts = split(table, run.n_train, run.n_test, split_seed);
    const bool rst = config.second_stage == sonfis::SecondStage::rst;
    const auto result = rst ? sonfis::run_sorst(parts.train, parts.test, config)
                            : sonfis::run_sonfis_r(parts.train, parts.test, config);

    fs::create_directories(r.out);
    {
        auto out = open_out(r.out / "trials.csv");
        sonfis::write_trial_log(result, out, rst);
    }
    json outputs = {{"out", r.out.string()}, {"trials", (r.out / "trials.csv").string()}};
    if (result.best) {
        json model = std::holds_alternative<tsk::TskModel>(result.best_model)
                         ? tsk::to_json(std::get<tsk::TskModel>(result.best_model))
                         : rough::to_json(std::get<rough::RoughModel>(result.best_model));
        write_json(model, r.out / "best_model.json");
        {
            auto out = open_out(r.out / "predictions.csv");
            write_predictions(result.best_predictions, out);
        }
        if (result.best_som) {
            std::vector<std::string> names = config.inputs;
            if (names.empty())
                for (auto j : table.condition_indices()) names.push_back(table.attribute(j).name);
            names.push_back(table.attribute(table.decision_index()).name);
            auto out = open_out(r.out / "best_som.csv");
            som::write_prototypes(*result.best_som, names, out);
        }
        outputs["best_model"] = (r.out / "best_model.json").string();
        outputs["predictions"] = (r.out / "predictions.csv").string();
        outputs["best_som"] = (r.out / "best_som.csv").string();
    }

    RunManifest m;
    m.command = "sonfis";
    m.config = to_json(run);
    m.seed = config.seed;
    m.seeds = {{"split", split_seed}, {"growth", derive_seed(config.seed, "growth")}};
    json som_seeds = json::array();
    for (std::size_t it = 0; it < config.iterations; ++it) som_seeds.push_back(derive_seed(config.seed, "som", it));
    m.seeds["som"] = som_seeds;
    m.inputs = {{"data", fs::absolute(data).string()}};
    m.outputs = outputs;
    write_json(to_json(m), r.out / "manifest.json");

    if (!result.best) {
        std::cerr << "sonfis: every trial was skipped; see " << (r.out / "trials.csv").string() << '\n';
        return kDegenerate;
    }
    const auto& best = result.trials[*result.best];
    std::cout << "best trial: iteration " << best.iteration << ", " << best.neurons << " neurons, " << best.rules
              << " rules, test RMSE " << best.test_rmse << '\n';
    return kOk;
}

int cmd_rules(const RulesArgs& args) {
    const auto r = resolve(args.common, "rules");
    auto run = rules_run_from_json(r.config);
    if (args.common.seed) run.seed = *args.common.seed;
    if (args.k) run.k = *args.k;
    if (args.threshold) run.threshold = *args.threshold;
    if (run.k < 2) throw ConfigError("k must be >= 2");
    if (!(run.threshold >= 0.0 && run.threshold <= 1.0)) throw ConfigError("threshold must lie in [0, 1]");
    const auto data = input_path(args.data, r, "data");

    const auto table = project(load_table(data, site_schema()), run.attributes, run.decision);
    const auto disc = rough::discretize_table(table, run.k, run.seed, run.discretize_epochs);
    rough::RoughModel model{rough::induce_rules(disc.table, run.threshold), disc.scales};

    {
        auto out = open_out(r.out);
        rough::write_rules(model.rules, out);
    }
    write_json(rough::to_json(model), sibling(r.out, ".model.json"));

    RunManifest m;
    m.command = "rules";
    m.config = to_json(run);
    m.seed = run.seed;
    json disc_seeds = json::array();
    for (std::size_t j = 0; j < table.width(); ++j) disc_seeds.push_back(derive_seed(run.seed, "discretize", j));
    m.seeds = {{"discretize", disc_seeds}};
    m.inputs = {{"data", fs::absolute(data).string()}};
    m.outputs = {{"out", r.out.string()}, {"model", sibling(r.out, ".model.json").string()},
                 {"rules", model.rules.rules.size()}};
    write_json(to_json(m), sibling(r.out, ".manifest.json"));

    if (model.rules.rules.empty()) {
        std::cerr << "rules: no rule reaches strength " << run.threshold << "; the rule file is empty\n";
        return kDegenerate;
    }
    std::cout << "wrote " << model.rules.rules.size() << " rules to " << r.out.string() << '\n';
    return kOk;
}

int cmd_grid(const GridArgs& args) {
    const auto r = resolve(args.common, "grid");
    auto run = grid_run_from_json(r.config);
    if (args.bounds) {
        const auto& b = *args.bounds;
        run.bounds.min = {b[0], b[2], b[4]};
        run.bounds.max = {b[1], b[3], b[5]};
    }
    if (args.resolution) run.resolution = *args.resolution;
    if (args.variation) run.variation = true;
    const auto model_path = input_path(args.model, r, "model");

    const auto model_json = read_json(model_path);
    const auto type = model_json.value("type", std::string());
    const geo::GridSpec grid{run.bounds, run.resolution};
    geo::ScalarField field;
    if (type == "tsk") {
        field = geo::evaluate_grid(tsk::tsk_model_from_json(model_json), grid);
    } else if (type == "rough") {
        if (run.variation)
            throw ConfigError("--variation needs a continuous model; rule models give category codes");
        field = geo::evaluate_grid(rough::rough_model_from_json(model_json), grid);
    } else {
        throw ConfigError("model file " + model_path.string() + ": unknown model type '" + type + "'");
    }
    if (run.variation) field = geo::variation_field(field);
    if (r.out.has_parent_path()) fs::create_directories(r.out.parent_path());
    geo::export_field(field, r.out);

    RunManifest m;
    m.command = "grid";
    m.config = to_json(run);
    m.inputs = {{"model", fs::absolute(model_path).string()}};
    m.outputs = {{"out", r.out.string()}, {"nodes", grid.nodes()}};
    write_json(to_json(m), sibling(r.out, ".manifest.json"));
    std::cout << "wrote " << grid.nodes() << " nodes to " << r.out.string() << '\n';
    return kOk;
}

}  // namespace lugeon::cli
