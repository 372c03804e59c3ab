#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "config_io.hpp"
#include "lugeon/tabular.hpp"

using namespace lugeon::cli;

namespace {

void add_common(CLI::App* app, CommonArgs& common) {
    app->add_option("--config", common.config, "JSON config file")->check(CLI::ExistingFile);
    app->add_option("--manifest", common.manifest, "replay the run recorded in a manifest")->check(CLI::ExistingFile);
    app->add_option("--seed", common.seed, "master seed (overrides the config)");
    app->add_option("--out", common.out, "output path");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"lugeon: granular modelling of borehole permeability"};
    app.set_version_flag("--version", std::string(kToolVersion));
    app.require_subcommand(1);

    SynthArgs synth;
    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic borehole site CSV");
    add_common(synth_cmd, synth.common);

    SonfisArgs sonfis;
    auto* sonfis_cmd = app.add_subcommand("sonfis", "SOM granulation followed by NFIS or rough-set rules");
    add_common(sonfis_cmd, sonfis.common);
    sonfis_cmd->add_option("--data", sonfis.data, "site CSV");
    sonfis_cmd->add_option("--second-stage", sonfis.second_stage, "nfis or rst")
        ->check(CLI::IsMember({"nfis", "rst"}));

    RulesArgs rules;
    auto* rules_cmd = app.add_subcommand("rules", "discretize x,y,z,lu and induce rough-set rules");
    add_common(rules_cmd, rules.common);
    rules_cmd->add_option("--data", rules.data, "site CSV");
    rules_cmd->add_option("-k,--categories", rules.k, "categories per attribute");
    rules_cmd->add_option("--threshold", rules.threshold, "minimum rule strength in [0,1]");

    GridArgs grid;
    auto* grid_cmd = app.add_subcommand("grid", "evaluate a model on a regular 3-D grid");
    add_common(grid_cmd, grid.common);
    grid_cmd->add_option("--model", grid.model, "model JSON written by sonfis or rules");
    std::vector<double> bounds;
    std::vector<std::size_t> res;
    grid_cmd->add_option("--bounds", bounds, "xmin xmax ymin ymax zmin zmax")->expected(6);
    grid_cmd->add_option("--res", res, "nodes along x y z")->expected(3);
    grid_cmd->add_flag("--variation", grid.variation, "export the gradient-norm field instead");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kUsage;
    }
    if (bounds.size() == 6) grid.bounds = std::array<double, 6>{bounds[0], bounds[1], bounds[2], bounds[3], bounds[4], bounds[5]};
    if (res.size() == 3) grid.resolution = std::array<std::size_t, 3>{res[0], res[1], res[2]};

    try {
        if (*synth_cmd) return cmd_synth(synth);
        if (*sonfis_cmd) return cmd_sonfis(sonfis);
        if (*rules_cmd) return cmd_rules(rules);
        if (*grid_cmd) return cmd_grid(grid);
    } catch (const lugeon::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    }
    return kUsage;
}
