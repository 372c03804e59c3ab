#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace lugeon::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kDegenerate = 2 };

struct CommonArgs {
    std::optional<std::filesystem::path> config;
    std::optional<std::filesystem::path> manifest;  // replay a previous run
    std::optional<std::uint64_t> seed;
    std::filesystem::path out;
};

struct SynthArgs {
    CommonArgs common;
};

struct SonfisArgs {
    CommonArgs common;
    std::filesystem::path data;
    std::optional<std::string> second_stage;
};

struct RulesArgs {
    CommonArgs common;
    std::filesystem::path data;
    std::optional<std::size_t> k;
    std::optional<double> threshold;
};

struct GridArgs {
    CommonArgs common;
    std::filesystem::path model;
    std::optional<std::array<double, 6>> bounds;  // xmin xmax ymin ymax zmin zmax
    std::optional<std::array<std::size_t, 3>> resolution;
    bool variation = false;
};

int cmd_synth(const SynthArgs& args);
int cmd_sonfis(const SonfisArgs& args);
int cmd_rules(const RulesArgs& args);
int cmd_grid(const GridArgs& args);

}  // namespace lugeon::cli
