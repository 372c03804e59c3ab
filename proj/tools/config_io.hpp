#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "lugeon/geo.hpp"
#include "lugeon/sonfis.hpp"

namespace lugeon::cli {

inline constexpr const char* kToolVersion = "0.1.0";

/// Invalid or unreadable configuration; maps to exit code 1.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

nlohmann::json read_json(const std::filesystem::path& path);
void write_json(const nlohmann::json& j, const std::filesystem::path& path);

geo::SiteSpec site_spec_from_json(const nlohmann::json& j, bool require_bounds);
nlohmann::json to_json(const geo::SiteSpec& spec);

geo::Bounds bounds_from_json(const nlohmann::json& j);
nlohmann::json to_json(const geo::Bounds& b);

struct SonfisRun {
    sonfis::SonfisConfig config;
    std::size_t n_train = 600;
    std::size_t n_test = 93;
};
SonfisRun sonfis_run_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SonfisRun& run);

struct RulesRun {
    std::size_t k = 5;
    double threshold = 0.0;
    std::uint64_t seed = 1;
    int discretize_epochs = 100;
    std::vector<std::string> attributes{"x", "y", "z"};
    std::string decision = "lu";
};
RulesRun rules_run_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RulesRun& run);

struct GridRun {
    geo::Bounds bounds;
    std::array<std::size_t, 3> resolution{20, 20, 20};
    bool variation = false;
};
GridRun grid_run_from_json(const nlohmann::json& j);
nlohmann::json to_json(const GridRun& run);

/// Everything needed to repeat a command: resolved config with defaults
/// materialized, the master seed and derived sub-seeds, and file paths.
struct RunManifest {
    std::string command;
    nlohmann::json config;
    std::uint64_t seed = 0;
    nlohmann::json seeds = nlohmann::json::object();
    nlohmann::json inputs = nlohmann::json::object();
    nlohmann::json outputs = nlohmann::json::object();
    std::string version = kToolVersion;
};

nlohmann::json to_json(const RunManifest& m);
RunManifest manifest_from_json(const nlohmann::json& j);

}  // namespace lugeon::cli
