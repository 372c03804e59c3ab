#include "config_io.hpp"

#include <fstream>
#include <set>

namespace lugeon::cli {

namespace {

using nlohmann::json;

// Typed key access that names the offending key on failure and rejects
// keys nobody asked for.
class KeyReader {
public:
    KeyReader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
        if (!j_.is_object()) throw ConfigError(where_ + ": expected a JSON object");
    }

    bool has(const std::string& key) const { return j_.contains(key); }

    template <class T>
    T get(const std::string& key, T fallback) {
        seen_.insert(key);
        if (!j_.contains(key)) return fallback;
        return convert<T>(key);
    }

    template <class T>
    T require(const std::string& key) {
        seen_.insert(key);
        if (!j_.contains(key)) throw ConfigError(where_ + ": missing required key '" + key + "'");
        return convert<T>(key);
    }

    const json& raw(const std::string& key) {
        seen_.insert(key);
        return j_.at(key);
    }

    void finish() const {
        for (const auto& [key, value] : j_.items())
            if (!seen_.count(key)) throw ConfigError(where_ + ": unknown key '" + key + "'");
    }

private:
    template <class T>
    T convert(const std::string& key) const {
        const auto& v = j_.at(key);
        if constexpr (std::is_same_v<T, bool>) {
            if (!v.is_boolean()) throw ConfigError(where_ + ": key '" + key + "' must be a boolean");
        } else if constexpr (std::is_unsigned_v<T>) {
            if (!v.is_number_unsigned()) throw ConfigError(where_ + ": key '" + key + "' must be a non-negative integer");
        } else if constexpr (std::is_integral_v<T>) {
            if (!v.is_number_integer()) throw ConfigError(where_ + ": key '" + key + "' must be an integer");
        } else if constexpr (std::is_floating_point_v<T>) {
            if (!v.is_number()) throw ConfigError(where_ + ": key '" + key + "' must be a number");
        } else if constexpr (std::is_same_v<T, std::string>) {
            if (!v.is_string()) throw ConfigError(where_ + ": key '" + key + "' must be a string");
        }
        try {
            return v.get<T>();
        } catch (const json::exception& e) {
            throw ConfigError(where_ + ": key '" + key + "': " + e.what());
        }
    }

    const json& j_;
    std::string where_;
    std::set<std::string> seen_;
};

std::array<double, 2> axis_range(const json& b, const char* axis) {
    if (!b.contains(axis)) throw ConfigError("config: key 'bounds' lacks axis '" + std::string(axis) + "'");
    const auto& r = b.at(axis);
    if (!r.is_array() || r.size() != 2 || !r[0].is_number() || !r[1].is_number())
        throw ConfigError("config: key 'bounds." + std::string(axis) + "' must be [min, max]");
    return {r[0].get<double>(), r[1].get<double>()};
}

}  // namespace

json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

void write_json(const json& j, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

geo::Bounds bounds_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("config: key 'bounds' must be an object with x, y, z ranges");
    geo::Bounds b;
    const char* axes[] = {"x", "y", "z"};
    for (std::size_t a = 0; a < 3; ++a) {
        const auto r = axis_range(j, axes[a]);
        b.min[a] = r[0];
        b.max[a] = r[1];
    }
    for (const auto& [key, value] : j.items())
        if (key != "x" && key != "y" && key != "z") throw ConfigError("config: unknown key 'bounds." + key + "'");
    try {
        b.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: key 'bounds': ") + e.what());
    }
    return b;
}

json to_json(const geo::Bounds& b) {
    return {{"x", {b.min[0], b.max[0]}}, {"y", {b.min[1], b.max[1]}}, {"z", {b.min[2], b.max[2]}}};
}

geo::SiteSpec site_spec_from_json(const json& j, bool require_bounds) {
    KeyReader r(j, "config");
    geo::SiteSpec s;
    if (require_bounds && !r.has("bounds")) throw ConfigError("config: missing required key 'bounds'");
    if (r.has("bounds")) s.bounds = bounds_from_json(r.raw("bounds"));
    s.n_boreholes = r.get<std::size_t>("n_boreholes", s.n_boreholes);
    s.samples_per_borehole = r.get<std::size_t>("samples_per_borehole", s.samples_per_borehole);
    s.max_rows = r.get<std::size_t>("max_rows", s.max_rows);
    s.interval = r.get<double>("interval", s.interval);
    s.noise_sigma = r.get<double>("noise_sigma", s.noise_sigma);
    s.seed = r.get<std::uint64_t>("seed", s.seed);
    s.anomaly_x_fraction = r.get<double>("anomaly_x_fraction", s.anomaly_x_fraction);
    if (r.has("ground_truth")) {
        KeyReader g(r.raw("ground_truth"), "config.ground_truth");
        const auto type = g.require<std::string>("type");
        if (type == "smooth") {
            s.ground_truth = geo::SmoothTruth{g.get<std::string>("field", "sine_decay")};
        } else if (type == "layered") {
            s.ground_truth = geo::LayeredTruth{g.require<std::vector<double>>("boundaries"),
                                               g.require<std::vector<double>>("means")};
        } else {
            throw ConfigError("config.ground_truth: key 'type' must be 'smooth' or 'layered'");
        }
        g.finish();
    }
    r.finish();
    try {
        s.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return s;
}

json to_json(const geo::SiteSpec& s) {
    json truth;
    if (const auto* l = std::get_if<geo::LayeredTruth>(&s.ground_truth))
        truth = {{"type", "layered"}, {"boundaries", l->boundaries}, {"means", l->means}};
    else
        truth = {{"type", "smooth"}, {"field", std::get<geo::SmoothTruth>(s.ground_truth).field}};
    return {{"bounds", to_json(s.bounds)},
            {"n_boreholes", s.n_boreholes},
            {"samples_per_borehole", s.samples_per_borehole},
            {"max_rows", s.max_rows},
            {"interval", s.interval},
            {"noise_sigma", s.noise_sigma},
            {"seed", s.seed},
            {"anomaly_x_fraction", s.anomaly_x_fraction},
            {"ground_truth", truth}};
}

SonfisRun sonfis_run_from_json(const json& j) {
    KeyReader r(j, "config");
    SonfisRun run;
    auto& c = run.config;
    run.n_train = r.get<std::size_t>("n_train", run.n_train);
    run.n_test = r.get<std::size_t>("n_test", run.n_test);
    c.seed = r.get<std::uint64_t>("seed", c.seed);
    c.iterations = r.get<std::size_t>("iterations", c.iterations);
    c.min_rules = r.get<std::size_t>("min_rules", c.min_rules);
    c.max_rules = r.get<std::size_t>("max_rules", c.max_rules);
    c.error_level = r.get<double>("error_level", c.error_level);

    const auto growth = r.get<std::string>("neuron_growth", "random");
    sonfis::RandomGrowth random;
    sonfis::RegularGrowth regular;
    random.min_neurons = r.get<std::size_t>("min_neurons", random.min_neurons);
    random.max_neurons = r.get<std::size_t>("max_neurons", random.max_neurons);
    regular.start = r.get<std::size_t>("growth_start", regular.start);
    regular.step = r.get<std::size_t>("growth_step", regular.step);
    if (growth == "random")
        c.neuron_growth = random;
    else if (growth == "regular")
        c.neuron_growth = regular;
    else
        throw ConfigError("config: key 'neuron_growth' must be 'random' or 'regular'");

    const auto stage = r.get<std::string>("second_stage", "nfis");
    if (stage == "nfis")
        c.second_stage = sonfis::SecondStage::nfis;
    else if (stage == "rst")
        c.second_stage = sonfis::SecondStage::rst;
    else
        throw ConfigError("config: key 'second_stage' must be 'nfis' or 'rst'");

    c.inputs = r.get<std::vector<std::string>>("inputs", c.inputs);
    c.som_epochs = r.get<int>("som_epochs", c.som_epochs);
    c.som_sigma0 = r.get<double>("som_sigma0", c.som_sigma0);
    c.tsk_epochs = r.get<int>("tsk_epochs", c.tsk_epochs);
    c.learning_rate = r.get<double>("learning_rate", c.learning_rate);
    c.sigma_scale = r.get<double>("sigma_scale", c.sigma_scale);
    c.radius_min = r.get<double>("radius_min", c.radius_min);
    c.radius_max = r.get<double>("radius_max", c.radius_max);
    c.radius_probes = r.get<int>("radius_probes", c.radius_probes);
    c.categories = r.get<std::size_t>("categories", c.categories);
    c.strength_threshold = r.get<double>("strength_threshold", c.strength_threshold);
    c.discretize_epochs = r.get<int>("discretize_epochs", c.discretize_epochs);
    r.finish();
    try {
        c.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return run;
}

json to_json(const SonfisRun& run) {
    const auto& c = run.config;
    json j = {{"n_train", run.n_train},
              {"n_test", run.n_test},
              {"seed", c.seed},
              {"iterations", c.iterations},
              {"min_rules", c.min_rules},
              {"max_rules", c.max_rules},
              {"error_level", c.error_level},
              {"second_stage", c.second_stage == sonfis::SecondStage::rst ? "rst" : "nfis"},
              {"inputs", c.inputs},
              {"som_epochs", c.som_epochs},
              {"som_sigma0", c.som_sigma0},
              {"tsk_epochs", c.tsk_epochs},
              {"learning_rate", c.learning_rate},
              {"sigma_scale", c.sigma_scale},
              {"radius_min", c.radius_min},
              {"radius_max", c.radius_max},
              {"radius_probes", c.radius_probes},
              {"categories", c.categories},
              {"strength_threshold", c.strength_threshold},
              {"discretize_epochs", c.discretize_epochs}};
    if (const auto* r = std::get_if<sonfis::RandomGrowth>(&c.neuron_growth)) {
        j["neuron_growth"] = "random";
        j["min_neurons"] = r->min_neurons;
        j["max_neurons"] = r->max_neurons;
    } else {
        const auto& g = std::get<sonfis::RegularGrowth>(c.neuron_growth);
        j["neuron_growth"] = "regular";
        j["growth_start"] = g.start;
        j["growth_step"] = g.step;
    }
    return j;
}

RulesRun rules_run_from_json(const json& j) {
    KeyReader r(j, "config");
    RulesRun run;
    run.k = r.get<std::size_t>("k", run.k);
    run.threshold = r.get<double>("threshold", run.threshold);
    run.seed = r.get<std::uint64_t>("seed", run.seed);
    run.discretize_epochs = r.get<int>("discretize_epochs", run.discretize_epochs);
    run.attributes = r.get<std::vector<std::string>>("attributes", run.attributes);
    run.decision = r.get<std::string>("decision", run.decision);
    r.finish();
    if (run.k < 2) throw ConfigError("config: key 'k' must be >= 2");
    if (!(run.threshold >= 0.0 && run.threshold <= 1.0)) throw ConfigError("config: key 'threshold' must lie in [0, 1]");
    return run;
}

json to_json(const RulesRun& run) {
    return {{"k", run.k},
            {"threshold", run.threshold},
            {"seed", run.seed},
            {"discretize_epochs", run.discretize_epochs},
            {"attributes", run.attributes},
            {"decision", run.decision}};
}

GridRun grid_run_from_json(const json& j) {
    KeyReader r(j, "config");
    GridRun run;
    if (r.has("bounds")) run.bounds = bounds_from_json(r.raw("bounds"));
    run.resolution = r.get<std::array<std::size_t, 3>>("resolution", run.resolution);
    run.variation = r.get<bool>("variation", run.variation);
    r.finish();
    return run;
}

json to_json(const GridRun& run) {
    return {{"bounds", to_json(run.bounds)}, {"resolution", run.resolution}, {"variation", run.variation}};
}

json to_json(const RunManifest& m) {
    return {{"tool", "lugeon"},   {"version", m.version}, {"command", m.command}, {"config", m.config},
            {"seed", m.seed},     {"seeds", m.seeds},     {"inputs", m.inputs},   {"outputs", m.outputs}};
}

RunManifest manifest_from_json(const json& j) {
    try {
        RunManifest m;
        m.command = j.at("command").get<std::string>();
        m.config = j.at("config");
        m.seed = j.at("seed").get<std::uint64_t>();
        m.seeds = j.value("seeds", json::object());
        m.inputs = j.value("inputs", json::object());
        m.outputs = j.value("outputs", json::object());
        m.version = j.value("version", std::string(kToolVersion));
        return m;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("manifest: ") + e.what());
    }
}

}  // namespace lugeon::cli
