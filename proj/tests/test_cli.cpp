#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;

namespace {

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::temp_directory_path() / "lugeon_cli_test" / info->name();
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    int run(const std::string& args) const {
        const std::string cmd = std::string(LUGEON_CLI) + " " + args + " > " + (dir_ / "stdout").string() + " 2> " +
                                (dir_ / "stderr").string();
        const int status = std::system(cmd.c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    static std::string slurp(const fs::path& p) {
        std::ifstream in(p);
        std::stringstream s;
        s << in.rdbuf();
        return s.str();
    }

    std::string stderr_text() const { return slurp(dir_ / "stderr"); }

    void write(const std::string& name, const std::string& text) const { std::ofstream(dir_ / name) << text; }

    std::size_t lines(const std::string& name) const {
        const auto t = slurp(dir_ / name);
        return static_cast<std::size_t>(std::count(t.begin(), t.end(), '\n'));
    }

    fs::path dir_;
};

}  // namespace

TEST_F(Cli, SynthDefault) {
    ASSERT_EQ(run("synth --out " + path("site.csv")), 0) << stderr_text();
    EXPECT_EQ(lines("site.csv"), 790u);
    const auto m = nlohmann::json::parse(slurp(path("site.csv.manifest.json")));
    EXPECT_EQ(m["command"], "synth");
    EXPECT_EQ(m["config"]["max_rows"], 789);
    EXPECT_TRUE(m["config"].contains("bounds"));
}

TEST_F(Cli, SynthSeedOverride) {
    ASSERT_EQ(run("synth --out " + path("a.csv")), 0);
    ASSERT_EQ(run("synth --seed 9 --out " + path("b.csv")), 0);
    const auto a = slurp(path("a.csv")), b = slurp(path("b.csv"));
    EXPECT_NE(a, b);
    EXPECT_EQ(a.substr(0, a.find('\n')), b.substr(0, b.find('\n')));
}

TEST_F(Cli, SynthConfigWithoutBounds) {
    write("c.json", R"({"n_boreholes": 4})");
    EXPECT_EQ(run("synth --config " + path("c.json") + " --out " + path("s.csv")), 1);
    EXPECT_NE(stderr_text().find("bounds"), std::string::npos);
}

TEST_F(Cli, UnknownConfigKeyIsNamed) {
    write("c.json", R"({"bounds": {"x": [0, 1], "y": [0, 1], "z": [0, 1]}, "n_borehole": 4})");
    EXPECT_EQ(run("synth --config " + path("c.json") + " --out " + path("s.csv")), 1);
    EXPECT_NE(stderr_text().find("n_borehole"), std::string::npos);
}

TEST_F(Cli, SonfisNfisAndReplay) {
    write("site.json", R"({"bounds": {"x": [0, 500], "y": [0, 300], "z": [1100, 1320]},
                           "n_boreholes": 8, "samples_per_borehole": 20, "max_rows": 0})");
    ASSERT_EQ(run("synth --config " + path("site.json") + " --out " + path("site.csv")), 0) << stderr_text();
    write("run.json", R"({"n_train": 120, "n_test": 30, "iterations": 2, "som_epochs": 50, "tsk_epochs": 5,
                          "min_neurons": 9, "max_neurons": 30, "inputs": ["x", "y", "z"]})");
    ASSERT_EQ(run("sonfis --data " + path("site.csv") + " --config " + path("run.json") + " --out " + path("r1")), 0)
        << stderr_text();
    for (const char* f : {"trials.csv", "best_model.json", "predictions.csv", "best_som.csv", "manifest.json"})
        EXPECT_TRUE(fs::exists(dir_ / "r1" / f)) << f;
    EXPECT_LE(lines("r1/trials.csv"), 1u + 2u * 4u);
    EXPECT_EQ(lines("r1/predictions.csv"), 31u);

    ASSERT_EQ(run("sonfis --manifest " + path("r1/manifest.json") + " --out " + path("r2")), 0) << stderr_text();
    EXPECT_EQ(slurp(path("r1/trials.csv")), slurp(path("r2/trials.csv")));
    EXPECT_EQ(slurp(path("r1/best_model.json")), slurp(path("r2/best_model.json")));

    ASSERT_EQ(run("grid --model " + path("r1/best_model.json") + " --res 20 20 20 --out " + path("g.csv")), 0)
        << stderr_text();
    EXPECT_EQ(lines("g.csv"), 8001u);
    ASSERT_EQ(run("grid --manifest " + path("g.csv.manifest.json") + " --out " + path("g2.csv")), 0);
    EXPECT_EQ(slurp(path("g.csv")), slurp(path("g2.csv")));
}

TEST_F(Cli, SonfisRstHasAccuracyColumn) {
    write("site.json", R"({"bounds": {"x": [0, 500], "y": [0, 300], "z": [1100, 1320]},
                           "n_boreholes": 6, "samples_per_borehole": 20, "max_rows": 0})");
    ASSERT_EQ(run("synth --config " + path("site.json") + " --out " + path("site.csv")), 0);
    write("run.json", R"({"n_train": 90, "n_test": 20, "iterations": 2, "som_epochs": 30,
                          "min_neurons": 9, "max_neurons": 20})");
    ASSERT_EQ(run("sonfis --second-stage rst --data " + path("site.csv") + " --config " + path("run.json") +
                  " --out " + path("r")),
              0)
        << stderr_text();
    const auto log = slurp(path("r/trials.csv"));
    EXPECT_EQ(log.substr(0, log.find('\n')), "iteration,neurons,rows,cols,rules,train_rmse,test_rmse,status,accuracy,unknown");
}

TEST_F(Cli, SonfisAllSkippedExitsTwo) {
    write("site.json", R"({"bounds": {"x": [0, 500], "y": [0, 300], "z": [1100, 1320]},
                           "n_boreholes": 3, "samples_per_borehole": 10, "max_rows": 0})");
    ASSERT_EQ(run("synth --config " + path("site.json") + " --out " + path("site.csv")), 0);
    write("run.json", R"({"n_train": 20, "n_test": 5, "iterations": 1, "neuron_growth": "regular",
                          "growth_start": 1, "growth_step": 0})");
    EXPECT_EQ(run("sonfis --data " + path("site.csv") + " --config " + path("run.json") + " --out " + path("r")), 2);
}

TEST_F(Cli, SonfisMissingDataFile) {
    EXPECT_EQ(run("sonfis --data " + path("nope.csv") + " --out " + path("r")), 1);
}

TEST_F(Cli, RulesCategoriesAndThreshold) {
    ASSERT_EQ(run("synth --out " + path("site.csv")), 0);
    ASSERT_EQ(run("rules --data " + path("site.csv") + " -k 5 --out " + path("rules.txt")), 0) << stderr_text();
    std::ifstream in(path("rules.txt"));
    std::string line;
    while (std::getline(in, line)) {
        const auto at = line.find("THEN lu=");
        ASSERT_NE(at, std::string::npos) << line;
        const int d = std::stoi(line.substr(at + 8));
        EXPECT_GE(d, 1);
        EXPECT_LE(d, 5);
    }
    EXPECT_EQ(run("rules --data " + path("site.csv") + " --threshold 1.0 --out " + path("none.txt")), 2);
    EXPECT_EQ(lines("none.txt"), 0u);
    EXPECT_EQ(run("rules --data " + path("site.csv") + " -k 1 --out " + path("bad.txt")), 1);
}

TEST_F(Cli, GridVariationOnRuleModelRejected) {
    ASSERT_EQ(run("synth --out " + path("site.csv")), 0);
    ASSERT_EQ(run("rules --data " + path("site.csv") + " --out " + path("rules.txt")), 0);
    EXPECT_EQ(run("grid --model " + path("rules.txt.model.json") + " --variation --out " + path("v.csv")), 1);
    EXPECT_EQ(run("grid --model " + path("rules.txt.model.json") + " --res 3 3 3 --out " + path("c.csv")), 0);
    EXPECT_EQ(lines("c.csv"), 28u);
}

TEST_F(Cli, GridVariationOfConstantModelIsZero) {
    write("m.json", R"({"type": "tsk", "input_dim": 3, "inputs": ["x", "y", "z"], "output": "lu", "output_scale": 1.0,
                        "normalization": {"lo": [0, 0, 0], "hi": [1, 1, 1]},
                        "rules": [{"centers": [0.5, 0.5, 0.5], "sigmas": [0.3, 0.3, 0.3],
                                   "consequent": [0, 0, 0, 12.5]}]})");
    ASSERT_EQ(run("grid --model " + path("m.json") + " --res 4 4 4 --variation --out " + path("v.csv")), 0)
        << stderr_text();
    std::ifstream in(path("v.csv"));
    std::string line;
    std::getline(in, line);
    int rows = 0;
    while (std::getline(in, line)) {
        ++rows;
        EXPECT_EQ(line.substr(line.rfind(',') + 1), "0");
    }
    EXPECT_EQ(rows, 64);
}
