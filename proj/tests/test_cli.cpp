#include <gtest/gtest.h>
#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli_app.hpp"

namespace fs = std::filesystem;
using cyclerep::cli::run_cli;

namespace {

struct CliResult {
    int code;
    std::string out, err;
};

CliResult run(std::vector<std::string> args) {
    args.insert(args.begin(), "cyclerep");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void spit(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

int count_lines(const std::string& s) { return static_cast<int>(std::count(s.begin(), s.end(), '\n')); }

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() / ("cyclerep_cli_" + std::to_string(::getpid()) + "_" +
                                            ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }
    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    fs::path dir_;
};

const std::string kCubic = std::string(CYCLEREP_DEMO_DATA_DIR) + "/cubic_field.json";

} // namespace

TEST_F(Cli, PullbackWritesVerifiedField) {
    const CliResult r = run({"pullback", kCubic, "--m", "3", "--out", path("pb.json")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(slurp(path("pb.json")));
    EXPECT_EQ(j["deg_Y"], 11);
    EXPECT_EQ(j["m"], 3);
    EXPECT_EQ(j["checks"]["conjugacy"], true);
    EXPECT_EQ(j["checks"]["exact_degree"], true);
}

TEST_F(Cli, PullbackErrors) {
    spit(path("bad.json"), "{\"P\": [");
    EXPECT_EQ(run({"pullback", path("bad.json"), "--m", "3"}).code, 2);
    EXPECT_EQ(run({"pullback", path("missing.json"), "--m", "3"}).code, 2);
    spit(path("bad_coeff.json"), R"({"P": [{"du": 1, "dv": 0, "c": "1/0"}], "Q": []})");
    EXPECT_EQ(run({"pullback", path("bad_coeff.json"), "--m", "3"}).code, 2);
    const CliResult m1 = run({"pullback", kCubic, "--m", "1"});
    EXPECT_EQ(m1.code, 3);
    EXPECT_NE(m1.err.find("invalid parameter"), std::string::npos);
    EXPECT_EQ(run({"pullback", kCubic, "--m", "three"}).code, 2);
}

TEST_F(Cli, ExampleNineCycles) {
    const CliResult r = run({"example", "--m", "3", "--rho", "1/2", "--out", path("ex")});
    ASSERT_EQ(r.code, 0) << r.err;
    const std::string csv = slurp(path("ex/cycles.csv"));
    EXPECT_EQ(count_lines(csv), 1 + 9);
    EXPECT_EQ(count_lines(slurp(path("ex/residuals.csv"))), 1 + 9);
    const auto j = nlohmann::json::parse(slurp(path("ex/cycles.json")));
    EXPECT_EQ(j["count"], 9);
    EXPECT_EQ(j["deg_Y"], 11);
    for (const auto& c : j["cycles"]) {
        EXPECT_LE(c["curve_residual"].get<double>(), 1e-6);
        EXPECT_NEAR(c["multiplier"].get<double>() / c["analytic_multiplier"].get<double>(), 1.0, 1e-3);
    }
    for (const char* svg : {"ex/phase_portrait.svg", "ex/lifted_cycles.svg"}) {
        const std::string s = slurp(path(svg));
        EXPECT_EQ(s.rfind("<svg", 0), 0u) << svg;
        EXPECT_NE(s.find("viewBox=\"0 0 1000 1000\""), std::string::npos);
        EXPECT_NE(s.find("</svg>"), std::string::npos);
    }
}

TEST_F(Cli, ExampleIsByteForByteReproducible) {
    ASSERT_EQ(run({"example", "--m", "2", "--out", path("a")}).code, 0);
    ASSERT_EQ(run({"example", "--m", "2", "--out", path("b"), "--serial"}).code, 0);
    for (const char* f : {"cycles.csv", "cycles.json", "residuals.csv", "pullback.json", "phase_portrait.svg", "lifted_cycles.svg"})
        EXPECT_EQ(slurp(dir_ / "a" / f), slurp(dir_ / "b" / f)) << f;
    EXPECT_EQ(count_lines(slurp(dir_ / "a" / "cycles.csv")), 1 + 4);
}

TEST_F(Cli, ExampleFormatSelection) {
    ASSERT_EQ(run({"example", "--m", "2", "--out", path("csv"), "--format", "csv"}).code, 0);
    EXPECT_TRUE(fs::exists(path("csv/cycles.csv")));
    EXPECT_FALSE(fs::exists(path("csv/cycles.json")));
    EXPECT_FALSE(fs::exists(path("csv/lifted_cycles.svg")));
}

TEST_F(Cli, ExampleFailuresAndParameters) {
    const CliResult fail = run({"example", "--m", "2", "--margin", "0.4", "--out", path("f")});
    EXPECT_EQ(fail.code, 4);
    EXPECT_NE(fail.err.find("(1,1)"), std::string::npos);
    EXPECT_NE(fail.err.find("(2,2)"), std::string::npos);
    EXPECT_EQ(run({"example", "--m", "1", "--out", path("g")}).code, 3);
    EXPECT_EQ(run({"example", "--rho", "3/2", "--out", path("g")}).code, 3);
    EXPECT_EQ(run({"example", "--rho", "abc", "--out", path("g")}).code, 3);
    EXPECT_EQ(run({"example", "--tol", "-1", "--out", path("g")}).code, 3);
}

TEST_F(Cli, BoundsTables) {
    const std::string golden = CYCLEREP_GOLDEN_DIR;
    const CliResult t1 = run({"bounds", "table1"});
    ASSERT_EQ(t1.code, 0);
    EXPECT_EQ(t1.out, slurp(golden + "/table1.csv"));
    const CliResult t2 = run({"bounds", "table2", "--out", path("t2.csv")});
    ASSERT_EQ(t2.code, 0);
    EXPECT_EQ(slurp(path("t2.csv")), slurp(golden + "/table2.csv"));
    const CliResult js = run({"bounds", "table1", "--format", "json"});
    ASSERT_EQ(js.code, 0);
    EXPECT_EQ(nlohmann::json::parse(js.out).size(), 18u);
}

TEST_F(Cli, BoundsQueryAndCeiling) {
    const CliResult q = run({"bounds", "query", "39"});
    ASSERT_EQ(q.code, 0);
    EXPECT_NE(q.out.find("L_Ch = 2012"), std::string::npos);
    EXPECT_NE(q.out.find("(19,2)"), std::string::npos);
    EXPECT_NE(q.out.find("H(39) ≥ 4·H(19) ≥ 4·503 = 2012"), std::string::npos);
    const CliResult qj = run({"bounds", "query", "29", "--format", "json"});
    const auto j = nlohmann::json::parse(qj.out);
    EXPECT_EQ(j["value"], "1080");
    EXPECT_EQ(j["witness"]["n"], 9);
    EXPECT_EQ(j["witness"]["m"], 3);
    EXPECT_EQ(run({"bounds", "query", "12"}).code, 5);
    EXPECT_EQ(run({"bounds", "query", "2"}).code, 3);
    EXPECT_EQ(run({"bounds", "query", "x"}).code, 2);
    EXPECT_EQ(run({"bounds", "query"}).code, 3);
    EXPECT_EQ(run({"bounds", "ceiling", "1", "3", "11"}).out, "9\n");
    EXPECT_EQ(run({"bounds", "ceiling", "1", "3", "12"}).out, "169/16\n");
    EXPECT_EQ(run({"bounds", "nonsense"}).code, 3);
}

TEST_F(Cli, SeedTableOverride) {
    spit(path("seeds.json"), R"([{"n": 5, "value": 100, "source": "test"}])");
    ::setenv("CYCLEREP_SEED_TABLE", path("seeds.json").c_str(), 1);
    const CliResult q = run({"bounds", "query", "11"});
    const CliResult missing = run({"bounds", "query", "13"});  // needs n = 6 or n = 1
    spit(path("broken.json"), "[{");
    ::setenv("CYCLEREP_SEED_TABLE", path("broken.json").c_str(), 1);
    const CliResult broken = run({"bounds", "query", "11"});
    ::unsetenv("CYCLEREP_SEED_TABLE");
    EXPECT_EQ(q.code, 0);
    EXPECT_NE(q.out.find("L_Ch = 400"), std::string::npos);
    EXPECT_EQ(missing.code, 5);
    EXPECT_EQ(broken.code, 2);
}

TEST_F(Cli, Branches) {
    const CliResult c6 = run({"branches", "--cheb", "6"});
    ASSERT_EQ(c6.code, 0);
    EXPECT_EQ(nlohmann::json::parse(c6.out)["count"], 6);

    spit(path("sq.json"), R"(["0/1", "0/1", "1/1"])");
    EXPECT_EQ(nlohmann::json::parse(run({"branches", path("sq.json")}).out)["count"], 0);

    spit(path("t3.json"), R"(["0", "-3", "0", "4"])");
    const CliResult file = run({"branches", path("t3.json"), "--svg", path("t3.svg")});
    ASSERT_EQ(file.code, 0);
    const auto a = nlohmann::json::parse(file.out), b = nlohmann::json::parse(run({"branches", "--cheb", "3"}).out);
    ASSERT_EQ(a["count"], b["count"]);
    for (std::size_t k = 0; k < 3; ++k) {
        EXPECT_NEAR(a["intervals"][k]["lo"].get<double>(), b["intervals"][k]["lo"].get<double>(), 1e-9);
        EXPECT_NEAR(a["intervals"][k]["hi"].get<double>(), b["intervals"][k]["hi"].get<double>(), 1e-9);
        EXPECT_EQ(a["intervals"][k]["dir"], b["intervals"][k]["dir"]);
    }
    EXPECT_EQ(slurp(path("t3.svg")).rfind("<svg", 0), 0u);

    spit(path("cube.json"), R"(["0", "0", "0", "1"])");
    const CliResult cube = run({"branches", path("cube.json")});
    EXPECT_EQ(cube.code, 0);
    EXPECT_NE(cube.err.find("warning"), std::string::npos);
    EXPECT_EQ(nlohmann::json::parse(cube.out)["degenerate_critical"], true);

    spit(path("cubic.json"), R"(["0", "-3", "0", "1"])");
    EXPECT_EQ(nlohmann::json::parse(run({"branches", path("cubic.json")}).out)["count"], 3);
    EXPECT_EQ(nlohmann::json::parse(run({"branches", path("cubic.json"), "--unit-interval"}).out)["count"], 1);

    EXPECT_EQ(run({"branches", "--cheb", "1"}).code, 3);
    EXPECT_EQ(run({"branches"}).code, 3);
    spit(path("const.json"), R"(["2"])");
    EXPECT_EQ(run({"branches", path("const.json")}).code, 3);
}

TEST_F(Cli, UsageErrors) {
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run({"frobnicate"}).code, 2);
    const CliResult help = run({"--help"});
    EXPECT_EQ(help.code, 0);
    EXPECT_NE(help.out.find("pullback"), std::string::npos);
}
