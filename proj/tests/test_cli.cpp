#include <cstdio>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <gtest/gtest.h>

#include "qfridge/cli/commands.hpp"

using namespace qfridge;
using namespace qfridge::cli;
namespace fs = std::filesystem;

namespace {

struct CliRun {
    int code{-1};
    std::string output;   // stdout and stderr
};

CliRun run_cli(const std::string& args) {
    const std::string cmd = std::string(QFRIDGE_CLI_PATH) + " " + args + " 2>&1";
    CliRun r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe)
        return r;
    char buf[4096];
    std::size_t n = 0;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0)
        r.output.append(buf, n);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string config(const std::string& name) { return std::string(QFRIDGE_CONFIG_DIR) + "/" + name; }

class CliTest : public ::testing::Test {
protected:
    fs::path dir;

    void SetUp() override {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir = fs::temp_directory_path() / (std::string("qfridge_cli_") + info->name());
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    void TearDown() override { fs::remove_all(dir); }

    std::string write_config(const std::string& body) const {
        const fs::path p = dir / "config.json";
        std::ofstream(p) << body;
        return p.string();
    }
    std::string out(const std::string& sub = "out") const { return (dir / sub).string(); }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json report(const fs::path& dir) { return json::parse(slurp(dir / "run_report.json")); }

} // namespace

// ---------------------------------------------------------------------------
// Configuration parsing

TEST(Config, DefaultsAndOverrides) {
    const RunConfig c = parse_config(json::parse(R"({"model": "poisson", "jobs": 3, "poisson": {"xi0": 0.7}})"));
    EXPECT_EQ(c.model, "poisson");
    EXPECT_EQ(c.jobs, 3);
    ASSERT_EQ(c.poisson.impulses.size(), 1u);
    EXPECT_DOUBLE_EQ(c.poisson.impulses.front().xi, 0.7);
}

TEST(Config, UnknownKeysRejectedAtEveryLevel) {
    EXPECT_THROW(parse_config(json::parse(R"({"modle": "gaussian"})")), ConfigError);
    EXPECT_THROW(parse_config(json::parse(R"({"hot": {"temp": 1.0}})")), ConfigError);
    EXPECT_THROW(parse_config(json::parse(R"({"poisson": {"impulses": [{"xi": 1, "w": 1}]}})")), ConfigError);
    try {
        parse_config(json::parse(R"({"gaussian": {"etta": 1.0}})"));
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("etta"), std::string::npos);
    }
}

TEST(Config, TypeAndRangeErrorsNameTheField) {
    EXPECT_THROW(parse_config(json::parse(R"({"hot": {"temperature": "hot"}})")), ConfigError);
    EXPECT_THROW(parse_config(json::parse(R"({"hot": {"temperature": 1.0, "occupation": 0.2}})")), ConfigError);
    RunConfig c = parse_config(json::parse(R"({"gaussian": {"eta": -1.0}})"));
    EXPECT_THROW(model_variant(c), std::invalid_argument);
}

TEST(Config, OccupationResolvesToTemperature) {
    const RunConfig c = load_config(config("steady_gaussian.json"));
    const auto g = std::get<GaussianModel>(model_variant(c));
    EXPECT_NEAR(g.n_hot(), 0.25, 1e-12);
    EXPECT_NEAR(g.n_cold(), 0.5, 1e-12);
}

TEST(Writers, CsvQuotingAndNumbers) {
    EXPECT_EQ(csv_field(Cell{std::string("a,b")}), "\"a,b\"");
    EXPECT_EQ(csv_field(Cell{std::string("say \"hi\"")}), "\"say \"\"hi\"\"\"");
    EXPECT_EQ(csv_field(Cell{}), "");
    EXPECT_EQ(csv_field(Cell{true}), "true");
    EXPECT_EQ(format_number(0.1), "0.1");
    EXPECT_EQ(std::stod(format_number(1.0 / 3.0)), 1.0 / 3.0);
    Table t{"t", {"x", "y"}, {}};
    t.add({1.5, std::string("z")});
    EXPECT_EQ(t.to_csv(), "x,y\r\n1.5,z\r\n");
    EXPECT_THROW(t.add({1.0}), std::logic_error);
}

// ---------------------------------------------------------------------------
// End to end

TEST_F(CliTest, SteadyGaussianWorkedPoint) {
    const CliRun r = run_cli("steady --config " + config("steady_gaussian.json") + " --out " + out());
    ASSERT_EQ(r.code, 0) << r.output;
    const json rep = report(out());
    EXPECT_NEAR(rep["results"]["j_cold"].get<double>(), 1.0 / 12.0, 1e-12);
    EXPECT_NEAR(rep["results"]["population_b"].get<double>(), 5.0 / 12.0, 1e-12);
    EXPECT_EQ(rep["version"], kVersion);
    EXPECT_TRUE(rep["config"].is_object());
    EXPECT_TRUE(fs::exists(fs::path(out()) / "steady.csv"));
}

TEST_F(CliTest, SteadyEqualOccupationsGiveZeroCurrent) {
    const std::string cfg = write_config(R"({
        "oscillators": {"omega_h": 2.0, "omega_c": 1.0},
        "hot": {"occupation": 0.3}, "cold": {"occupation": 0.3},
        "gaussian": {"eta": 0.5, "gamma_h": 1.0, "gamma_c": 1.0}})");
    const CliRun r = run_cli("steady --config " + cfg + " --out " + out());
    ASSERT_EQ(r.code, 0) << r.output;
    EXPECT_NEAR(report(out())["results"]["j_cold"].get<double>(), 0.0, 1e-15);
}

TEST_F(CliTest, SteadyPoissonReferencePoint) {
    const CliRun r = run_cli("steady --config " + config("steady_poisson.json") + " --out " + out());
    ASSERT_EQ(r.code, 0) << r.output;
    const json res = report(out())["results"];
    EXPECT_GT(res["j_cold"].get<double>(), 0.0);
    EXPECT_GT(res["sigma_u"].get<double>(), 0.0);
}

TEST_F(CliTest, ConstraintViolationExitsThree) {
    const std::string cfg = write_config(R"({"model": "poisson",
        "oscillators": {"omega_h": 1.0, "omega_c": 0.1},
        "poisson": {"lambda": 1.0, "xi0": 1.0}})");
    const CliRun r = run_cli("steady --config " + cfg + " --out " + out());
    EXPECT_EQ(r.code, 3) << r.output;
    EXPECT_NE(r.output.find("omega_h*omega_c > epsilon^2"), std::string::npos) << r.output;
}

TEST_F(CliTest, UnknownKeyExitsTwo) {
    const CliRun r = run_cli("steady --config " + write_config(R"({"gaussian": {"eta": 1, "noise": 2}})") +
                          " --out " + out());
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.output.find("noise"), std::string::npos) << r.output;
}

TEST_F(CliTest, BadFlagExitsTwo) {
    EXPECT_EQ(run_cli("steady --model lorentzian --out " + out()).code, 2);
    EXPECT_EQ(run_cli("--out " + out()).code, 2);
}

TEST_F(CliTest, SweepUnknownParameterExitsTwo) {
    const std::string cfg =
        write_config(R"({"sweep": {"parameter": "colour", "start": 0.1, "stop": 1.0, "points": 3}})");
    const CliRun r = run_cli("sweep --config " + cfg + " --out " + out());
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.output.find("eta"), std::string::npos) << r.output;
}

TEST_F(CliTest, SweepEta) {
    const CliRun r = run_cli("sweep --config " + config("sweep_eta.json") + " --out " + out());
    ASSERT_EQ(r.code, 0) << r.output;
    const json rows = report(out())["results"];
    EXPECT_EQ(rows["rows"], 41);
}

TEST_F(CliTest, Fig2TableAndDeterminism) {
    const std::string cfg = write_config(R"({"model": "poisson",
        "fig2": {"points": 201, "xi0_start": 0.0, "xi0_stop": 6.283185307179586}})");
    const CliRun a = run_cli("fig2 --config " + cfg + " --out " + out("a"));
    const CliRun b = run_cli("fig2 --config " + cfg + " --out " + out("b") + " --jobs 2");
    ASSERT_EQ(a.code, 0) << a.output;
    ASSERT_EQ(b.code, 0) << b.output;
    const std::string csv = slurp(fs::path(out("a")) / "fig2.csv");
    EXPECT_EQ(csv, slurp(fs::path(out("b")) / "fig2.csv"));

    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "xi0,sigma_h,sigma_c,sigma_u,j_cold,feasible,j_hot,j_noise,eta\r");
    int rows = 0;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ls(line.substr(0, line.size() - 1));
        std::string cell;
        while (std::getline(ls, cell, ','))
            cells.push_back(cell);
        ASSERT_GE(cells.size(), 5u);
        EXPECT_GE(std::stod(cells[3]), -1e-12) << line;
        if (rows == 100)
            EXPECT_NEAR(std::stod(cells[4]), 0.0, 1e-20) << line;   // xi0 = pi
        ++rows;
    }
    EXPECT_EQ(rows, 201);
}

TEST_F(CliTest, OracleGaussianReportsMismatch) {
    const CliRun r = run_cli("oracle --config " + config("oracle_gaussian.json") + " --out " + out());
    ASSERT_EQ(r.code, 0) << r.output;
    EXPECT_NE(r.output.find("relative current mismatch"), std::string::npos) << r.output;
    EXPECT_LT(report(out())["results"]["worst_relative_mismatch"].get<double>(), 1e-6);
}

TEST_F(CliTest, OracleDimensionCapExitsTwo) {
    const std::string cfg = write_config(R"({"oracle": {"levels": [8, 80], "dimension_cap": 4096}})");
    const CliRun r = run_cli("oracle --config " + cfg + " --out " + out());
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.output.find("4096"), std::string::npos) << r.output;
}

TEST_F(CliTest, ScalingSummaryLine) {
    const std::string cfg = write_config(R"({"scaling": {"dimensions": [1], "points": 6}})");
    const CliRun r = run_cli("scaling --config " + cfg + " --out " + out() + " --format structured");
    ASSERT_EQ(r.code, 0) << r.output;
    std::smatch m;
    ASSERT_TRUE(std::regex_search(r.output, m, std::regex("d = 1: alpha = ([0-9.]+)"))) << r.output;
    EXPECT_NEAR(std::stod(m[1].str()), 2.0, 0.05);
    EXPECT_TRUE(report(out())["tables"].contains("scaling_summary"));
}
