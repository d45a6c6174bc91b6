#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int run(const std::string& args) {
    const std::string cmd = std::string(NCIHF_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path scratch(const std::string& name) {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    fs::path p = fs::temp_directory_path() / "ncihf_cli_test" / (std::string(info->name()) + "_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

json load(const fs::path& p) { return json::parse(slurp(p)); }

fs::path write_config(const std::string& name, const std::string& text) {
    fs::path p = scratch(name);
    fs::create_directories(p.parent_path());
    std::ofstream(p) << text;
    return p;
}

}  // namespace

TEST(Cli, UsageErrorsExitWithTwo) {
    EXPECT_EQ(run(""), 2);
    EXPECT_EQ(run("frobnicate"), 2);
    EXPECT_EQ(run("breather --no-such-flag"), 2);
    EXPECT_EQ(run("breather --method simpson"), 2);
    EXPECT_EQ(run("residual"), 2);  // --in is required
    EXPECT_EQ(run("--version"), 0);
}

TEST(Cli, ValidatePassesAndDetectsFaults) {
    const auto out = scratch("v");
    EXPECT_EQ(run("validate --out " + out.string()), 0);
    const auto j = load(out / "validate.json");
    EXPECT_TRUE(j.at("all_pass").get<bool>());
    EXPECT_GE(j.at("count").get<int>(), 12);
    EXPECT_EQ(run("validate --perturb 1e-3 --out " + scratch("p").string()), 1);
}

TEST(Cli, BreatherRunReproducesTheKnownNumbers) {
    const auto out = scratch("b");
    ASSERT_EQ(run("breather --out " + out.string()), 0);
    const auto m = load(out / "manifest.json");
    EXPECT_EQ(m.at("command").get<std::string>(), "breather");
    EXPECT_EQ(m.at("termination").at("reason").get<std::string>(), "time-limit");
    const double T = m.at("pole_period").at("period").get<double>();
    EXPECT_NEAR(T, 11.83, 0.01);
    EXPECT_NEAR(m.at("phi0")[1][0].get<double>(), 1.694, 5e-4);
    EXPECT_NEAR(m.at("energy_period").at("period").get<double>(), 5.916, 0.01);
    EXPECT_LE(m.at("drift").at("max").get<double>(), 1e-6);
    EXPECT_LE(m.at("initial_constraints").at("max_residual").get<double>(), 1e-10);
    EXPECT_EQ(m.at("kink_times").size(), 2u);
    for (const auto& f : m.at("outputs")) EXPECT_TRUE(fs::exists(out / f.get<std::string>())) << f;
    for (const char* f : {"initial_state.json", "trajectory.csv", "trajectory.json", "drift.json", "fields_0.csv",
                          "fields_7.csv", "energy.csv"})
        EXPECT_TRUE(fs::exists(out / f)) << f;
    EXPECT_EQ(m.at("field_files").size(), 8u);
    EXPECT_EQ(m.at("energy_totals").size(), 9u);
}

TEST(Cli, RunsAreDeterministic) {
    const auto a = scratch("a"), b = scratch("b");
    ASSERT_EQ(run("breather --t-end 2 --out " + a.string()), 0);
    ASSERT_EQ(run("breather --t-end 2 --out " + b.string()), 0);
    for (const char* f : {"trajectory.csv", "fields_3.csv", "energy.csv"}) EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
}

TEST(Cli, JacobiDefaultIsTheBreather) {
    const auto j = scratch("j"), b = scratch("b");
    ASSERT_EQ(run("jacobi --t-end 0.5 --out " + j.string()), 0);
    ASSERT_EQ(run("breather --t-end 0.5 --out " + b.string()), 0);
    EXPECT_EQ(slurp(j / "initial_state.json"), slurp(b / "initial_state.json"));
    const auto cfg = write_config("cfg.json", R"({"kind": "jacobi", "p": 1, "q": 1, "m": 0.5, "x0_over_K": [1, 1]})");
    const auto c = scratch("c");
    ASSERT_EQ(run("jacobi --t-end 0.5 --config " + cfg.string() + " --out " + c.string()), 0);
    EXPECT_EQ(slurp(c / "initial_state.json"), slurp(b / "initial_state.json"));
}

TEST(Cli, ResidualCertifiesTheBreather) {
    const auto out = scratch("r");
    ASSERT_EQ(run("breather --out " + out.string()), 0);
    EXPECT_EQ(run("residual --in " + out.string() + " --times 0 1.4 3.9 --grid-n 256"), 0);
    const auto r = load(out / "residual.json");
    EXPECT_TRUE(r.at("pass").get<bool>());
    EXPECT_LE(r.at("max_residual").get<double>(), 1e-6);
    EXPECT_EQ(r.at("reports").size(), 3u);
    EXPECT_EQ(run("residual --in " + out.string() + " --times 0 1.4 --grid-n 256 --perturb 1e-3"), 1);
    EXPECT_EQ(run("residual --in " + scratch("missing").string()), 2);
}

TEST(Cli, TravelingWaveRunsAndImaginaryRhoStops) {
    const auto a = scratch("real");
    ASSERT_EQ(run("traveling-wave --t-end 2 --out " + a.string()), 0);
    EXPECT_EQ(load(a / "manifest.json").at("termination").at("reason").get<std::string>(), "time-limit");
    EXPECT_EQ(run("residual --in " + a.string() + " --times 0 1 --threshold 1e-7"), 0);

    const auto cfg = write_config("rho_i.json", R"({"rho": [0, 1], "a0": [[0, 1]], "b0": [[0, -1]]})");
    const auto b = scratch("imag");
    ASSERT_EQ(run("traveling-wave --t-end 2 --config " + cfg.string() + " --out " + b.string()), 0);
    const auto term = load(b / "manifest.json").at("termination");
    EXPECT_EQ(term.at("reason").get<std::string>(), "admissibility-event");
    EXPECT_NEAR(term.at("t_final").get<double>(), 0.5, 1e-4);
}

TEST(Cli, BadConfigsAreUsageErrors) {
    const auto bad = write_config("bad.json", R"({"p": 1, "bogus": 3})");
    EXPECT_EQ(run("jacobi --config " + bad.string() + " --out " + scratch("o").string()), 2);
    const auto clash = write_config("clash.json", R"({"x0_over_K": [2, 1]})");
    EXPECT_EQ(run("jacobi --config " + clash.string() + " --out " + scratch("o2").string()), 2);
    EXPECT_EQ(run("jacobi --config /nonexistent.json"), 2);
}
