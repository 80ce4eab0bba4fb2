#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <json.hpp>
#include <string>
#include <sys/wait.h>

#include "test_util.hpp"

namespace tu = test_util;

namespace {

#ifndef EVAR_CLI_PATH
#error "EVAR_CLI_PATH must be defined by the build"
#endif

const std::string kCli = EVAR_CLI_PATH;

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

RunResult run(const std::string& args) {
    static int counter = 0;
    const auto out_path = tu::scratch_dir() / ("cli_out_" + std::to_string(counter) + ".txt");
    const auto err_path = tu::scratch_dir() / ("cli_err_" + std::to_string(counter) + ".txt");
    ++counter;
    const std::string cmd =
        kCli + " " + args + " > " + out_path.string() + " 2> " + err_path.string();
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = tu::slurp(out_path.string());
    r.err = tu::slurp(err_path.string());
    return r;
}

std::string sim_csv(std::uint64_t seed, int n, const std::string& name) {
    const auto path = (tu::scratch_dir() / name).string();
    auto r = run("simulate --seed " + std::to_string(seed) + " -n " + std::to_string(n) +
                 " --omega 2e-6 --alpha 0.08 --beta 0.90 -o " + path);
    REQUIRE(r.exit_code == 0);
    return path;
}

}  // namespace

TEST_CASE("no arguments: usage on stderr, exit 1") {
    auto r = run("");
    CHECK(r.exit_code == 1);
    CHECK(!r.err.empty());
}

TEST_CASE("unknown flags are rejected") {
    auto r = run("stats --no-such-flag");
    CHECK(r.exit_code == 1);
}

TEST_CASE("--help exits 0 for every subcommand and documents flags") {
    for (const std::string sub :
         {"stats", "fit-expectile", "fit-garch", "fit-care", "threshold", "calibrate", "simulate",
          "backtest"}) {
        auto r = run(sub + " --help");
        CHECK(r.exit_code == 0);
        CHECK(r.out.find("--") != std::string::npos);
    }
    CHECK(run("--help").exit_code == 0);
}

TEST_CASE("simulate is byte-identical for a fixed seed") {
    auto a = sim_csv(7, 500, "sim_a.csv");
    auto b = sim_csv(7, 500, "sim_b.csv");
    auto c = sim_csv(8, 500, "sim_c.csv");
    CHECK(tu::slurp(a) == tu::slurp(b));
    CHECK(tu::slurp(a) != tu::slurp(c));
}

TEST_CASE("simulate requires a seed") {
    auto r = run("simulate -n 100 -o " + (tu::scratch_dir() / "noseed.csv").string());
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("seed") != std::string::npos);
}

TEST_CASE("stats prints the descriptive block") {
    auto input = sim_csv(21, 2000, "sim_stats.csv");
    auto r = run("stats -i " + input + " -f csv");
    CHECK(r.exit_code == 0);
    for (const char* needle : {"mean", "std_dev", "skewness", "kurtosis", "jarque_bera", "adf", "arch_lm"})
        CHECK(r.out.find(needle) != std::string::npos);
}

TEST_CASE("calibrate reports tau and the achieved rate") {
    auto input = sim_csv(22, 3000, "sim_cal.csv");
    auto r = run("calibrate -i " + input + " --alpha 0.95");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("tau") != std::string::npos);
    CHECK(r.out.find("expectile") != std::string::npos);
}

TEST_CASE("fit-garch runs and prints parameters") {
    auto input = sim_csv(23, 3000, "sim_garch.csv");
    auto r = run("fit-garch -i " + input);
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("omega") != std::string::npos);
    CHECK(r.out.find("alpha") != std::string::npos);
}

TEST_CASE("backtest emits a schema-conformant JSON report") {
    auto input = sim_csv(31, 2000, "sim_bt.csv");
    const auto report = (tu::scratch_dir() / "bt_report.json").string();
    auto r = run("backtest -i " + input +
                 " --models historical_sim --alphas 0.95 --hs-window 250 "
                 "--eval-start 2003-08-01 --eval-end 2005-12-28 --seed 5 -o " + report);
    REQUIRE(r.exit_code == 0);

    auto j = nlohmann::json::parse(tu::slurp(report));
    REQUIRE(j.contains("seed"));
    CHECK(j["seed"] == 5);
    REQUIRE(j.contains("results"));
    REQUIRE(j["results"].is_array());
    REQUIRE(j["results"].size() == 1);
    const auto& cell = j["results"][0];
    for (const char* key :
         {"model_id", "alpha", "n_obs", "n_violations", "violation_rate", "tests", "losses"})
        REQUIRE(cell.contains(key));
    for (const char* key : {"uc", "cc", "dq"}) {
        REQUIRE(cell["tests"].contains(key));
        const auto& t = cell["tests"][key];
        CHECK(t.contains("stat"));
        CHECK(t.contains("p_value"));
        CHECK(t["p_value"].get<double>() >= 0.0);
        CHECK(t["p_value"].get<double>() <= 1.0);
    }
    CHECK(cell["losses"].contains("all"));
    CHECK(cell["losses"].contains("quadratic"));
    CHECK(cell["model_id"] == "historical_sim");
}

TEST_CASE("backtest reports are byte-identical for the same seed and args") {
    auto input = sim_csv(32, 2000, "sim_bt2.csv");
    const auto r1 = (tu::scratch_dir() / "bt_rep1.json").string();
    const auto r2 = (tu::scratch_dir() / "bt_rep2.json").string();
    const std::string args = " -i " + input +
                             " --models historical_sim --alphas 0.95,0.99 --hs-window 250 "
                             "--eval-start 2003-08-01 --eval-end 2005-12-28 --seed 11 -o ";
    REQUIRE(run("backtest" + args + r1).exit_code == 0);
    REQUIRE(run("backtest" + args + r2).exit_code == 0);
    CHECK(tu::slurp(r1) == tu::slurp(r2));
    CHECK(tu::slurp(r1) != "");
}

TEST_CASE("stats csv format round-trips through a file") {
    auto input = sim_csv(41, 1500, "sim_statscsv.csv");
    const auto out = (tu::scratch_dir() / "stats.csv").string();
    auto r = run("stats -i " + input + " -f csv -o " + out);
    CHECK(r.exit_code == 0);
    auto text = tu::slurp(out);
    CHECK(text.find("mean") != std::string::npos);
    CHECK(text.find(',') != std::string::npos);
}
