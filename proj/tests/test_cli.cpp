#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "mrflow/snapshot.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("mrflow_cli_" + std::to_string(std::rand()) + std::to_string(std::rand()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

int run_cli(const std::string& args, const fs::path& dir) {
    const std::string cmd = std::string(MRFLOW_CLI_PATH) + " " + args + " > " +
                            (dir / "cli_out.txt").string() + " 2> " +
                            (dir / "cli_err.txt").string();
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p);
    return std::string((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
}

json load_json(const fs::path& p) { return json::parse(slurp(p)); }

}  // namespace

TEST_CASE("cli: zero-length run emits the initial snapshot only") {
    TempDir tmp;
    const int rc = run_cli("run convection2d --t-end=0 --out " + tmp.path.string(), tmp.path);
    REQUIRE(rc == 0);
    CHECK(fs::exists(tmp.path / "run.json"));
    CHECK(fs::exists(tmp.path / "history.csv"));
    CHECK(fs::exists(tmp.path / "snapshot_d1_000000.mfs"));
    CHECK(fs::exists(tmp.path / "snapshot_d2_000000.mfs"));
    const json summary = load_json(tmp.path / "run.json");
    CHECK(summary["result"]["steps"] == 0);
    // history: header plus the t=0 record
    const std::string csv = slurp(tmp.path / "history.csv");
    CHECK(csv.rfind("t,mass,energy,mass_drift,energy_drift\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
}

TEST_CASE("cli: short multirate run reports the 1:4 slow:fast evaluation ratio") {
    TempDir tmp;
    const int rc = run_cli(
        "run convection2d --m 4 --dt 0.025 --t-end 0.25 --set domain.lower.cells=[40,1,40]"
        " --set domain.upper.cells=[40,1,80] --out " + tmp.path.string(),
        tmp.path);
    REQUIRE(rc == 0);
    const json summary = load_json(tmp.path / "run.json");
    const long slow = summary["result"]["ledger"]["slow_evals"].get<long>();
    const long fast = summary["result"]["ledger"]["fast_evals"].get<long>();
    CHECK(fast == 4 * slow);
    CHECK(summary["result"]["steps"] == 10);
    CHECK(summary["config"]["time"]["m"] == 4);
    CHECK(summary["result"]["mass"]["max_rel_drift"].get<double>() <= 1e-12);
    // echoed config is complete enough to re-run: feed it back in
    std::ofstream(tmp.path / "echo.json") << summary["config"].dump();
    TempDir tmp2;
    const int rc2 = run_cli("run " + (tmp.path / "echo.json").string() + " --out " +
                                tmp2.path.string(),
                            tmp2.path);
    REQUIRE(rc2 == 0);
    const json second = load_json(tmp2.path / "run.json");
    CHECK(second["config"] == summary["config"]);
    CHECK(second["result"]["ledger"] == summary["result"]["ledger"]);
}

TEST_CASE("cli: outputs are bitwise reproducible") {
    TempDir a, b;
    const std::string args = "run convection2d --dt 0.025 --t-end 0.1 "
                             "--set domain.lower.cells=[24,1,24] "
                             "--set domain.upper.cells=[24,1,32] --out ";
    REQUIRE(run_cli(args + a.path.string(), a.path) == 0);
    REQUIRE(run_cli(args + b.path.string(), b.path) == 0);
    CHECK(slurp(a.path / "history.csv") == slurp(b.path / "history.csv"));
    const long steps = load_json(a.path / "run.json")["result"]["steps"].get<long>();
    char name[64];
    std::snprintf(name, sizeof name, "snapshot_d2_%06ld.mfs", steps);
    CHECK(slurp(a.path / name) == slurp(b.path / name));
    CHECK(!slurp(a.path / name).empty());
}

TEST_CASE("cli: final snapshot carries the integrated field") {
    TempDir tmp;
    REQUIRE(run_cli("run convection2d --dt 0.025 --t-end 0.05 "
                    "--set domain.lower.cells=[16,1,16] --set domain.upper.cells=[16,1,20] "
                    "--set domain.buffer_layers=4 --out " + tmp.path.string(),
                    tmp.path) == 0);
    const mrflow::Snapshot s0 = mrflow::read_snapshot((tmp.path / "snapshot_d1_000000.mfs").string());
    const mrflow::Snapshot s2 = mrflow::read_snapshot((tmp.path / "snapshot_d1_000002.mfs").string());
    CHECK(s0.time == 0.0);
    CHECK(s2.time == 0.05);
    CHECK(s0.grid.nx == 16);
    CHECK(s0.field.data != s2.field.data);
}

TEST_CASE("cli: config errors exit with code 1 and leave no artifacts") {
    TempDir tmp;
    SECTION("unknown preset or missing file") {
        CHECK(run_cli("run not-a-scenario --out " + tmp.path.string(), tmp.path) == 1);
        CHECK(!fs::exists(tmp.path / "run.json"));
        CHECK(!fs::exists(tmp.path / "history.csv"));
    }
    SECTION("config file with a missing required field") {
        const json doc = {{"domain",
                           {{"lower",
                             {{"x", {0.0, 1.0}}, {"y", {0.0, 1.0}}, {"z", {-1.0, 0.0}},
                              {"cells", {8, 1, 8}}}},
                            {"upper",
                             {{"x", {0.0, 1.0}}, {"y", {0.0, 1.0}}, {"z", {0.0, 1.0}},
                              {"cells", {8, 1, 8}}}},
                            {"buffer_layers", 2}}},
                          {"fluids", {{"gamma", 1.4}}},
                          {"time", {{"scheme", "mprk"}, {"m", 2}, {"dt", 0.01}}}};
        std::ofstream(tmp.path / "bad.json") << doc.dump();
        CHECK(run_cli("run " + (tmp.path / "bad.json").string() + " --out " + tmp.path.string(),
                      tmp.path) == 1);
        CHECK(!fs::exists(tmp.path / "run.json"));
        CHECK(!fs::exists(tmp.path / "history.csv"));
        const std::string err = slurp(tmp.path / "cli_err.txt");
        CHECK(err.find("t_end") != std::string::npos);
    }
    SECTION("malformed override") {
        CHECK(run_cli("run convection2d --set nonsense --out " + tmp.path.string(), tmp.path) ==
              1);
    }
}

TEST_CASE("cli: convergence study rejects a non-halving dt list") {
    TempDir tmp;
    CHECK(run_cli("study-convergence convection2d --dt-list 0.02 --out " + tmp.path.string(),
                  tmp.path) == 1);
    CHECK(run_cli("study-convergence convection2d --dt-list 0.02,0.015,0.01 --out " +
                      tmp.path.string(),
                  tmp.path) == 1);
}

TEST_CASE("cli: speedup study emits the model comparison") {
    TempDir tmp;
    REQUIRE(run_cli("study-speedup --grid 10,10,50 --m-list 1,2 --split-list 54 --steps 2 --out " +
                        tmp.path.string(),
                    tmp.path) == 0);
    const json out = load_json(tmp.path / "speedup.json");
    REQUIRE(out["rows"].size() == 2);
    // m = 1: no multirate benefit, all ratios exactly one
    CHECK(out["rows"][0]["m"] == 1);
    CHECK(out["rows"][0]["ideal"].get<double>() == 1.0);
    CHECK(out["rows"][0]["eval_ratio"].get<double>() == 1.0);
    const double ideal = out["rows"][1]["ideal"].get<double>();
    const double ratio = out["rows"][1]["eval_ratio"].get<double>();
    CHECK(std::fabs(ideal - ratio) <= 1e-12);
}

TEST_CASE("cli: MRFLOW_OUTDIR environment variable selects the output directory") {
    TempDir tmp;
    const std::string cmd = "MRFLOW_OUTDIR=" + tmp.path.string() + " " + MRFLOW_CLI_PATH +
                            " run convection2d --t-end=0 > /dev/null 2>&1";
    REQUIRE(WEXITSTATUS(std::system(cmd.c_str())) == 0);
    CHECK(fs::exists(tmp.path / "run.json"));
}

TEST_CASE("cli: verify runs the invariant suite") {
    TempDir tmp;
    CHECK(run_cli("verify --quick", tmp.path) == 0);
    const std::string out = slurp(tmp.path / "cli_out.txt");
    CHECK(out.find("[PASS]") != std::string::npos);
    CHECK(out.find("FAIL") == std::string::npos);
}

TEST_CASE("cli: convergence study emits a well-formed table") {
    TempDir tmp;
    const int rc = run_cli(
        "study-convergence manufactured --study-m 2 --dt-list 0.04,0.02,0.01 --study-t-end 0.5 "
        "--set domain.lower.cells=[20,1,20] --set domain.upper.cells=[20,1,20] --out " +
            tmp.path.string(),
        tmp.path);
    REQUIRE(rc == 0);
    const json out = load_json(tmp.path / "convergence.json");
    REQUIRE(out["rows"].size() == 3);
    CHECK(out["ref_dt"].get<double>() == 0.001);  // smallest dt / 10 by default
    for (const auto& row : out["rows"]) {
        CHECK(row["err_rho"].get<double>() > 0.0);
        CHECK(std::isfinite(row["err_energy"].get<double>()));
    }
    CHECK(out["rows"][2]["err_rho"].get<double>() < out["rows"][0]["err_rho"].get<double>());
}

TEST_CASE("cli: default KHI configuration survives its full run window") {
    // 2000 steps of dt=0.25 on the stock 160x80 / 160x80 grids
    TempDir tmp;
    const int rc =
        run_cli("run khi2d --threads 2 --set output.history_cadence=50 --out " +
                    tmp.path.string(),
                tmp.path);
    REQUIRE(rc == 0);
    const json summary = load_json(tmp.path / "run.json");
    CHECK(summary["result"]["steps"] == 2000);
    CHECK(summary["result"]["mass"]["max_rel_drift"].get<double>() <= 1e-12);
    CHECK(summary["result"]["mass"]["domain1_rel_drift"].get<double>() <= 1e-12);
    CHECK(summary["result"]["mass"]["domain2_rel_drift"].get<double>() <= 1e-12);
}
