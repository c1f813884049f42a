#include <cstdlib>
#include <filesystem>

#include "conic_spde/errors.hpp"
#include "conic_spde/io.hpp"
#include "doctest.h"
#include "manifest_replay.hpp"

using namespace conic;
using namespace conic::testing;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("conic_cli_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

fs::path write_config(const fs::path& dir, const Json& j) {
    const fs::path p = dir / "config.json";
    std::ofstream(p) << j.dump(2);
    return p;
}

Json small_sweep(const fs::path& out) {
    Json j = Json::parse(R"({
      "domain": {"kappa": "3pi/2", "r_max": 2},
      "data": {"noise": [[{"polar": [0.5, "3pi/4"], "width": 0.25}]]},
      "solver": {"T": 0.02, "dt": 0.002, "n_r": 8, "n_eta": 12, "grading": 3},
      "sweep": {"thetas": [0, 2], "levels": 2},
      "trials": 4, "seed": 21
    })");
    j["output"] = {{"dir", out.string()}};
    return j;
}

}  // namespace

TEST_CASE("exponents for the quarter plane") {
    const fs::path dir = scratch("exponents");
    std::string text;
    REQUIRE(run_cli({"exponents", "--kappa", "1.5707963", "--p", "2", "--out", dir.string()}, &text) == kExitOk);
    const Json j = Json::parse(text);
    CHECK(j["lambda"].get<double>() == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(j["theta_range"][0].get<double>() == doctest::Approx(-2.0).epsilon(1e-6));
    CHECK(j["theta_range"][1].get<double>() == doctest::Approx(6.0).epsilon(1e-6));
    CHECK(j["Theta_range"][0].get<double>() == doctest::Approx(1.0));
    CHECK(j["Theta_range"][1].get<double>() == doctest::Approx(3.0));
    CHECK(fs::exists(dir / "exponents.json"));
    CHECK(Json::parse(slurp(dir / "manifest.json"))["exponents"]["kappa"].get<double>() == 1.5707963);
}

TEST_CASE("angle fractions on the command line") {
    const fs::path dir = scratch("angles");
    std::string text;
    REQUIRE(run_cli({"exponents", "--kappa", "3pi/2", "--out", dir.string()}, &text) == kExitOk);
    CHECK(Json::parse(text)["lambda"].get<double>() == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("exit codes") {
    CHECK(run_cli({}) == kExitUsage);
    CHECK(run_cli({"frobnicate"}) == kExitUsage);
    CHECK(run_cli({"--help"}) == kExitOk);
    CHECK(run_cli({"sweep", "--help"}) == kExitOk);
    CHECK(run_cli({"exponents", "--no-such-flag"}) == kExitValidation);
    CHECK(run_cli({"exponents", "--kappa", "pie"}) == kExitValidation);
    CHECK(run_cli({"norm", "--config", "/nonexistent/config.json"}) == kExitValidation);

    const fs::path dir = scratch("exit");
    const fs::path bad_key = write_config(dir, Json{{"solver", {{"tau", 1}}}});
    CHECK(run_cli({"simulate", "--config", bad_key.string()}) == kExitValidation);

    Json holder = Json::parse(R"({"weights": [{"p": 2}], "data": {"noise": [[{"polar": [0.6, 0.7], "width": 0.3}]]}})");
    holder["output"] = {{"dir", (dir / "holder").string()}};
    CHECK(run_cli({"holder", "--config", write_config(dir, holder).string()}) == kExitValidation);
}

TEST_CASE("sweep help documents the csv columns") {
    std::string text;
    REQUIRE(run_cli({"sweep", "--help"}, &text) == kExitOk);
    CHECK(text.find("theta,Theta,level,lhs,rhs,ratio,stderr,classification") != std::string::npos);
}

TEST_CASE("simulate with zero data writes zero snapshots") {
    const fs::path dir = scratch("zero");
    const Json j = Json::parse(R"({"solver": {"T": 0.01, "dt": 0.001, "n_r": 8, "n_eta": 6, "snapshot_every": 5},
                                   "output": {"format": "binary"}})");
    REQUIRE(run_cli({"simulate", "--config", write_config(dir, j).string(), "--out", (dir / "out").string()}) == 0);
    const SnapshotFile s = read_snapshots_binary((dir / "out" / "trial_0000.bin").string());
    REQUIRE(s.snapshots.size() >= 2);
    for (const auto& snap : s.snapshots)
        for (double v : snap) CHECK(v == 0.0);

    REQUIRE(run_cli({"simulate", "--config", write_config(dir, j).string(), "--out", (dir / "csv").string(),
                     "--format", "csv"}) == 0);
    const std::string csv = slurp(dir / "csv" / "trial_0000_0000.csv");
    CHECK(csv.rfind("# t=", 0) == 0);
    CHECK(csv.find("x1,x2,u") != std::string::npos);
}

TEST_CASE("sweep twice with the same seed gives identical bytes") {
    const fs::path dir = scratch("sweep");
    const fs::path a = dir / "a", b = dir / "b";
    REQUIRE(run_cli({"sweep", "--config", write_config(dir, small_sweep(a)).string()}) == 0);
    REQUIRE(run_cli({"sweep", "--config", write_config(dir, small_sweep(b)).string(), "--threads", "2"}) == 0);
    CHECK(slurp(a / "sweep.csv") == slurp(b / "sweep.csv"));
    CHECK(slurp(a / "sweep.csv").rfind("theta,Theta,level,lhs,rhs,ratio,stderr,classification\n", 0) == 0);
    CHECK(replay_matches(a, dir / "replay") == "");

    REQUIRE(run_cli({"sweep", "--config", write_config(dir, small_sweep(dir / "c")).string(), "--seed", "22"}) == 0);
    CHECK(slurp(a / "sweep.csv") != slurp(dir / "c" / "sweep.csv"));
}

TEST_CASE("manifest echoes overrides at full precision") {
    const fs::path dir = scratch("manifest");
    REQUIRE(run_cli({"exponents", "--kappa", "0.12345678901234567", "--a", "4", "--out", dir.string()}) == 0);
    const Json m = Json::parse(slurp(dir / "manifest.json"));
    CHECK(m["exponents"]["kappa"].get<double>() == 0.12345678901234567);
    CHECK(m["exponents"]["a"].get<double>() == 4.0);
    CHECK(m["version"].get<std::string>() == CONIC_SPDE_VERSION);
    CHECK(replay_matches(dir, scratch("manifest_replay")) == "");
}

TEST_CASE("seed falls back to the environment") {
    const fs::path dir = scratch("env");
    ::setenv("CONIC_SPDE_SEED", "1234", 1);
    const int rc = run_cli({"exponents", "--out", dir.string()});
    ::unsetenv("CONIC_SPDE_SEED");
    REQUIRE(rc == 0);
    CHECK(Json::parse(slurp(dir / "manifest.json"))["seed"].get<std::uint64_t>() == 1234u);
}

TEST_CASE("simulate and norm replay from their manifests") {
    const fs::path dir = scratch("replay");
    const Json j = Json::parse(R"({
      "data": {"u0": [{"polar": [0.6, 0.7], "width": 0.25}],
               "noise": [[{"polar": [0.6, 0.8], "width": 0.3}]]},
      "solver": {"T": 0.01, "dt": 0.001, "n_r": 12, "n_eta": 8, "snapshot_every": 5},
      "trials": 2, "seed": 4, "output": {"format": "binary"}
    })");
    const fs::path sim = dir / "sim";
    REQUIRE(run_cli({"simulate", "--config", write_config(dir, j).string(), "--out", sim.string()}) == 0);
    CHECK(replay_matches(sim, dir / "sim2") == "");
    CHECK(slurp(sim / "trial_0001.bin") != slurp(sim / "trial_0000.bin"));

    std::string text;
    REQUIRE(run_cli({"norm", "--input", (sim / "trial_0000.bin").string(), (sim / "trial_0001.bin").string(), "--m",
                     "1", "--out", (dir / "norm").string()},
                    &text) == 0);
    const Json r = Json::parse(text);
    CHECK(r["values"].size() == 2);
    CHECK(r["value"].get<double>() > 0);
    CHECK(replay_matches(dir / "norm", dir / "norm2") == "");
}
