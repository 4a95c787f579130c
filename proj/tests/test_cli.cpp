#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("spdeflow_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    static int& counter() {
        static int c = 0;
        return c;
    }
};

int run_cli(const std::string& args) {
    const std::string cmd = std::string(SPDEFLOW_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

void write_json(const fs::path& p, const json& j) {
    std::ofstream out(p);
    out << j.dump(2);
}

json read_json(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    json j;
    in >> j;
    return j;
}

}  // namespace

TEST_CASE("norms command: table, divergent flag, assert") {
    TempDir dir;
    const json cfg = {{"schema", "spdeflow-config/1"},
                      {"norms",
                       {{"d", 1},
                        {"n_max", 512},
                        {"x", {0.0, 1.0}},
                        {"p", {0.2, 1.0}},
                        {"tol", 1e-3}}}};
    write_json(dir.path / "cfg.json", cfg);

    const int rc = run_cli("--config " + (dir.path / "cfg.json").string() + " --out " +
                           dir.path.string() + " --assert norms");
    CHECK(rc == 0);
    CHECK(fs::exists(dir.path / "norms.csv"));

    const json rep = read_json(dir.path / "report.json");
    CHECK(rep.at("schema") == "spdeflow-report/1");
    bool saw_divergent = false, saw_ok = false;
    for (const auto& row : rep.at("result").at("rows")) {
        if (row.at("status") == "divergent") saw_divergent = true;
        if (row.at("status") == "ok") saw_ok = true;
    }
    CHECK(saw_divergent);
    CHECK(saw_ok);
}

TEST_CASE("norms command: empty grid gives an empty table and exit 0") {
    TempDir dir;
    const json cfg = {{"norms", {{"x", json::array()}, {"p", json::array()}}}};
    write_json(dir.path / "cfg.json", cfg);
    const int rc = run_cli("--config " + (dir.path / "cfg.json").string() + " --out " +
                           dir.path.string() + " --assert norms");
    CHECK(rc == 0);
    const json rep = read_json(dir.path / "report.json");
    CHECK(rep.at("result").at("rows").empty());
}

TEST_CASE("malformed config exits 2") {
    TempDir dir;
    {
        std::ofstream out(dir.path / "broken.json");
        out << "{ not json";
    }
    CHECK(run_cli("--config " + (dir.path / "broken.json").string() + " norms") == 2);
    CHECK(run_cli("--config " + (dir.path / "missing.json").string() + " norms") == 2);

    // schema-valid JSON but missing mandatory seed
    const json cfg = {{"model", {{"type", "brownian"}, {"d", 1}}},
                      {"flow", {{"T", 0.1}, {"dt", 0.01}}}};
    write_json(dir.path / "noseed.json", cfg);
    CHECK(run_cli("--config " + (dir.path / "noseed.json").string() + " flow") == 2);
}

TEST_CASE("flow command: brownian composition residual is zero") {
    TempDir dir;
    const json cfg = {{"model", {{"type", "brownian"}, {"d", 1}}},
                      {"flow",
                       {{"T", 0.2},
                        {"dt", 1e-2},
                        {"K", 1},
                        {"paths", 2},
                        {"seed", 7},
                        {"starts", {0.0, 1.0}}}}};
    write_json(dir.path / "cfg.json", cfg);
    const int rc = run_cli("--config " + (dir.path / "cfg.json").string() + " --out " +
                           dir.path.string() + " --assert flow");
    CHECK(rc == 0);
    const json rep = read_json(dir.path / "report.json");
    CHECK(rep.at("result").at("composition_max_residual").get<double>() <= 1e-12);
    CHECK(fs::exists(dir.path / "trajectories.csv"));
}

TEST_CASE("solve command: runs, reproducible result block, blow-up exits 3") {
    TempDir dir;
    const json cfg = {{"model", {{"type", "brownian"}, {"d", 1}}},
                      {"basis", {{"d", 1}, {"n_max", 8}}},
                      {"distribution", {{"atoms", {{1.0, {0}, {0.0}}}}}},
                      {"solver", {{"T", 0.25}, {"dt", 1e-2}, {"paths", 400}, {"seed", 5}}}};
    write_json(dir.path / "cfg.json", cfg);

    const std::string base = "--config " + (dir.path / "cfg.json").string() + " --out ";
    CHECK(run_cli(base + (dir.path / "a").string() + " solve") == 0);
    CHECK(run_cli(base + (dir.path / "b").string() + " solve") == 0);

    const json ra = read_json(dir.path / "a" / "report.json");
    const json rb = read_json(dir.path / "b" / "report.json");
    CHECK(ra.at("result").dump() == rb.at("result").dump());  // byte-identical result blocks
    CHECK(ra.at("config_hash") == rb.at("config_hash"));

    // t = 0 returns psi itself
    json cfg0 = cfg;
    cfg0["solver"]["T"] = 0.0;
    cfg0["method"] = "mc";
    write_json(dir.path / "cfg0.json", cfg0);
    CHECK(run_cli("--config " + (dir.path / "cfg0.json").string() + " --out " +
                  (dir.path / "t0").string() + " solve") == 0);
    const json r0 = read_json(dir.path / "t0" / "report.json");
    const auto entries = r0.at("result").at("mc").at("mean").at("entries");
    // coefficients of delta_0: h_k(0); h_1(0) = 0
    CHECK(std::abs(entries.at(1).at(1).get<double>()) <= 1e-15);

    // explosive model: exit 3
    const json bad = {{"model",
                       {{"type", "polynomial"},
                        {"d", 1},
                        {"r", 1},
                        {"sigma", {{0.0}}},
                        {"b", {{{1.0, {5}}}}}}},
                      {"basis", {{"d", 1}, {"n_max", 8}}},
                      {"distribution", {{"atoms", {{1.0, {0}, {3.0}}}}}},
                      {"method", "mc"},
                      {"solver", {{"T", 50.0}, {"dt", 0.5}, {"paths", 64}, {"seed", 5}}}};
    write_json(dir.path / "bad.json", bad);
    CHECK(run_cli("--config " + (dir.path / "bad.json").string() + " --out " +
                  (dir.path / "bad").string() + " solve") == 3);
}

TEST_CASE("kernel command runs and checks mass") {
    TempDir dir;
    const json cfg = {{"model", {{"type", "brownian"}, {"d", 1}}},
                      {"basis", {{"d", 1}, {"n_max", 8}}},
                      {"kernel", {{"x", 0.0}, {"t", 0.5}, {"paths", 2000}, {"dt", 1e-2}, {"seed", 3}}}};
    write_json(dir.path / "cfg.json", cfg);
    CHECK(run_cli("--config " + (dir.path / "cfg.json").string() + " --out " + dir.path.string() +
                  " --assert kernel") == 0);
    const json rep = read_json(dir.path / "report.json");
    CHECK(rep.at("result").at("mass_ok").get<bool>());
}

TEST_CASE("verify command: unknown check name exits 2") {
    TempDir dir;
    const json cfg = {{"verify", {{"checks", {"no_such_check"}}, {"seed", 1}}}};
    write_json(dir.path / "cfg.json", cfg);
    CHECK(run_cli("--config " + (dir.path / "cfg.json").string() + " --out " + dir.path.string() +
                  " verify") == 2);
}

TEST_CASE("verify command: fast subset passes") {
    TempDir dir;
    const json cfg = {{"verify",
                       {{"checks", {"monotonicity", "duality", "spde_residual"}},
                        {"seed", 11},
                        {"n_max", 24}}}};
    write_json(dir.path / "cfg.json", cfg);
    const int rc = run_cli("--config " + (dir.path / "cfg.json").string() + " --out " +
                           dir.path.string() + " --assert verify");
    CHECK(rc == 0);
    const json rep = read_json(dir.path / "report.json");
    CHECK(rep.at("result").at("failures").get<int>() == 0);
}
