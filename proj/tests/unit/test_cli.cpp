#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "cache.hpp"
#include "netpot/serialize.hpp"

namespace fs = std::filesystem;
using netpot::cli::ResultCache;

namespace {

struct Run {
    int status;
    std::string output;
};

Run run(const std::string& args) {
    const std::string cmd = std::string(NETPOT_CLI_PATH) + " " + args + " 2>&1";
    Run r{-1, {}};
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buf{};
    while (std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe))
        r.output.append(buf.data(), n);
    const int st = pclose(pipe);
    r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

struct Workspace {
    fs::path dir;
    Workspace() : dir(fs::temp_directory_path() / "netpot_cli_test") {
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    ~Workspace() { fs::remove_all(dir); }
    std::string operator/(const std::string& name) const { return (dir / name).string(); }
    std::string cache() const { return "--cache-dir " + (dir / "cache").string(); }
};

std::vector<std::vector<std::string>> csv(const std::string& path) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(netpot::read_file(path));
    for (std::string line; std::getline(in, line);) {
        std::vector<std::string> cells;
        std::istringstream ls(line);
        for (std::string c; std::getline(ls, c, ',');)
            cells.push_back(c);
        rows.push_back(cells);
    }
    return rows;
}

} // namespace

TEST_CASE("cache store, load and corruption") {
    Workspace ws;
    ResultCache cache(ws.dir / "c");
    const auto key = ResultCache::key("abc", "mcurve", {{"rmin", 2}});
    CHECK(key != ResultCache::key("abc", "mcurve", {{"rmin", 4}}));
    CHECK(key != ResultCache::key("abd", "mcurve", {{"rmin", 2}}));
    CHECK_FALSE(cache.load(key).has_value());
    cache.store(key, {{"out", "1,2\n"}});
    auto hit = cache.load(key);
    REQUIRE(hit.has_value());
    CHECK(hit->at("out") == "1,2\n");

    const auto blob = ws.dir / "c" / (key + ".json");
    {
        std::ofstream f(blob, std::ios::app);
        f << "garbage";
    }
    CHECK_FALSE(cache.load(key).has_value());
    CHECK_FALSE(fs::exists(blob));
}

TEST_CASE("usage errors exit with 2") {
    CHECK(run("--bogus").status == 2);
    CHECK(run("mcurve --net").status == 2);
    CHECK(run("minimax --net x.json --r 2 --R 4 --unknown").status == 2);
    CHECK(run("").status == 2);
}

TEST_CASE("mcurve on the line, cached") {
    Workspace ws;
    REQUIRE(run("gen --kind line --out " + ws / "line.json").status == 0);
    const std::string cmd = ws.cache() + " mcurve --net " + ws / "line.json" +
                            " --rmin 2 --rmax 8 --ratio 2 --out " + ws / "m.csv";
    auto first = run(cmd);
    REQUIRE(first.status == 0);
    CHECK(first.output.find("cache hit") == std::string::npos);
    auto rows = csv(ws / "m.csv");
    REQUIRE(rows.size() == 4);
    CHECK(rows[0][0] == "r");
    const double expected[] = {1.0, 2.0, 4.0};
    for (int k = 0; k < 3; ++k)
        CHECK(std::stod(rows[k + 1][2]) == doctest::Approx(expected[k]).epsilon(1e-10));
    CHECK(fs::exists(ws / "m.csv.meta.json"));
    const auto text = netpot::read_file(ws / "m.csv");

    fs::remove(ws / "m.csv");
    auto second = run(cmd);
    CHECK(second.status == 0);
    CHECK(second.output.find("cache hit") != std::string::npos);
    CHECK(netpot::read_file(ws / "m.csv") == text);

    auto changed = run("--tol-gap 1e-7 " + cmd);
    CHECK(changed.status == 0);
    CHECK(changed.output.find("cache hit") == std::string::npos);

    for (const auto& e : fs::directory_iterator(ws.dir / "cache")) {
        std::ofstream f(e.path(), std::ios::trunc);
        f << "{\"key\": 1}";
    }
    auto corrupt = run(cmd);
    CHECK(corrupt.status == 0);
    CHECK(corrupt.output.find("warning") != std::string::npos);
    CHECK(corrupt.output.find("cache hit") == std::string::npos);
    CHECK(netpot::read_file(ws / "m.csv") == text);

    auto bypass = run("--no-cache " + cmd);
    CHECK(bypass.output.find("cache hit") == std::string::npos);
}

TEST_CASE("verify on the line passes") {
    Workspace ws;
    REQUIRE(run("gen --kind line --out " + ws / "line.json").status == 0);
    auto r = run("--no-cache verify --net " + ws / "line.json" + " --out " + ws / "report.json");
    CHECK(r.status == 0);
    auto report = nlohmann::json::parse(netpot::read_file(ws / "report.json"));
    CHECK(report["passed"] == true);
    CHECK(report["checks"].size() == 9);
}

TEST_CASE("infeasible escape schedule exits with 1") {
    Workspace ws;
    REQUIRE(run("gen --kind grid2d --out " + ws / "grid.json").status == 0);
    auto r = run("--no-cache escape --net " + ws / "grid.json" + " --levels 1,2 --rmax 16 --out " +
                 ws / "h.json" + " --cert " + ws / "cert.json");
    CHECK(r.status == 1);
    CHECK(r.output.find("ScheduleInfeasible") != std::string::npos);
    CHECK_FALSE(fs::exists(ws / "h.json"));
}

TEST_CASE("escape and sublevel on the line") {
    Workspace ws;
    REQUIRE(run("gen --kind line --out " + ws / "line.json").status == 0);
    REQUIRE(run("--no-cache escape --net " + ws / "line.json" + " --levels 1,2,3 --out " + ws / "h.json" +
                " --cert " + ws / "cert.json")
                .status == 0);
    auto cert = nlohmann::json::parse(netpot::read_file(ws / "cert.json"));
    CHECK(cert["status"] == "passed");
    REQUIRE(run("--no-cache sublevel --potential " + ws / "h.json" + " --levels 0,1 --out " + ws / "s.csv")
                .status == 0);
    auto rows = csv(ws / "s.csv");
    REQUIRE(rows.size() == 3);
    CHECK(rows[1][1] == "1");
    CHECK(rows[2][1] == "5");
}

TEST_CASE("missing input file is a computation error") {
    Workspace ws;
    auto r = run("--no-cache minimax --net " + ws / "absent.json" + " --r 2 --R 4");
    CHECK(r.status == 1);
}
