#include "trajmatch/cli.hpp"

#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace trajmatch;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run cli(std::vector<std::string> args)
{
    std::ostringstream out, err;
    int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch(const std::string& name)
{
    auto dir = fs::temp_directory_path() / ("trajmatch_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("help and usage errors")
{
    CHECK(cli({"--help"}).code == kExitOk);
    CHECK(cli({"--version"}).out.find(kToolVersion) != std::string::npos);
    CHECK(cli({}).code == kExitInput);
    CHECK(cli({"frobnicate"}).code == kExitInput);
    CHECK(cli({"generate"}).code == kExitInput);
}

TEST_CASE("generate, compare, cluster, report")
{
    auto dir = scratch("pipeline");
    auto traj = (dir / "t.csv").string();
    auto matrix = (dir / "m.csv").string();
    auto series = (dir / "s.csv").string();
    auto tree = (dir / "tree.nwk").string();
    auto report = (dir / "report.md").string();

    auto g = cli({"generate", "--algorithms", "random_search,de_rand_1_bin,pso", "--problems", "sphere", "--dims",
                  "2,3", "--runs", "2", "--pop", "10", "--budget-factor", "50", "--out", traj, "--threads", "2"});
    INFO(g.err);
    REQUIRE(g.code == kExitOk);
    CHECK(fs::exists(traj + ".manifest.json"));

    auto c = cli({"compare", "--in", traj, "--out-matrix", matrix, "--out-series", series, "--tie-mode",
                  "prefer-cross"});
    INFO(c.err);
    REQUIRE(c.code == kExitOk);
    CHECK(fs::exists(dir / "m.dim2.csv"));
    CHECK(fs::exists(dir / "m.dim3.csv"));
    CHECK(slurp(matrix).rfind("algorithm,de_rand_1_bin,pso,random_search\n", 0) == 0);

    auto manifest = nlohmann::json::parse(slurp(matrix + ".manifest.json"));
    CHECK(manifest["command"] == "compare");
    CHECK(manifest["config"]["tie_mode"] == "prefer-cross");
    CHECK(manifest["inputs"][0]["sha256"].get<std::string>().size() == 64);
    CHECK(manifest["outputs"].size() == 4);

    for (std::string fmt : {"newick", "json", "svg"}) {
        auto k = cli({"cluster", "--in", matrix, "--format", fmt, "--out", tree});
        CHECK(k.code == kExitOk);
    }
    CHECK(slurp(tree).rfind("<svg", 0) == 0);

    auto r = cli({"report", "--matrix", matrix, "--series", series, "--dendrogram", tree, "--top", "2", "--out",
                  report});
    REQUIRE(r.code == kExitOk);
    auto md = slurp(report);
    CHECK(md.find("| 1 |") != std::string::npos);
    CHECK(md.find("| 3 |") == std::string::npos);
    CHECK(md.find("Supplementary") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("input and config errors exit with 2")
{
    auto dir = scratch("errors");
    auto out = (dir / "x.csv").string();
    CHECK(cli({"generate", "--algorithms", "cmaes", "--out", out}).code == kExitInput);
    CHECK(cli({"generate", "--problems", "nope", "--out", out}).code == kExitInput);
    CHECK(cli({"generate", "--dims", "0", "--out", out}).code == kExitInput);
    CHECK(cli({"compare", "--in", (dir / "missing.csv").string(), "--out-matrix", out}).code == kExitInput);

    {
        std::ofstream bad(dir / "bad.csv");
        bad << "algorithm,problem,dim,run,iteration,member,fitness,x0\na,p,1,0,0,0,nan,0\n";
    }
    auto r = cli({"compare", "--in", (dir / "bad.csv").string(), "--out-matrix", out});
    CHECK(r.code == kExitInput);
    CHECK(r.err.find("row 2") != std::string::npos);

    CHECK(cli({"compare", "--in", (dir / "bad.csv").string(), "--out-matrix", out, "--tie-mode", "odd"}).code ==
          kExitInput);
    CHECK(cli({"cluster", "--in", (dir / "bad.csv").string(), "--out", out, "--format", "png"}).code == kExitInput);
    fs::remove_all(dir);
}
