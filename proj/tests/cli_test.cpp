#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "kinlearn/cli.hpp"
#include "kinlearn/demo.hpp"
#include "kinlearn/kgraph.hpp"

using namespace kinlearn;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("kinlearn_cli_test_" + name)) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& file) const { return (path / file).string(); }
};

}  // namespace

TEST_CASE("usage errors") {
    CHECK(run({}).code == kExitUsage);
    CHECK(run({"frobnicate"}).code == kExitUsage);
    CHECK(run({"generate", "--object", "door"}).code == kExitUsage);  // no -o
    CHECK(run({"--help"}).code == kExitOk);

    TempDir dir("usage");
    const Run unknown = run({"generate", "--object", "toaster", "-o", dir / "x.traj"});
    CHECK(unknown.code == kExitUsage);
    CHECK(unknown.err.find("door") != std::string::npos);  // lists the catalog
    CHECK(run({"generate", "--object", "door", "--frames", "5", "-o", dir / "x.traj"}).code == kExitUsage);
    CHECK(run({"predict", dir / "none.json", "--object", "door"}).code == kExitUsage);
}

TEST_CASE("generate, learn, predict, eval") {
    TempDir dir("flow");
    const std::string demo = dir / "door.traj", db = dir / "models.json";
    Run r = run({"generate", "--object", "door", "--frames", "300", "--seed", "42", "-o", demo});
    REQUIRE(r.code == kExitOk);
    CHECK(fs::exists(demo));
    CHECK(fs::exists(dir / "door.gt"));

    r = run({"learn", demo, "-o", db, "--dump-similarity", dir / "sim.csv"});
    REQUIRE(r.code == kExitOk);
    CHECK(r.out.rfind("2 clusters; edge (0,1): revolute; BIC rigid/prismatic/revolute = ", 0) == 0);
    CHECK(fs::exists(dir / "sim.csv"));
    CHECK(fs::exists(dir / "models.poses.csv"));
    CHECK(load_db(db).at("door").graph.edges.size() == 1);

    // Same object again is a duplicate; --append under a new id is fine.
    CHECK(run({"learn", demo, "-o", db, "--append"}).code == kExitDuplicateObject);
    CHECK(run({"learn", demo, "-o", db, "--append", "--object", "door2"}).code == kExitOk);
    CHECK(load_db(db).size() == 2);

    r = run({"predict", db, "--object", "door", "--sweep", "0:-90:-1", "--deg", "-o", dir / "sweep.csv"});
    REQUIRE(r.code == kExitOk);
    const auto rows = lines(slurp(dir / "sweep.csv"));
    CHECK(rows.size() == 92);
    CHECK(rows[0].rfind("step,q_0-1,", 0) == 0);
    CHECK(rows[0].find("extrapolated") != std::string::npos);

    r = run({"predict", db, "--object", "door", "--sweep", "0:3:1"});
    CHECK(r.code == kExitOk);
    CHECK(r.err.find("outside the observed configuration range") != std::string::npos);
    CHECK(lines(r.out).back().back() == '1');

    CHECK(run({"predict", db, "--object", "toaster", "--sweep", "0:1:1"}).code == kExitUnknownObject);

    r = run({"eval", demo, "--db", db, "--object", "door"});
    CHECK(r.code == kExitOk);
    CHECK(r.out.find("door: 1/1") != std::string::npos);
    r = run({"eval", demo, "--format", "csv"});
    CHECK(r.code == kExitOk);
    CHECK(lines(r.out).size() == 2);

    fs::remove(dir / "door.gt");
    CHECK(run({"eval", demo}).code == kExitUsage);
}

TEST_CASE("segment writes labels") {
    TempDir dir("segment");
    const std::string demo = dir / "drawer.traj";
    REQUIRE(run({"generate", "--object", "drawer", "--frames", "200", "-o", demo}).code == kExitOk);
    const Run r = run({"segment", demo, "-o", dir / "labels.csv", "--poses", dir / "poses.csv"});
    REQUIRE(r.code == kExitOk);
    const auto rows = lines(slurp(dir / "labels.csv"));
    CHECK(rows.front() == "trajectory,cluster");
    CHECK(rows.size() > 50);
    CHECK(fs::exists(dir / "poses.csv"));
}

TEST_CASE("all-static demo exits with too few clusters") {
    TempDir dir("static");
    ObjectSpec s;
    s.name = "block";
    s.parts.push_back({"block", {Face{Vec3(0, 0, 0), Vec3(0.3, 0, 0), Vec3(0, 0.2, 0)}}});
    std::ofstream(dir / "block.json") << object_spec_to_json(s);
    REQUIRE(run({"generate", "--spec", dir / "block.json", "--frames", "100", "-o", dir / "block.traj"}).code ==
            kExitOk);
    const Run r = run({"learn", dir / "block.traj", "-o", dir / "db.json"});
    CHECK(r.code == kExitTooFewClusters);
    CHECK_FALSE(r.err.empty());
}

TEST_CASE("outputs are byte-identical across runs") {
    // Relative paths: the database records the demo path it was learned from.
    TempDir a("det_a"), b("det_b");
    const fs::path home = fs::current_path();
    for (const TempDir* dir : {&a, &b}) {
        fs::current_path(dir->path);
        CHECK(run({"generate", "--object", "laptop", "--frames", "200", "--seed", "9", "-o", "d.traj"}).code == kExitOk);
        CHECK(run({"learn", "d.traj", "-o", "db.json", "--object", "laptop"}).code == kExitOk);
        CHECK(run({"predict", "db.json", "--object", "laptop", "--sweep", "0:1:0.1", "-o", "p.csv"}).code == kExitOk);
        fs::current_path(home);
    }
    for (const char* file : {"d.traj", "d.gt", "db.json", "db.poses.csv", "p.csv"}) {
        CAPTURE(file);
        CHECK(slurp(a.path / file) == slurp(b.path / file));
        CHECK_FALSE(slurp(a.path / file).empty());
    }
}
