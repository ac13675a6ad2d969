#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "insitu/catalog.hpp"
#include "insitu/editor.hpp"
#include "insitu/generators.hpp"
#include "insitu/json_io.hpp"

using namespace insitu;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class Workdir {
public:
    Workdir() {
        std::random_device rd;
        dir_ = fs::temp_directory_path() / ("insitu_cli_" + std::to_string(rd()));
        fs::create_directories(dir_);
    }
    ~Workdir() { fs::remove_all(dir_); }
    fs::path operator/(const std::string& name) const { return dir_ / name; }

    Outcome run(const std::string& args) const {
        const auto out = dir_ / "stdout.txt", err = dir_ / "stderr.txt";
        const std::string cmd =
            std::string("'") + INSITU_CLI_PATH + "' " + args + " >'" + out.string() + "' 2>'" + err.string() + "'";
        const int status = std::system(cmd.c_str());
        REQUIRE(WIFEXITED(status));
        return {WEXITSTATUS(status), slurp(out), slurp(err)};
    }

private:
    fs::path dir_;
};

std::string source(const std::string& rel) { return std::string("'") + INSITU_SOURCE_DIR + "/" + rel + "'"; }

}  // namespace

TEST_CASE("cli: list-designs") {
    Workdir w;
    const auto r = w.run("list-designs --json");
    CHECK(r.code == 0);
    const auto rows = Json::parse(r.out);
    REQUIRE(rows.size() == 15);
    for (const auto& row : rows) CHECK(row["parameters"] == builtin_design(row["id"].get<std::string>()).parameters.size());
    const auto text = w.run("list-designs");
    CHECK(text.code == 0);
    CHECK(text.out.find("bookholder") != std::string::npos);
}

TEST_CASE("cli: generate writes the same STL as the library") {
    Workdir w;
    const auto path = w / "b.stl";
    const auto r = w.run("generate --design bookholder --out '" + path.string() + "'");
    CHECK(r.code == 0);
    const auto& d = builtin_design("bookholder");
    const std::string bytes = slurp(path);
    CHECK(bytes == export_stl(generate_mesh(d, default_configuration(d))));

    const auto bench = w / "bench.stl";
    CHECK(w.run("generate --design bench --set width=1.5 --set armrest_height=0.7 --out '" + bench.string() + "'").code ==
          0);
    const auto& bd = builtin_design("bench");
    const auto config = assign_values(bd, default_configuration(bd), {{"width", 1.5}, {"armrest_height", 0.7}});
    CHECK(slurp(bench) == export_stl(generate_mesh(bd, config)));
}

TEST_CASE("cli: exit codes") {
    Workdir w;
    SUBCASE("relative constraint violation") {
        const auto r = w.run("generate --design bench --set armrest_depth=0.6 --set seat_depth=0.5 --out '" +
                             (w / "x.stl").string() + "'");
        CHECK(r.code == 2);
        CHECK(r.err.find("armrest_depth") != std::string::npos);
        CHECK(r.err.find("seat_depth") != std::string::npos);
        CHECK_FALSE(fs::exists(w / "x.stl"));
    }
    SUBCASE("requirement failure") {
        const auto r = w.run("check --design lampshade_tulip --set height=0.45 --requirements " +
                             source("data/tasks/lampshade_l1.json"));
        CHECK(r.code == 4);
        CHECK(r.out.find("FAIL") != std::string::npos);
        CHECK(r.out.find("0.45") != std::string::npos);
        const auto ok = w.run("check --design lampshade_tulip --requirements " + source("data/tasks/lampshade_l1.json"));
        CHECK(ok.code == 0);
    }
    SUBCASE("stability verdicts") {
        const auto room = source("data/tasks/study_room.obj");
        const auto tipped = w.run("estimate stability --design lampshade_tulip --position -2,0.55,-2 --tilt 5 --env " + room);
        CHECK(tipped.code == 3);
        const auto stands = w.run(
            "estimate stability --design lampshade_tulip --set base_diameter=0.2 --position -2,0.55,-2 --tilt 5 --json "
            "--env " +
            room);
        CHECK(stands.code == 0);
        CHECK(Json::parse(stands.out)["toppled"] == false);
    }
    SUBCASE("lighting writes a raster") {
        const auto raster = w / "shadow.pgm";
        const auto r = w.run("estimate lighting --design vase_classic --env " + source("data/tasks/study_room.obj") +
                             " --light 0,2,0 --raster '" + raster.string() + "'");
        CHECK(r.code == 0);
        CHECK(slurp(raster).rfind("P5", 0) == 0);
    }
    SUBCASE("I/O and parse errors") {
        CHECK(w.run("generate --design sofa --out '" + (w / "s.stl").string() + "'").code == 1);
        CHECK(w.run("generate --design bench --set width --out '" + (w / "s.stl").string() + "'").code == 1);
        CHECK(w.run("generate --design bench --set width=abc --out '" + (w / "s.stl").string() + "'").code == 1);
        CHECK(w.run("generate --design bench --out /nonexistent/dir/s.stl").code == 1);
        const auto missing = w.run("check --design bench --requirements /nonexistent.json");
        CHECK(missing.code == 1);
        CHECK(missing.err.find("error") != std::string::npos);
        CHECK(w.run("frobnicate").code == 1);
    }
}
