#include <doctest.h>

#include "vgeo/report_io.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

namespace fs = std::filesystem;

namespace {

std::string bin() {
    const char* b = std::getenv("VGEO_BIN");
    REQUIRE(b != nullptr);
    return b;
}

int run(const std::string& args, const std::string& log) {
    const std::string cmd = bin() + " " + args + " > " + log + " 2>&1";
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path dir;
    TempDir() {
        static int counter = 0;
        dir = fs::temp_directory_path() /
              ("vgeo_cli_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::create_directories(dir);
    }
    ~TempDir() { fs::remove_all(dir); }
    std::string operator/(const std::string& name) const { return (dir / name).string(); }
};

}  // namespace

TEST_CASE("check: parabola-pair super-regularity at eps = 1/3 exits 2 with the witness row") {
    TempDir t;
    const std::string out = t / "verdicts.csv";
    const int rc = run("check --catalog parabola-pair --point 0,0 --property super-regularity "
                       "--eps 0.3333 --radius 0.5 --out " + out,
                       t / "log1");
    CHECK(rc == 2);
    const std::string csv = slurp(out);
    CHECK(csv.find("violated") != std::string::npos);
    // witness x matches the paper family at k = 3
    std::istringstream is(csv);
    std::string header, row;
    std::getline(is, header);
    std::getline(is, row);
    const auto cells = vgeo::split_csv_line(row);
    CHECK(cells[6].substr(0, 8) == "0.333333");
}

TEST_CASE("check: unit-ball with property all exits 0") {
    TempDir t;
    const int rc = run("check --catalog unit-ball --point 1,0 --property all "
                       "--eps 0.25 --radius 0.125 --samples 60 --out " + (t / "ball.csv"),
                       t / "log2");
    CHECK(rc == 0);
}

TEST_CASE("check: malformed JSON spec exits 1 with a byte offset") {
    TempDir t;
    const std::string spec = t / "bad.json";
    std::ofstream(spec) << "{\"kind\": \"preimage\", ";
    const int rc = run("check --spec " + spec + " --point 0,0", t / "log3");
    CHECK(rc == 1);
    const std::string log = slurp(t / "log3");
    CHECK(log.find("byte") != std::string::npos);
}

TEST_CASE("geodesic: circle quarter arc reports length near pi/2") {
    TempDir t;
    const int rc = run("geodesic --catalog unit-circle --from 1,0 --to 0,1 --levels 14 --out " +
                       (t / "geo"), t / "log4");
    CHECK(rc == 0);
    const std::string rep = slurp(t / "geo.json");
    const auto pos = rep.find("\"length\": ");
    REQUIRE(pos != std::string::npos);
    const double len = std::stod(rep.substr(pos + 10));
    CHECK(len == doctest::Approx(1.5707963).epsilon(1e-4));
    // curve CSV parses back
    std::ifstream cf(t / "geo.csv");
    vgeo::SampledCurve c = vgeo::read_curve_csv(cf);
    CHECK(c.size() > 1000);
}

TEST_CASE("path: epigraph spec file achieves the requested eps") {
    TempDir t;
    const std::string spec = t / "epi_x2.json";
    std::ofstream(spec) << R"({
        "kind": "preimage", "dim": 2, "F": ["x1^2 - x2"],
        "D": {"kind": "box", "lo": [-1e308], "hi": [0]},
        "center": [0, 0], "radius": 2.0, "name": "epi-x2"})";
    const int rc = run("path --spec " + spec +
                       " --from -0.1,0.01 --to 0.1,0.01 --eps 0.1 --out " + (t / "p"),
                       t / "log5");
    CHECK(rc == 0);
    const std::string rep = slurp(t / "p.json");
    const auto pos = rep.find("\"achieved\": ");
    REQUIRE(pos != std::string::npos);
    CHECK(std::stod(rep.substr(pos + 12)) <= 0.1);
}

TEST_CASE("descend: power32 objective x1 reports a negative slope") {
    TempDir t;
    const int rc = run("descend --catalog power32-graph --point 0,0 --objective x1 --out " +
                       (t / "d"), t / "log6");
    CHECK(rc == 0);
    const std::string rep = slurp(t / "d.json");
    const auto pos = rep.find("\"measured_slope\": ");
    REQUIRE(pos != std::string::npos);
    CHECK(std::stod(rep.substr(pos + 18)) < 0.0);
}

TEST_CASE("report: merges and deduplicates verdict CSVs; empty dir exits 1") {
    TempDir t;
    run("check --catalog parabola-pair --point 0,0 --property super-regularity "
        "--eps 0.3333 --radius 0.5 --out " + (t / "a.csv"), t / "log7");
    run("check --catalog parabola-pair --point 0,0 --property clarke-regularity --out " +
        (t / "b.csv"), t / "log8");
    // duplicate of a.csv
    fs::copy_file(t / "a.csv", t / "c.csv");
    const int rc = run("report --in " + t.dir.string() + " --out " + (t / "merged.csv"),
                       t / "log9");
    CHECK(rc == 0);
    std::ifstream merged(t / "merged.csv");
    int rows = 0;
    std::string line;
    std::getline(merged, line);   // header
    while (std::getline(merged, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 2);   // dedup collapsed the copy

    TempDir empty;
    CHECK(run("report --in " + empty.dir.string() + " --out " + (empty / "m.csv"),
              t / "log10") == 1);
}

TEST_CASE("determinism: same seed gives byte-identical CSV output") {
    TempDir t;
    for (int pass = 0; pass < 2; ++pass) {
        run("check --catalog parabola-pair --point 0,0 "
            "--property super-regularity,intrinsic-approx-convexity,prox-regularity "
            "--eps 0.5,0.25 --radius 0.25 --seed 42 --out " + (t / ("run" + std::to_string(pass) + ".csv")),
            t / "log_det");
    }
    CHECK(slurp(t / "run0.csv") == slurp(t / "run1.csv"));
    CHECK(!slurp(t / "run0.csv").empty());
}
