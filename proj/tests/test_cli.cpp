#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "kspec/bounds.hpp"
#include "kspec/estimator.hpp"
#include "kspec/io.hpp"

using namespace kspec;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

class Scratch {
public:
    Scratch() : dir_(fs::temp_directory_path() / ("kspec_cli_" + std::to_string(::getpid()))) {
        fs::create_directories(dir_);
    }
    ~Scratch() { fs::remove_all(dir_); }
    std::string write(const std::string& name, const std::string& text) const {
        const fs::path p = dir_ / name;
        std::ofstream(p) << text;
        return p.string();
    }
    std::string path(const std::string& name) const { return (dir_ / name).string(); }

private:
    fs::path dir_;
};

std::string read_all(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("io: parse errors carry positions") {
    try {
        (void)io::parse_text("{\n  \"n\": 2,\n  \"re\": [1,]\n}");
        FAIL("expected ParseError");
    } catch (const io::ParseError& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
    try {
        (void)io::matrix_from_json(json::parse(R"({"n": 2, "re": [[1, 0], [0, "x"]]})"));
        FAIL("expected ParseError");
    } catch (const io::ParseError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("row 1") != std::string::npos);
        CHECK(msg.find("column 1") != std::string::npos);
    }
    CHECK_THROWS_AS(io::matrix_from_json(json::parse(R"({"n": 2, "re": [[1, 0]]})")), io::ParseError);
    CHECK_THROWS_AS(io::disk_from_json(json::parse(R"({"kind": "blob"})")), InvalidInput);
}

TEST_CASE("io: round trips") {
    const Matrix a{{cplx(1.0, 0.5), 2.0}, {0.0, cplx(-1.0, 3.0)}};
    CHECK(io::matrix_from_json(io::matrix_to_json(a)) == a);
    const auto d = SphereDisk::half_plane(0.3, -1.0);
    const auto d2 = io::disk_from_json(io::disk_to_json(d));
    CHECK(std::abs(d2.a() - d.a()) + std::abs(d2.b() - d.b()) + std::abs(d2.c() - d.c()) <= 1e-14);
    const auto f = RationalFunction({1.0, cplx(0.0, 2.0)}, {3.0, 1.0}, -2);
    const auto g = io::rational_from_json(io::rational_to_json(f));
    CHECK(g.numerator() == f.numerator());
    CHECK(g.denominator() == f.denominator());
    CHECK(g.laurent_low() == f.laurent_low());
    CHECK(io::rational_to_json(RationalFunction::constant(1.0))["laurent_low"].is_null());
    CHECK(io::point_to_json(SpherePoint::infinity()) == "inf");
}

TEST_CASE("cli classify") {
    Scratch s;
    const auto d1 = s.write("d1.json", R"({"kind":"disk","center":[0,0],"radius":2})");
    const auto d2 = s.write("d2.json", R"({"kind":"codisk","center":[0,0],"radius":0.5})");
    auto r = run_cli({"classify", d1, d2});
    REQUIRE(r.code == cli::kOk);
    const json j = json::parse(r.out);
    CHECK(j["case"] == "Ring");
    CHECK(j["canonical_R"].get<double>() == doctest::Approx(2.0).epsilon(1e-12));

    r = run_cli({"classify", d1, d1});
    REQUIRE(r.code == cli::kOk);
    CHECK(json::parse(r.out)["case"] == "Identical");

    const auto bad = s.write("bad.json", R"({"kind":"disk", "center": [0,0] "radius": 1})");
    r = run_cli({"classify", bad, d1});
    CHECK(r.code == cli::kUsage);
    CHECK(r.err.find("line 1") != std::string::npos);

    CHECK(run_cli({"classify", s.path("missing.json"), d1}).code == cli::kUsage);

    const json near{{"kind", "disk"}, {"center", {2.0 + 2.0 * 0.37e-6, 0.0}}, {"radius", 1.0}};
    const auto unit = s.write("u.json", R"({"kind":"disk","center":[0,0],"radius":1})");
    const auto n2 = s.write("near.json", near.dump());
    r = run_cli({"classify", unit, n2, "--tol", "1e-6"});
    CHECK(r.code == cli::kAmbiguous);
    const json amb = json::parse(r.out);
    CHECK(amb["candidates"].size() == 2);

    const auto outfile = s.path("report.json");
    CHECK(run_cli({"classify", d1, d2, "-o", outfile}).code == cli::kOk);
    CHECK(json::parse(read_all(outfile))["case"] == "Ring");
}

TEST_CASE("cli certify") {
    Scratch s;
    const auto d = s.write("d.json", R"({"kind":"codisk","center":[0,0],"radius":0.5})");
    const auto m = s.write("m.json", R"({"n":2,"re":[[1,1.5],[0,1]]})");
    auto r = run_cli({"certify", "--disk", d, "--matrix", m});
    REQUIRE(r.code == cli::kOk);
    CHECK(json::parse(r.out)["spectral"] == true);
    const auto h = s.write("h.json", R"({"kind":"halfplane","angle":0,"offset":0})");
    const auto m2 = s.write("m2.json", R"({"n":2,"re":[[-1,3],[0,-1]]})");
    r = run_cli({"certify", "--disk", h, "--matrix", m2});
    REQUIRE(r.code == cli::kOk);
    CHECK(json::parse(r.out)["spectral"] == false);
}

TEST_CASE("cli bounds") {
    auto r = run_cli({"bounds", "--R", "2"});
    REQUIRE(r.code == cli::kOk);
    CHECK(r.out.rfind("R,lower_simple,gamma,upper_new,upper_shields,upper_min\n", 0) == 0);
    CHECK(r.out.find("2,1.6,1.69413785269,3.13389341903,3.29099444874,3.13389341903") != std::string::npos);

    r = run_cli({"bounds", "--R-range", "1.01:10:50"});
    REQUIRE(r.code == cli::kOk);
    std::istringstream lines(r.out);
    std::string line;
    std::getline(lines, line);
    std::vector<std::vector<double>> rows;
    while (std::getline(lines, line)) {
        std::vector<double> vals;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) vals.push_back(std::stod(cell));
        rows.push_back(vals);
    }
    REQUIRE(rows.size() == 50);
    CHECK(rows.front()[0] == doctest::Approx(1.01));
    CHECK(rows.back()[0] == doctest::Approx(10.0));
    for (std::size_t k = 1; k < rows.size(); ++k) {
        CHECK(rows[k][1] > rows[k - 1][1]);
        CHECK(rows[k][3] < rows[k - 1][3]);
    }

    CHECK(run_cli({"bounds", "--R", "0.5"}).code == cli::kUsage);
    CHECK(run_cli({"bounds", "--R-range", "2:1"}).code == cli::kUsage);
    CHECK(run_cli({"bounds"}).code == cli::kUsage);
}

TEST_CASE("cli verify") {
    Scratch s;
    const auto id = s.write("id.json", R"({"n":2,"re":[[1,0],[0,1]]})");
    auto r = run_cli({"verify", id, "--R", "2"});
    REQUIRE(r.code == cli::kOk);
    json j = json::parse(r.out);
    CHECK(j["pass"] == true);
    CHECK(j["k_formula"].get<double>() == doctest::Approx(3.0).epsilon(1e-8));

    // Shrinking the off-diagonal entry keeps both norms just below R.
    Matrix w = estimator::jordan_witness(2.0);
    w(0, 1) *= 1.0 - 1e-6;
    const auto wf = s.write("w.json", io::matrix_to_json(w).dump());
    r = run_cli({"verify", wf, "--R", "2"});
    REQUIRE(r.code == cli::kOk);
    CHECK(json::parse(r.out)["pass"] == true);

    r = run_cli({"verify", "--random", "4", "9", "--R", "1.2"});
    REQUIRE(r.code == cli::kOk);
    CHECK(json::parse(r.out)["pass"] == true);

    const auto big = s.write("big.json", R"({"n":2,"re":[[3,0],[0,1]]})");
    r = run_cli({"verify", big, "--R", "2"});
    CHECK(r.code == cli::kInadmissible);
    CHECK(json::parse(r.out)["error"] == "inadmissible");

    CHECK(run_cli({"verify", id, "--R", "1"}).code == cli::kUsage);
    CHECK(run_cli({"verify", "--R", "2"}).code == cli::kUsage);
    CHECK(run_cli({"verify", id, "--R", "2", "--quad-nodes", "100"}).code == cli::kUsage);
}

TEST_CASE("cli estimate") {
    auto r = run_cli({"estimate", "--R", "2", "--mode", "witness", "--degree", "4", "--budget", "3000"});
    REQUIRE(r.code == cli::kOk);
    json j = json::parse(r.out);
    CHECK(j["ratio"].get<double>() > 1.0);
    CHECK(j["ratio"].get<double>() <= bounds::thm1_upper(2.0) + 1e-6);
    CHECK(j["seed"] == 1);

    r = run_cli({"estimate", "--R", "2", "--mode", "complete", "--trials", "5", "--degree", "2"});
    REQUIRE(r.code == cli::kOk);
    CHECK(json::parse(r.out)["ratio"].get<double>() <= bounds::thm1_upper(2.0) + 1e-6);

    CHECK(run_cli({"estimate", "--R", "2", "--budget", "0"}).code == cli::kUsage);
    CHECK(run_cli({"estimate", "--R", "2", "--mode", "bogus"}).code == cli::kUsage);
    CHECK(run_cli({"estimate", "--R", "0.9"}).code == cli::kUsage);
}

TEST_CASE("cli usage errors") {
    CHECK(run_cli({}).code == cli::kUsage);
    CHECK(run_cli({"frobnicate"}).code == cli::kUsage);
    CHECK(run_cli({"--help"}).code == cli::kOk);
}

TEST_CASE("cli output is deterministic") {
    const std::vector<std::string> est{"estimate", "--R", "2", "--mode", "random", "--n", "3",
                                       "--degree", "3", "--budget", "2000", "--seed", "42"};
    CHECK(run_cli(est).out == run_cli(est).out);
    const std::vector<std::string> ver{"verify", "--random", "3", "5", "--R", "2"};
    CHECK(run_cli(ver).out == run_cli(ver).out);
}
