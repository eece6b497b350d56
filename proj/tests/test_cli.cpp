#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "pqs/artifacts.hpp"
#include "pqs/runner.hpp"

using namespace pqs;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "pqs_cli_tests" / name;
    fs::remove_all(dir);
    return dir;
}

KeyTree base_tree(const fs::path& out) {
    KeyTree t = KeyTree::parse_text(
        "[problem]\np = 2\nq = 2\ndelta = 1\nbeta = 0\nc_f = 1\ndomain = interval\nlength = 2\n"
        "[mesh]\nn = 64\ngrading = 1\n");
    t.set("output.dir", out.string());
    return t;
}

json read_json(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    return json::parse(in);
}

}  // namespace

TEST_CASE("key tree parsing, overrides, and rejects") {
    KeyTree t = KeyTree::parse_text("[problem]\np = 3 # inline comment\n\n[mesh]\nn=16\n");
    CHECK(t.get_double("problem.p", 0.0) == 3.0);
    CHECK(t.get_int("mesh.n", 0) == 16);
    t.set("problem.p", "2.5");  // override wins
    CHECK(t.get_double("problem.p", 0.0) == 2.5);
    CHECK(t.get_string("missing.key", "dflt") == "dflt");

    CHECK_THROWS_AS(KeyTree::parse_text("novalue\n"), std::invalid_argument);
    CHECK_THROWS_AS(KeyTree::parse_text("[open\nk=v\n"), std::invalid_argument);
    KeyTree bad = KeyTree::parse_text("[solver]\nnewton_tol = abc\n");
    CHECK_THROWS_AS(bad.get_double("solver.newton_tol", 1.0), std::invalid_argument);

    KeyTree off = KeyTree::parse_text("[run]\ndeterministic = off\n");
    CHECK_THROWS_AS(RunConfig::from_tree(off), std::invalid_argument);
}

TEST_CASE("oracle-torsion run writes the closed form to csv within 1e-10") {
    const fs::path out = fresh_dir("torsion");
    KeyTree t = base_tree(out);
    t.set("oracle.rho", "1");
    std::ostringstream log;
    REQUIRE(run_command("oracle-torsion", RunConfig::from_tree(t), log) == kExitPass);

    std::ifstream csv(out / "fields/torsion_oracle.csv");
    REQUIRE(csv.good());
    std::string line;
    std::getline(csv, line);
    CHECK(line == "index,x,d,u");
    int rows = 0;
    while (std::getline(csv, line)) {
        std::istringstream ss(line);
        std::string idx, xs, ds, us;
        std::getline(ss, idx, ',');
        std::getline(ss, xs, ',');
        std::getline(ss, ds, ',');
        std::getline(ss, us, ',');
        const double x = std::stod(xs) - 1.0;
        CHECK(std::fabs(std::stod(us) - 0.25 * (1.0 - x * x)) <= 1e-10);
        ++rows;
    }
    CHECK(rows == 65);

    const json verdict = read_json(out / "verdicts/oracle_torsion.json");
    CHECK(verdict.at("pass").get<bool>());
}

TEST_CASE("solve at beta = p exits with a config error and a json record") {
    const fs::path out = fresh_dir("betap");
    KeyTree t = base_tree(out);
    t.set("problem.beta", "2");  // equal to p
    t.set("solve.eps", "1e-3");
    std::ostringstream log;
    CHECK(run_command("solve", RunConfig::from_tree(t), log) == kExitError);
    const json err = read_json(out / "error.json");
    const std::string msg = err.at("error").get<std::string>();
    CHECK(msg.find("beta") != std::string::npos);
}

TEST_CASE("unknown command errors out") {
    const fs::path out = fresh_dir("unknown");
    std::ostringstream log;
    CHECK(run_command("frobnicate", RunConfig::from_tree(base_tree(out)), log) == kExitError);
}

TEST_CASE("continuation run: trace rows, plot bundle, manifest completeness") {
    const fs::path out = fresh_dir("continue");
    KeyTree t = base_tree(out);
    t.set("problem.p", "3");
    t.set("problem.q", "2");
    t.set("problem.beta", "1");
    t.set("problem.length", "1");
    t.set("mesh.n", "128");
    t.set("mesh.grading", "3");
    t.set("continuation.eps0", "1e-2");
    t.set("continuation.ratio", "0.1");
    t.set("continuation.steps", "4");
    std::ostringstream log;
    REQUIRE(run_command("continue", RunConfig::from_tree(t), log) == kExitPass);

    const json trace = read_json(out / "traces/continuation.json");
    CHECK(trace.size() == 5);

    // continuation plot series: one row per eps level plus the header
    std::ifstream plot(out / "plotdata/continuation_series.csv");
    REQUIRE(plot.good());
    std::string line;
    int rows = -1;
    while (std::getline(plot, line)) ++rows;
    CHECK(rows == 5);

    // every file in the tree is listed exactly once in the manifest
    const json manifest = read_json(out / "manifest.json");
    std::vector<std::string> listed = manifest.at("outputs").get<std::vector<std::string>>();
    std::sort(listed.begin(), listed.end());
    CHECK(std::adjacent_find(listed.begin(), listed.end()) == listed.end());
    std::vector<std::string> present;
    for (const auto& entry : fs::recursive_directory_iterator(out))
        if (entry.is_regular_file())
            present.push_back(fs::relative(entry.path(), out).generic_string());
    std::sort(present.begin(), present.end());
    CHECK(listed == present);
}

TEST_CASE("probe-sobolev emits one ratio row per (rho, level)") {
    const fs::path out = fresh_dir("sobolev");
    KeyTree t = base_tree(out);
    t.set("problem.q", "1.5");
    t.set("problem.delta", "0.5");
    t.set("mesh.grading", "1");
    t.set("probe.levels", "16,32,64");
    t.set("probe.rho_list", "1.0,1.5");
    t.set("probe.eps", "1e-2");
    std::ostringstream log;
    REQUIRE(run_command("probe-sobolev", RunConfig::from_tree(t), log) == kExitPass);

    std::ifstream plot(out / "plotdata/sobolev_series.csv");
    REQUIRE(plot.good());
    std::string line;
    int rows = -1;
    while (std::getline(plot, line)) ++rows;
    CHECK(rows == 6);
}

TEST_CASE("plot bundle on an empty directory reports warnings only") {
    const fs::path out = fresh_dir("emptyplot");
    fs::create_directories(out);
    const PlotBundle bundle = emit_plot_data(out);
    CHECK(bundle.written.empty());
    CHECK(bundle.warnings.size() >= 3);
}

TEST_CASE("a non-empty output directory is versioned, not reused") {
    const fs::path out = fresh_dir("versioned");
    fs::create_directories(out);
    std::ofstream(out / "existing.txt") << "keep me\n";
    KeyTree t = base_tree(out);
    t.set("oracle.rho", "1");
    t.set("oracle.check_solver", "false");
    std::ostringstream log;
    REQUIRE(run_command("oracle-torsion", RunConfig::from_tree(t), log) == kExitPass);
    CHECK(fs::exists(out / "existing.txt"));
    CHECK(fs::exists(out.string() + "-1"));
}
