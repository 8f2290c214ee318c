#include "doctest.h"
#include "support.hpp"

#include "cornn/harness.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

struct Result {
    int status = -1;
    std::string out;
};

Result cli(const std::string& args, const fs::path& scratch) {
    const fs::path capture = scratch / "stdout.txt";
    const std::string cmd = std::string("\"") + CORNN_CLI_PATH + "\" " + args + " > \"" +
                            capture.string() + "\" 2> \"" + (scratch / "stderr.txt").string() + "\"";
    const int raw = std::system(cmd.c_str());
    std::ifstream in(capture);
    std::stringstream ss;
    ss << in.rdbuf();
    return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, ss.str()};
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) out.push_back(cell);
    return out;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

} // namespace

TEST_CASE("list") {
    cornn::test::TempDir dir("cli-list");
    auto r = cli("list --instances", dir.path());
    CHECK(r.status == 0);
    CHECK(lines(r.out).size() == 325);

    r = cli("list --topologies", dir.path());
    CHECK(r.status == 0);
    const auto topo = lines(r.out);
    REQUIRE(topo.size() == 7);
    CHECK(topo[1] == "Tanh1,Tanh,1,10,41");
    CHECK(topo[6] == "ReLU5,ReLU,5,10,481");

    r = cli("list --functions", dir.path());
    CHECK(r.status == 0);
    for (const char* row : {"\n20,Easom,", "\n26,Himmelblau,", "\n34,Periodic,", "\n43,Schwefel 2.22,"}) {
        CHECK(r.out.find(row) != std::string::npos);
    }

    CHECK(cli("list", dir.path()).status == 1);
    CHECK(cli("list --functions --seeds", dir.path()).status == 1);
    CHECK(cli("frobnicate", dir.path()).status == 1);
}

TEST_CASE("gen-data") {
    cornn::test::TempDir dir("cli-gen");
    const auto a = dir / "a", b = dir / "b";
    CHECK(cli("gen-data --function 20 --out \"" + a.string() + "\"", dir.path()).status == 0);
    CHECK(cli("gen-data --function 20 --out \"" + b.string() + "\"", dir.path()).status == 0);
    const auto text = slurp(a / "f20_Easom.csv");
    CHECK(text == slurp(b / "f20_Easom.csv"));
    const auto rows = lines(text);
    CHECK(rows.size() == 5001);
    CHECK(std::count_if(rows.begin(), rows.end(), [](const auto& l) { return l.ends_with(",train"); }) == 3750);
    CHECK(fs::exists(a / "f20_Easom.scaling.json"));

    CHECK(cli("gen-data --function 20 --seed 5 --out \"" + b.string() + "\"", dir.path()).status == 0);
    CHECK(slurp(b / "f20_Easom.csv") != text);
    CHECK(cli("gen-data --function 77 --out \"" + a.string() + "\"", dir.path()).status == 1);
}

TEST_CASE("run, score, summarize, baseline") {
    cornn::test::TempDir dir("cli-run");
    const auto plan = dir / "plan.yaml";
    write(plan, "instances: [f20/Tanh1, f26/Tanh1]\n"
                "algorithms: [PSO, DE, Adam]\n"
                "repetitions: 3\nbudget: 50\nstride: 10\nmaster_seed: 4\n");
    const auto s1 = dir / "s1", s4 = dir / "s4";
    CHECK(cli("run --plan \"" + plan.string() + "\" --out \"" + s1.string() + "\"", dir.path()).status == 0);
    CHECK(cli("run --plan \"" + plan.string() + "\" --out \"" + s4.string() + "\" --parallel 4", dir.path())
              .status == 0);
    const auto store = cornn::load_store(s1);
    CHECK(store.complete());
    CHECK(store.runs.size() == 18);
    CHECK(store == cornn::load_store(s4));

    // score
    const auto traj = dir / "traj";
    CHECK(cli("score --store \"" + s1.string() + "\" --trajectory-dir \"" + traj.string() + "\"", dir.path())
              .status == 0);
    const auto score_rows = lines(slurp(s1 / "scores.csv"));
    CHECK(score_rows.size() == 1 + 2 * 6 * 3);
    for (std::size_t i = 1; i < score_rows.size(); ++i) {
        const double v = std::stod(split(score_rows[i]).at(5));
        CHECK((v >= 0.0 && v <= 1.0));
    }
    CHECK(fs::exists(traj / "trajectory_Tanh1.csv"));

    // summarize: recompute the means from the stored runs
    CHECK(cli("summarize --store \"" + s1.string() + "\"", dir.path()).status == 0);
    const auto summary = lines(slurp(s1 / "summary.csv"));
    CHECK(summary.size() == 1 + 2 * 3);
    for (std::size_t i = 1; i < summary.size(); ++i) {
        const auto cells = split(summary[i]);
        const auto alg = cornn::parse_algorithm(cells.at(2));
        double sum = 0.0;
        for (std::size_t r = 0; r < 3; ++r) sum += store.find(cells.at(0), alg, r)->final_test_mse();
        CHECK(std::stod(cells.at(3)) == doctest::Approx(sum / 3.0).epsilon(1e-14));
    }

    // baseline: long format, ordered by the median difference
    CHECK(cli("baseline --store \"" + s1.string() + "\" --topology Tanh1", dir.path()).status == 0);
    const auto base = lines(slurp(s1 / "baseline.csv"));
    REQUIRE(base.size() > 1);
    const auto header = split(base[0]);
    const auto col = std::find(header.begin(), header.end(), "median_difference") - header.begin();
    double prev = -1e300;
    for (std::size_t i = 1; i < base.size(); ++i) {
        const double d = std::stod(split(base[i]).at(static_cast<std::size_t>(col)));
        CHECK(d >= prev);
        prev = d;
    }
}

TEST_CASE("bad plans and stores") {
    cornn::test::TempDir dir("cli-bad");
    const auto plan = dir / "plan.yaml";
    write(plan, "instances: [f20/Tanh1]\nalgorithms: [PSO, Hillclimb]\nrepetitions: 2\nbudget: 5\n");
    CHECK(cli("run --plan \"" + plan.string() + "\" --out \"" + (dir / "s").string() + "\"", dir.path())
              .status == 1);
    CHECK(cli("run --plan \"" + (dir / "missing.yaml").string() + "\"", dir.path()).status == 1);
    CHECK(cli("score --store \"" + (dir / "nowhere").string() + "\"", dir.path()).status == 2);

    write(plan, "instances: [f20/Tanh1]\nalgorithms: [PSO, DE]\nrepetitions: 2\nbudget: 5\nstride: 5\n");
    const auto s = dir / "s";
    REQUIRE(cli("run --plan \"" + plan.string() + "\" --out \"" + s.string() + "\"", dir.path()).status == 0);
    fs::remove(s / "runs" / (cornn::cell_stem("f20/Tanh1", cornn::Algorithm::DE, 1) + ".json"));
    CHECK(cli("score --store \"" + s.string() + "\"", dir.path()).status == 2);
    CHECK(cli("score --store \"" + s.string() + "\" --force", dir.path()).status == 0);
}
