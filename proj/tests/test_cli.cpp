#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

#include "clca/sweep.hpp"
#include "helpers.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
    int code = -1;
    std::string out;
};

Result run(const std::string& args) {
    const std::string cmd = std::string(CLCA_CLI_PATH) + " " + args + " 2>&1";
    Result r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buf{};
    while (std::fgets(buf.data(), buf.size(), pipe)) r.out += buf.data();
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

fs::path write_config(const fs::path& dir, const nlohmann::json& raw) {
    const auto p = dir / "config.json";
    std::ofstream(p) << raw.dump(2);
    return p;
}

const std::string kDefault = CLCA_DEFAULT_CONFIG;

}  // namespace

TEST_CASE("validate accepts the shipped config") {
    const auto r = run("validate " + kDefault);
    CHECK(r.code == 0);
    CHECK(r.out.find("mu_in_max") != std::string::npos);
}

TEST_CASE("validate prints bounds for every V including z_max = 378 at 750") {
    const auto r = run("validate --print-bounds " + kDefault);
    CHECK(r.code == 0);
    CHECK(r.out.find("V=750 node=A session=1 z_max=378 ") != std::string::npos);
}

TEST_CASE("validate rejects epsilon above D_max") {
    TempDir dir("clca_cli_eps");
    auto raw = clca::test::line_config();
    raw["sessions"][0]["epsilon"] = 12;
    const auto r = run("validate " + write_config(dir.path, raw).string());
    CHECK(r.code == 1);
    CHECK(r.out.find("sessions[0].epsilon") != std::string::npos);
}

TEST_CASE("validate reports parse errors with a position") {
    TempDir dir("clca_cli_parse");
    const auto p = dir.path / "bad.json";
    std::ofstream(p) << "{\n  \"params\": {\n    \"R_max\": ,\n  }\n}\n";
    const auto r = run("validate " + p.string());
    CHECK(r.code == 1);
    CHECK(r.out.find("line 3") != std::string::npos);
}

TEST_CASE("validate fails on a missing file") {
    CHECK(run("validate /nonexistent/config.json").code == 1);
}

TEST_CASE("simulate with one slot appends one row") {
    TempDir dir("clca_cli_one");
    const auto r = run("simulate " + kDefault + " --slots 1 --out-dir " + dir.path.string());
    CHECK(r.code == 0);
    const auto rows = clca::read_summary(dir.path / "sweep_summary.csv");
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].V == 750.0);
    CHECK(rows[0].seed == 1);
    CHECK(run("simulate " + kDefault + " --slots 1 --algo neely --out-dir " + dir.path.string()).code == 0);
    CHECK(clca::read_summary(dir.path / "sweep_summary.csv").size() == 2);
}

TEST_CASE("simulate writes a trace with one row per slot, node and session") {
    TempDir dir("clca_cli_trace");
    const auto r = run("simulate " + kDefault + " --slots 3 --trace --out-dir " + dir.path.string());
    CHECK(r.code == 0);
    const std::string text = slurp(dir.path / "trace.csv");
    CHECK(text.rfind("t,n,f,Q,Qtilde,Z,E,bcd_sweeps,bcd_grad_norm\n", 0) == 0);
    const auto lines = std::count(text.begin(), text.end(), '\n');
    CHECK(lines == 1 + 3 * 13 * 8);
}

TEST_CASE("strict simulate exits 2 on a violation") {
    TempDir dir("clca_cli_strict");
    const auto r = run("simulate " + kDefault + " --v 50 --slots 3000 --strict-invariants --out-dir " +
                       dir.path.string());
    CHECK(r.code == 2);
    CHECK(r.out.find("invariant violation: slot") != std::string::npos);
}

TEST_CASE("bad flags exit 1") {
    CHECK(run("simulate " + kDefault + " --algo other").code == 1);
    CHECK(run("simulate " + kDefault + " --v -3 --slots 1").code == 1);
    CHECK(run("").code == 1);
}

TEST_CASE("sweep output does not depend on the thread count") {
    TempDir dir("clca_cli_sweep");
    const auto cfg = write_config(dir.path, clca::test::line_config());
    const auto a = dir.path / "a", b = dir.path / "b";
    CHECK(run("sweep " + cfg.string() + " --parallel 1 --out-dir " + a.string()).code == 0);
    CHECK(run("sweep " + cfg.string() + " --parallel 4 --out-dir " + b.string()).code == 0);
    const auto sa = slurp(a / "sweep_summary.csv");
    CHECK(sa == slurp(b / "sweep_summary.csv"));
    CHECK(clca::read_summary(a / "sweep_summary.csv").size() == 8);
}

TEST_CASE("single-V sweep") {
    TempDir dir("clca_cli_single");
    auto raw = clca::test::line_config();
    raw["sweep"]["v_grid"] = {50};
    const auto cfg = write_config(dir.path, raw);
    CHECK(run("sweep " + cfg.string() + " --out-dir " + dir.path.string()).code == 0);
    const auto rep = run("report " + (dir.path / "sweep_summary.csv").string());
    CHECK(rep.out.find("SKIPPED  phi_bar non-decreasing") != std::string::npos);
}

TEST_CASE("report rejects malformed CSV") {
    TempDir dir("clca_cli_badcsv");
    const auto p = dir.path / "s.csv";
    std::ofstream(p) << clca::kSummaryHeader << "\n1,2,3\n";
    const auto r = run("report " + p.string());
    CHECK(r.code == 1);
    CHECK(r.out.find("line 2") != std::string::npos);
    CHECK(run("report " + (dir.path / "missing.csv").string()).code == 1);
}

TEST_CASE("report exits 0 only when no verdict fails") {
    TempDir dir("clca_cli_report");
    const auto p = dir.path / "s.csv";
    std::vector<clca::SummaryRow> rows;
    for (double V : {50.0, 150.0, 350.0}) {
        clca::SummaryRow r;
        r.V = V;
        r.seed = 1;
        r.phi_bar = 1.0 - 10.0 / V;
        r.avg_Q = V;
        rows.push_back(r);
    }
    clca::write_summary(p, rows, false);
    const auto ok = run("report " + p.string());
    CHECK(ok.code == 0);
    CHECK(ok.out.find("PASS     phi_bar non-decreasing") != std::string::npos);
    rows[2].phi_bar = -5.0;
    clca::write_summary(p, rows, false);
    const auto bad = run("report " + p.string());
    CHECK(bad.code == 4);
    CHECK(bad.out.find("FAIL     phi_bar non-decreasing") != std::string::npos);
}
