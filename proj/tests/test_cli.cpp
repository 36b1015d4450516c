#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"

namespace {

std::string bin_path() {
    const char* bin = std::getenv("QSLSIM_BIN");
    if (!bin || !*bin) throw std::runtime_error("QSLSIM_BIN is not set");
    return bin;
}

struct RunResult {
    int code = -1;
    std::string out;
};

RunResult run_cli(const std::string& args, bool merge_stderr = false) {
    const std::string cmd =
        "'" + bin_path() + "' " + args + (merge_stderr ? " 2>&1" : " 2>/dev/null");
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) throw std::runtime_error("popen failed");
    RunResult r;
    char buf[4096];
    size_t n = 0;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::filesystem::path scratch() {
    const auto dir = std::filesystem::temp_directory_path() / "qslsim_cli_scratch";
    std::filesystem::create_directories(dir);
    return dir;
}

std::string write_scratch(const std::string& name, const std::string& text) {
    const auto path = scratch() / name;
    std::ofstream out(path, std::ios::binary);
    out << text;
    return path.string();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::vector<std::string> split_lines(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string line;
    while (std::getline(in, line)) out.push_back(line);
    return out;
}

std::string first_cell(const std::string& line) { return line.substr(0, line.find(',')); }

const std::string kCommon = "--beta 2 --state 0.3,0,0.4";

}  // namespace

TEST_CASE("usage errors exit with 2") {
    CHECK(run_cli("", true).code == 2);
    CHECK(run_cli("frobnicate", true).code == 2);
    CHECK(run_cli("sweep --profile const " + kCommon, true).code == 2);  // no --grid
    CHECK(run_cli("sweep --profile const --grid '' " + kCommon, true).code == 2);
    CHECK(run_cli("qsl --profile const:gamma0=1 " + kCommon + " --eps 2", true).code == 2);
    CHECK(run_cli("classify --profile const:gamma0=nope " + kCommon, true).code == 2);
}

TEST_CASE("help exits clean") {
    const RunResult r = run_cli("--help");
    CHECK(r.code == 0);
    CHECK(r.out.find("simulate") != std::string::npos);
    CHECK(r.out.find("validate") != std::string::npos);
}

TEST_CASE("classify prints a JSON verdict") {
    const RunResult m = run_cli("classify --profile jc:lambda=1,gamma0=0.25 " + kCommon);
    REQUIRE(m.code == 0);
    const auto doc = nlohmann::json::parse(m.out);
    CHECK(doc.at("markovian").get<bool>());
    CHECK(doc.at("class").get<std::string>() == "MARKOV");

    const RunResult b = run_cli("classify --profile cos:zeta=1,omega=2 " + kCommon);
    REQUIRE(b.code == 0);
    const auto doc2 = nlohmann::json::parse(b.out);
    CHECK_FALSE(doc2.at("markovian").get<bool>());
    CHECK(doc2.at("class").get<std::string>() == "CLASS_B");
    CHECK(doc2.at("t_fixed_point").is_null());

    // --seed is accepted and changes nothing
    const RunResult seeded =
        run_cli("classify --profile jc:lambda=1,gamma0=0.25 " + kCommon + " --seed 7");
    CHECK(seeded.out == m.out);
}

TEST_CASE("qsl reports the speedup ratio") {
    const RunResult r =
        run_cli("qsl --profile cos:zeta=1,omega=0 " + kCommon + " --eps 0.01 --strategy cool");
    REQUIRE(r.code == 0);
    const auto doc = nlohmann::json::parse(r.out);
    CHECK(doc.at("t_free").get<double>() == doctest::Approx(1.67559461).epsilon(1e-5));
    CHECK(doc.at("t_qsl").get<double>() == doctest::Approx(0.492827357).epsilon(1e-5));
    CHECK(doc.at("R").get<double>() == doctest::Approx(3.39996266).epsilon(1e-5));
    CHECK_FALSE(doc.at("bound_only").get<bool>());
}

TEST_CASE("qsl free on a saturating profile leaves the benchmark empty") {
    const RunResult r =
        run_cli("qsl --profile cos:zeta=1,omega=2 " + kCommon + " --strategy free");
    REQUIRE(r.code == 0);
    const auto doc = nlohmann::json::parse(r.out);
    CHECK(doc.at("t_free").is_null());
    CHECK(doc.at("R").is_null());
}

TEST_CASE("qsl --out writes a one-row report") {
    const std::string out = (scratch() / "one_row.csv").string();
    const RunResult r =
        run_cli("qsl --profile const:gamma0=1 " + kCommon + " --strategy cool --out " + out);
    REQUIRE(r.code == 0);
    const auto lines = split_lines(read_file(out));
    REQUIRE(lines.size() == 2);
    CHECK(lines[0] ==
          "lambda,gamma0,omega,beta,eps,class,markovian,t_free,t_qsl,R,analytic_exact,"
          "analytic_paper,rel_dev_exact,rel_dev_paper,bound_only");
    CHECK(lines[1].find("MARKOV") != std::string::npos);
}

TEST_CASE("simulate emits the trajectory CSV") {
    const RunResult r = run_cli("simulate --profile const:gamma0=1 " + kCommon +
                                " --horizon 1 --dt-sample 0.5");
    REQUIRE(r.code == 0);
    const auto lines = split_lines(r.out);
    REQUIRE(lines.size() == 4);
    CHECK(lines[0] == "t,rx,ry,rz,d,P,gamma,Lambda");
    CHECK(first_cell(lines[1]) == "0");
    CHECK(first_cell(lines[3]) == "1");
}

TEST_CASE("domain violations exit with 3") {
    // Horizon reaches past the divergence of the rate.
    CHECK(run_cli("simulate --profile jc:lambda=0.01,gamma0=100 " + kCommon + " --horizon 3",
                  true)
              .code == 3);
    // Heating from inside the stationary radius.
    CHECK(run_cli("qsl --profile const:gamma0=1 " + kCommon + " --strategy heat", true).code ==
          3);
}

TEST_CASE("sweep emits the status column and is thread-count invariant") {
    const std::string args = "sweep --profile const --grid gamma0=1:10:log3 " + kCommon;
    const RunResult one = run_cli(args);
    REQUIRE(one.code == 0);
    const auto lines = split_lines(one.out);
    REQUIRE(lines.size() == 4);
    CHECK(lines[0].find(",bound_only,status") != std::string::npos);

    double r_min = 1e300, r_max = -1e300;
    for (int i = 1; i <= 3; ++i) {
        CHECK(lines[i].substr(lines[i].size() - 3) == ",ok");
        std::istringstream cells(lines[i]);
        std::string cell;
        for (int k = 0; k <= 9; ++k) std::getline(cells, cell, ',');
        const double ratio = std::stod(cell);
        r_min = std::min(r_min, ratio);
        r_max = std::max(r_max, ratio);
    }
    // For a constant rate the ratio is scale-free in gamma0.
    CHECK(r_min == doctest::Approx(2.0889).epsilon(1e-3));
    CHECK(r_max - r_min < 1e-9);

    const RunResult four = run_cli(args + " --threads 4");
    CHECK(four.out == one.out);
}

TEST_CASE("a sweep with zero surviving rows exits with 1") {
    const RunResult r = run_cli(
        "sweep --profile jc --grid lambda=4:8:lin2 --gamma0 1 --strategy flip " + kCommon, true);
    CHECK(r.code == 1);
    CHECK(r.out.find("lambda,") != std::string::npos);  // CSV still printed
    CHECK(r.out.find("every grid point failed") != std::string::npos);
}

TEST_CASE("config files feed flags, flags win") {
    const std::string cfg = write_scratch("qsl.cfg",
                                          "profile=const:gamma0=1\n"
                                          "beta=2\n"
                                          "state=0.3,0,0.4\n"
                                          "eps=0.05\n");
    const RunResult from_cfg = run_cli("qsl --config " + cfg);
    const RunResult from_flags =
        run_cli("qsl --profile const:gamma0=1 --beta 2 --state 0.3,0,0.4 --eps 0.05");
    REQUIRE(from_cfg.code == 0);
    CHECK(from_cfg.out == from_flags.out);

    const RunResult overridden = run_cli("qsl --config " + cfg + " --eps 0.01");
    const RunResult tight =
        run_cli("qsl --profile const:gamma0=1 --beta 2 --state 0.3,0,0.4 --eps 0.01");
    CHECK(overridden.out == tight.out);
    CHECK(overridden.out != from_cfg.out);
}

TEST_CASE("schedule replay drives simulate") {
    const std::string sched = write_scratch(
        "flip.json",
        R"({"events":[{"t":0.5,"type":"pulse","axis":[0,1,0],"angle":3.141592653589793},)"
        R"({"t":1,"type":"segment_end"}]})");
    const RunResult r =
        run_cli("simulate --profile const:gamma0=1 " + kCommon + " --schedule " + sched);
    REQUIRE(r.code == 0);
    const auto lines = split_lines(r.out);
    REQUIRE(lines.size() > 10);
    CHECK(lines[0] == "t,rx,ry,rz,d,P,gamma,Lambda");
    CHECK(first_cell(lines.back()) == "1");

    // An explicit horizon extends the replay with free evolution.
    const RunResult longer = run_cli("simulate --profile const:gamma0=1 " + kCommon +
                                     " --schedule " + sched + " --horizon 2");
    REQUIRE(longer.code == 0);
    CHECK(first_cell(split_lines(longer.out).back()) == "2");
}

TEST_CASE("the built-in validation suite passes at tight tolerance") {
    const RunResult r = run_cli("validate --tol 1e-9");
    CHECK(r.code == 0);
    CHECK(r.out.find("all checks passed") != std::string::npos);
    CHECK(r.out.find("FAIL") == std::string::npos);
}
