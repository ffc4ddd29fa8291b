#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include "levyfluct/cli.hpp"
#include "levyfluct/config.hpp"
#include "levyfluct/error.hpp"
#include "levyfluct/report.hpp"
#include "oracles.hpp"

using namespace levyfluct;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = run_command(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch_dir() {
    static const fs::path dir = [] {
        auto d = fs::temp_directory_path() / ("levyfluct_cli_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string write_file(const std::string& name, const std::string& text) {
    const auto path = scratch_dir() / name;
    std::ofstream(path) << text;
    return path.string();
}

const std::string& bm_config() {
    static const std::string p = write_file("bm.json", R"({"drift": 0, "sigma2": 2})");
    return p;
}

const std::string& cl_config() {
    static const std::string p =
        write_file("cl.json", R"({"drift": 2, "sigma2": 0, "jumps": {"intensity": 1, "mixture": [{"weight": 1, "rate": 1}]}})");
    return p;
}

ErrorKind parse_kind(const std::string& text) {
    try {
        (void)parse_config(text);
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an Error");
    return ErrorKind::DomainError;
}

} // namespace

TEST_CASE("config parsing") {
    const auto cfg = parse_config(R"({"drift": 1, "sigma2": 2})");
    CHECK(cfg.process == ProcessSpec::make(1.0, 2.0));
    CHECK(parse_kind(R"({"drift": 1, "sigma": -1})") == ErrorKind::UnknownKey);
    CHECK(parse_kind(R"({"drift": 1, "sigma2": -1})") == ErrorKind::InvalidValue);
    CHECK(parse_kind(R"({"drift": 1, "sigma2": 1, "jumps": {"intensity": 1, "mixture": [{"weight": 0.9, "rate": 1}]}})") ==
          ErrorKind::InvalidValue);
    CHECK(parse_kind(R"({"drift": 1, "sigma2": 1, "run": {"qq": 1}})") == ErrorKind::UnknownKey);
    CHECK(parse_kind(R"({"drift": 1, "sigma2": 1, "run": {"b": 0}})") == ErrorKind::InvalidValue);
    CHECK(parse_kind(R"({"drift": 1, "sigma2": 1, "run": {"backend": "fast"}})") == ErrorKind::InvalidValue);
    CHECK(parse_kind(R"({"drift": 1, "sigma2": )") == ErrorKind::ParseError);
    CHECK(parse_kind(R"([1, 2])") == ErrorKind::ParseError);
    try {
        (void)parse_config(R"({"drift": 1, "sigma2": 1, "jumps": {"intensity": 1, "mixture": [{"weight": 0.9, "rate": 1}]}})");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("mixture") != std::string::npos);
    }
    try {
        (void)parse_config(R"({"drift": 1, "sigmaa2": 1})");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("sigmaa2") != std::string::npos);
    }
    CHECK_THROWS_AS((void)parse_config_file((scratch_dir() / "missing.json").string()), Error);
}

TEST_CASE("config round trip") {
    RunConfig cfg{ProcessSpec::make(-0.5, 1.0, 1.5, {{0.4, 2.0}, {0.6, 5.0}}), {}};
    cfg.params.q = 0.25;
    cfg.params.alpha = 1.5;
    cfg.params.theta = 0.1;
    cfg.params.x0 = 0.3;
    cfg.params.b = 2.0;
    cfg.params.dt = 1e-4;
    cfg.params.backend = "numeric";
    cfg.params.n_paths = 1000;
    cfg.params.seed = 42;
    cfg.params.output = "out.csv";
    CHECK(parse_config(emit_config(cfg)) == cfg);
    const RunConfig bare{oracle::cramer_lundberg(), {}};
    CHECK(parse_config(emit_config(bare)) == bare);
}

TEST_CASE("report emit and parse") {
    ValidationReport empty;
    std::ostringstream e;
    emit_report(empty, e);
    CHECK(e.str() == "identity,q,alpha,theta,x0,b,analytic,mc_mean,mc_se,z,pass\n");

    ValidationReport one;
    one.rows.push_back(make_row("upper_passage", 0.1, 0.6, 0.0, 1.0, 2.0, 0.5, McEstimate{0.51, 0.004, 100}));
    CHECK(one.rows[0].z == doctest::Approx(2.5));
    CHECK(one.rows[0].pass);
    const auto path = (scratch_dir() / "one.csv").string();
    emit_report(one, path);
    std::ifstream in(path);
    const auto back = parse_report(in);
    REQUIRE(back.rows.size() == 1);
    const auto& r = back.rows[0];
    CHECK(r.identity == "upper_passage");
    CHECK(r.q == 0.1);
    CHECK(r.alpha == 0.6);
    CHECK(r.analytic == 0.5);
    CHECK(r.mc_mean == 0.51);
    CHECK(r.mc_se == 0.004);
    CHECK(r.z == one.rows[0].z);
    CHECK(r.pass);
    std::ifstream lines(path);
    std::string line;
    int count = 0;
    while (std::getline(lines, line)) ++count;
    CHECK(count == 2);

    const auto fail = make_row("x", 0, 0, 0, 0, 0, 0.5, McEstimate{0.6, 0.01, 10});
    CHECK(!fail.pass);
    const auto exact = make_row("x", 0, 0, 0, 0, 0, 1.0, McEstimate{1.0, 0.0, 10});
    CHECK(exact.pass);
    const auto off = make_row("x", 0, 0, 0, 0, 0, 1.0, McEstimate{0.9, 0.0, 10});
    CHECK(!off.pass);
    CHECK_THROWS_AS(emit_report(one, "/nonexistent-dir/report.csv"), Error);
}

TEST_CASE("default suite") {
    SuiteOptions opts;
    opts.n_paths = 2000;
    opts.seed = 3;
    const auto report = run_suite(oracle::cramer_lundberg(), "default", opts);
    CHECK(report.rows.size() == 9);
    for (const auto& r : report.rows) CHECK(r.pass == (std::abs(r.z) <= 3.0));
    const auto again = run_suite(oracle::cramer_lundberg(), "default", opts);
    std::ostringstream a;
    std::ostringstream b;
    emit_report(report, a);
    emit_report(again, b);
    CHECK(a.str() == b.str());
    CHECK_THROWS_AS((void)run_suite(oracle::cramer_lundberg(), "nope", opts), Error);
}

TEST_CASE("value formatting") {
    CHECK(format_value(2.0) == "2.0");
    CHECK(format_value(1.0) == "1.0");
    CHECK(format_value(0.1) == "0.1");
    CHECK(format_value(-3.0) == "-3.0");
    CHECK(format_value(1.5e300) == "1.5e+300");
    CHECK(std::stod(format_value(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("command examples") {
    auto r = run({"phi-inverse", "--config", bm_config(), "--q", "4"});
    CHECK(r.code == kExitOk);
    CHECK(r.out == "2.0\n");
    r = run({"transform", "upper", "--config", bm_config(), "--q", "1", "--alpha", "1", "--x0", "1", "--b", "1"});
    CHECK(r.code == kExitOk);
    CHECK(r.out == "1.0\n");
    r = run({"exponent", "--config", cl_config(), "--alpha", "1"});
    CHECK(r.out == "1.5\n");
    r = run({"exponent", "--config", cl_config(), "--alpha", "0", "--derivative"});
    CHECK(r.out == "1.0\n");
    r = run({"transform", "rate", "--config", bm_config(), "--q", "1", "--b", "1"});
    CHECK(std::stod(r.out) == doctest::Approx(1.0 / std::tanh(1.0)));
    r = run({"transform", "exit", "--config", bm_config(), "--q", "1", "--a", "1", "--b", "1"});
    CHECK(std::stod(r.out) == doctest::Approx(std::sinh(1.0) / std::sinh(2.0)));
    r = run({"transform", "exponent", "--config", bm_config(), "--alpha", "1", "--b", "2", "--backend", "numeric"});
    CHECK(std::stod(r.out) == doctest::Approx(-1.0 / 3.0).epsilon(1e-8));
    r = run({"transform", "lower", "--config", cl_config(), "--q", "0.1", "--alpha", "1", "--theta", "0.3", "--x0", "1",
             "--b", "2", "--components"});
    CHECK(r.code == kExitOk);
    CHECK(r.out.find("w_prime_b=") != std::string::npos);
    r = run({"transform", "upper", "--config", cl_config(), "--q", "0.1", "--alpha", "1", "--x0", "1", "--b", "2",
             "--components"});
    CHECK(r.code == kExitOk);
    CHECK(r.out.find("w_prime_b=") == std::string::npos);
}

TEST_CASE("flags override the config run block") {
    const auto cfg = write_file("run.json", R"({"drift": 0, "sigma2": 2, "run": {"q": 9}})");
    CHECK(run({"phi-inverse", "--config", cfg}).out == "3.0\n");
    CHECK(run({"phi-inverse", "--config", cfg, "--q", "4"}).out == "2.0\n");
}

TEST_CASE("scale and simulate outputs") {
    auto r = run({"scale", "--config", bm_config(), "--q", "1", "--x-max", "2", "--points", "3"});
    REQUIRE(r.code == kExitOk);
    std::istringstream in(r.out);
    std::string line;
    std::getline(in, line);
    CHECK(line == "x,w_q,w_q_prime,z_q_alpha");
    std::getline(in, line);
    std::getline(in, line);
    CHECK(line.rfind("1,1.1752011936438014,1.5430806348152437,", 0) == 0);

    const auto out = (scratch_dir() / "path.csv").string();
    r = run({"simulate", "--config", cl_config(), "--x0", "1", "--b", "2", "--stop", "time", "--stop-level", "5", "--seed",
             "3", "--out", out});
    CHECK(r.code == kExitOk);
    std::ifstream file(out);
    std::getline(file, line);
    CHECK(line == "t,x,w,l,u");
    r = run({"simulate", "--config", bm_config(), "--x0", "0.5", "--b", "1", "--mode", "euler", "--dt", "0.01", "--stop",
             "lower"});
    CHECK(r.code == kExitOk);
    CHECK(r.out.rfind("t,x,w,l,u\n", 0) == 0);
}

TEST_CASE("exit codes") {
    CHECK(run({}).code == kExitUsage);
    CHECK(run({"--help"}).code == kExitOk);
    CHECK(run({"frobnicate"}).code == kExitUsage);
    CHECK(run({"phi-inverse"}).code == kExitUsage);
    CHECK(run({"phi-inverse", "--config", bm_config(), "--q", "abc"}).code == kExitUsage);
    CHECK(run({"phi-inverse", "--config", bm_config()}).code == kExitUsage);
    CHECK(run({"phi-inverse", "--config", (scratch_dir() / "nope.json").string(), "--q", "1"}).code == kExitUsage);
    const auto bad = write_file("bad.json", R"({"drift": 0, "sigma2": 2, "colour": 1})");
    const auto res = run({"phi-inverse", "--config", bad, "--q", "1"});
    CHECK(res.code == kExitUsage);
    CHECK(res.err.find("colour") != std::string::npos);
    CHECK(run({"transform", "upper", "--config", bm_config(), "--q", "1", "--alpha", "0.5", "--x0", "0.5", "--b", "1"}).code ==
          kExitUsage);
    CHECK(run({"transform", "sideways", "--config", bm_config()}).code == kExitUsage);
    CHECK(run({"simulate", "--config", bm_config(), "--b", "1", "--mode", "exact"}).code == kExitUsage);
    CHECK(run({"validate", "--config", bm_config(), "--suite", "huge"}).code == kExitUsage);
}

TEST_CASE("validation failures map to exit code 1") {
    int failures = 0;
    for (int seed = 1; seed <= 30; ++seed) {
        const auto out = (scratch_dir() / ("tiny" + std::to_string(seed) + ".csv")).string();
        const auto r = run({"validate", "--config", cl_config(), "--paths", "2", "--seed", std::to_string(seed), "--out", out});
        std::ifstream in(out);
        const auto report = parse_report(in);
        CHECK(r.code == (report.all_pass() ? kExitOk : kExitValidationFailed));
        failures += r.code == kExitValidationFailed;
    }
    CHECK(failures > 0);
}

TEST_CASE("validate end to end") {
    const auto report = (scratch_dir() / "report.csv").string();
    const std::string cmd = std::string(LEVYFLUCT_CLI_PATH) + " validate --config " + cl_config() +
                            " --suite default --paths 4000 --seed 7 --out " + report + " > /dev/null";
    const int status = std::system(cmd.c_str());
    REQUIRE(WIFEXITED(status));
    std::ifstream in(report);
    const auto parsed = parse_report(in);
    CHECK(parsed.rows.size() == 9);
    CHECK(WEXITSTATUS(status) == (parsed.all_pass() ? kExitOk : kExitValidationFailed));

    // a report that cannot pass: a single replication budget is rejected as a usage error
    const std::string tiny = std::string(LEVYFLUCT_CLI_PATH) + " validate --config " + cl_config() +
                             " --paths 1 > /dev/null 2>&1";
    const int tiny_status = std::system(tiny.c_str());
    CHECK(WEXITSTATUS(tiny_status) == kExitUsage);

    const std::string threads = "LEVYFLUCT_THREADS=2 " + std::string(LEVYFLUCT_CLI_PATH) + " validate --config " +
                                cl_config() + " --paths 4000 --seed 7 --out " + report + "2 > /dev/null";
    const int threads_status = std::system(threads.c_str());
    CHECK(WEXITSTATUS(threads_status) == WEXITSTATUS(status));
    std::ifstream a(report);
    std::ifstream b(report + "2");
    std::stringstream sa;
    std::stringstream sb;
    sa << a.rdbuf();
    sb << b.rdbuf();
    CHECK(sa.str() == sb.str());
}
