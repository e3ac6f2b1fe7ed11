#include "lelong/cli.hpp"

#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

using namespace lelong;
using namespace lelong::cli;

namespace {

std::vector<Scenario> parse(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

}  // namespace

TEST_CASE("parse_config: sections, keys, comments, checks") {
    auto scs = parse(R"(
# suite comment
[alpha]
current = T3
weight  = euclid
ball    = disc 0,0 0.5
grid    = 0.2 0.6 8
tol     = 1e-5
seed    = 7
check   = nu_at 0.04 0.21875 1e-3   # trailing comment

[beta]
current = T2
ball    = disc 0,0 1.0
check   = profile
)");
    REQUIRE(scs.size() == 2);
    CHECK(scs[0].id == "alpha");
    CHECK(scs[0].current == "T3");
    CHECK(scs[0].rMax == doctest::Approx(0.2));
    CHECK(scs[0].ratio == doctest::Approx(0.6));
    CHECK(scs[0].count == 8);
    CHECK(scs[0].tol == doctest::Approx(1e-5));
    CHECK(scs[0].seed == 7);
    REQUIRE(scs[0].checks.size() == 1);
    CHECK(scs[0].checks[0].name == "nu_at");
    REQUIRE(scs[0].checks[0].args.size() == 3);
    CHECK(scs[0].checks[0].args[1] == "0.21875");
    CHECK(scs[1].checks[0].name == "profile");
}

TEST_CASE("parse_config: malformed inputs raise ConfigError") {
    CHECK_THROWS_AS(parse(""), ConfigError);                          // no scenarios
    CHECK_THROWS_AS(parse("current = T3\n"), ConfigError);            // key outside section
    CHECK_THROWS_AS(parse("[a]\ncheck profile\n"), ConfigError);      // missing '='
    CHECK_THROWS_AS(parse("[a]\nfoo = 1\n"), ConfigError);            // unknown key
    CHECK_THROWS_AS(parse("[a]\ncheck = profile\n"), ConfigError);    // missing current
    CHECK_THROWS_AS(parse("[a]\n[a]\ncurrent = T3\n"), ConfigError);  // duplicate id
    CHECK_THROWS_AS(parse("[a]\ncurrent = T3\ngrid = 0.2 0.6\n"), ConfigError);
    CHECK_THROWS_AS(parse("[a]\ncurrent = T3\ntol = -1\n"), ConfigError);
    CHECK_THROWS_AS(parse("[a\ncurrent = T3\n"), ConfigError);        // unterminated section
    CHECK_THROWS_AS(parse_config_file("/nonexistent/path.cfg"), ConfigError);
}

TEST_CASE("parse_weight grammar") {
    CHECK(parse_weight("euclid", 2).name() == Weight::euclid(2).name());
    CHECK(parse_weight("euclid:3", 2).value(CVector::Ones(2)) == doctest::Approx(6.0));
    CHECK(parse_weight("euclid^2", 2).homogeneity() == doctest::Approx(2.0));
    Weight an = parse_weight("aniso:1,4", 2);
    CVector z(2);
    z << Complex(1, 0), Complex(0, 1);
    CHECK(an.value(z) == doctest::Approx(5.0));
    CHECK(parse_weight("aniso:1,4^2", 2).homogeneity() == doctest::Approx(2.0));
    CHECK_THROWS_AS(parse_weight("bogus", 2), ConfigError);
    CHECK_THROWS_AS(parse_weight("euclid^1.5", 2), ConfigError);
    CHECK_THROWS_AS(parse_weight("euclid:-1", 2), ConfigError);
    CHECK_THROWS_AS(parse_weight("aniso:1,2,3", 2), ConfigError);  // wrong arity
    CHECK_THROWS_AS(parse_weight("aniso:1,-2", 2), ConfigError);
}

TEST_CASE("parse_ball grammar") {
    CHECK(parse_ball("none").m == 0);
    DirectionalBall b = parse_ball("disc 0.1,-0.2 0.3");
    REQUIRE(b.m == 1);
    REQUIRE(b.parts.size() == 1);
    CHECK(b.parts[0].center(0) == Complex(0.1, -0.2));
    CHECK(b.parts[0].radius == doctest::Approx(0.3));
    CHECK_THROWS_AS(parse_ball("sphere 0,0 1"), ConfigError);
    CHECK_THROWS_AS(parse_ball("disc 0 1"), ConfigError);
    CHECK_THROWS_AS(parse_ball("disc 0,0 -1"), ConfigError);
}

TEST_CASE("scenario_grid is geometric") {
    Scenario sc;
    sc.rMax = 0.4;
    sc.ratio = 0.5;
    sc.count = 4;
    auto g = scenario_grid(sc);
    REQUIRE(g.size() == 4);
    CHECK(g[0] == doctest::Approx(0.4));
    CHECK(g[3] == doctest::Approx(0.05));
}

TEST_CASE("run_scenarios: passing scenario, exit code 0") {
    auto scs = parse(R"(
[t3]
current = T3
ball    = disc 0,0 0.5
grid    = 0.2 0.6 8
check   = nu_at 0.04 0.21875 1e-3
)");
    RunResult res = run_scenarios(scs, 1, std::nullopt, std::nullopt, std::nullopt);
    CHECK(res.exitCode == 0);
    REQUIRE(res.rows.size() == 1);
    CHECK(res.rows[0].verdict == "pass");
    CHECK(res.rows[0].r.has_value());
    CHECK(res.rows[0].evals > 0);
    CHECK(res.jsonSummary.find("\"exit\": 0") != std::string::npos);
}

TEST_CASE("run_scenarios: failing expectation, exit code 1") {
    auto scs = parse(R"(
[t3]
current = T3
ball    = disc 0,0 0.5
check   = nu_at 0.04 0.5 1e-3
)");
    RunResult res = run_scenarios(scs, 1, std::nullopt, std::nullopt, std::nullopt);
    CHECK(res.exitCode == 1);
    REQUIRE(res.rows.size() == 1);
    CHECK(res.rows[0].verdict.rfind("fail", 0) == 0);
}

TEST_CASE("run_scenarios: a check that cannot run becomes an error row, exit 1") {
    // g is undefined for T2 (the integrability condition fails)
    auto scs = parse(R"(
[t2]
current = T2
ball    = disc 0,0 1.0
grid    = 0.2 0.6 8
check   = g_monotone
)");
    RunResult res = run_scenarios(scs, 1, std::nullopt, std::nullopt, std::nullopt);
    CHECK(res.exitCode == 1);
    REQUIRE(!res.rows.empty());
    CHECK(res.rows.back().verdict.rfind("error:", 0) == 0);
}

TEST_CASE("run_scenarios: semantic config problems abort before any work") {
    // r_max beyond the validity radius of the weight
    auto scs = parse(R"(
[bad]
current = T3
ball    = disc 0,0 0.5
grid    = 1.5 0.6 8
check   = profile
)");
    CHECK_THROWS_AS(run_scenarios(scs, 1, std::nullopt, std::nullopt, std::nullopt),
                    ConfigError);
    // ball/current split mismatch
    auto scs2 = parse("[bad]\ncurrent = T3\nball = none\ncheck = profile\n");
    CHECK_THROWS_AS(run_scenarios(scs2, 1, std::nullopt, std::nullopt, std::nullopt),
                    ConfigError);
    // unknown catalog name
    auto scs3 = parse("[bad]\ncurrent = Nope\nball = none\ncheck = profile\n");
    CHECK_THROWS_AS(run_scenarios(scs3, 1, std::nullopt, std::nullopt, std::nullopt),
                    ConfigError);
    // unknown check name
    auto scs4 = parse("[bad]\ncurrent = T3\nball = disc 0,0 0.5\ncheck = wibble\n");
    CHECK_THROWS_AS(run_scenarios(scs4, 1, std::nullopt, std::nullopt, std::nullopt),
                    ConfigError);
    // limit-type check with too few grid points
    auto scs5 = parse(
        "[bad]\ncurrent = T3\nball = disc 0,0 0.5\ngrid = 0.2 0.6 4\ncheck = limit 0.21875 "
        "1e-3\n");
    CHECK_THROWS_AS(run_scenarios(scs5, 1, std::nullopt, std::nullopt, std::nullopt),
                    ConfigError);
    // malformed check arguments
    auto scs6 = parse("[bad]\ncurrent = T3\nball = disc 0,0 0.5\ncheck = nu_at 0.04\n");
    CHECK_THROWS_AS(run_scenarios(scs6, 1, std::nullopt, std::nullopt, std::nullopt),
                    ConfigError);
}

TEST_CASE("run_scenarios: budget override triggers exit code 3") {
    auto scs = parse(R"(
[t3]
current = T3
ball    = disc 0,0 0.5
check   = nu_at 0.04 0.21875 1e-3
)");
    RunResult res = run_scenarios(scs, 1, std::nullopt, std::nullopt, 50LL);
    CHECK(res.exitCode == 3);
    REQUIRE(!res.rows.empty());
    CHECK(res.rows[0].verdict == "error: budget exceeded");
}

TEST_CASE("ddc(NAME) selects the attached differential") {
    auto scs = parse(R"(
[dt2]
current = ddc(T2)
ball    = disc 0,0 1.0
tol     = 1e-6
check   = nu_at 0.04 -1.0 1e-5
)");
    RunResult res = run_scenarios(scs, 1, std::nullopt, std::nullopt, std::nullopt);
    CHECK(res.exitCode == 0);
    // unknown inner catalog name: config error
    auto bad = parse("[x]\ncurrent = ddc(Nope)\nball = none\ncheck = profile\n");
    CHECK_THROWS_AS(run_scenarios(bad, 1, std::nullopt, std::nullopt, std::nullopt),
                    ConfigError);
}

TEST_CASE("parallel execution preserves config order and results") {
    auto scs = parse(R"(
[a]
current = T3
ball    = disc 0,0 0.5
check   = nu_at 0.04 0.21875 1e-3
[b]
current = T4
ball    = disc 0,0 0.5
check   = nu_at 0.04 0.03625 1e-3
[c]
current = T3
ball    = disc 0,0 0.5
check   = nu_at 0.09 0.21875 1e-3
)");
    RunResult seq = run_scenarios(scs, 1, std::nullopt, std::nullopt, std::nullopt);
    RunResult par = run_scenarios(scs, 3, std::nullopt, std::nullopt, std::nullopt);
    CHECK(seq.exitCode == 0);
    CHECK(par.exitCode == 0);
    REQUIRE(seq.rows.size() == par.rows.size());
    for (size_t i = 0; i < seq.rows.size(); ++i) {
        CHECK(seq.rows[i].scenario == par.rows[i].scenario);
        CHECK(seq.rows[i].value == par.rows[i].value);  // deterministic quadrature
        CHECK(seq.rows[i].error == par.rows[i].error);
    }
}

TEST_CASE("write_csv: fixed header, deterministic without the timestamp") {
    std::vector<ReportRow> rows;
    ReportRow r;
    r.scenario = "s";
    r.check = "nu_at";
    r.r = 0.04;
    r.value = 0.21875;
    r.error = 1e-7;
    r.verdict = "fail: |0.1, 0.2|";  // commas must not break the column count
    r.evals = 123;
    r.ms = 4.5;
    rows.push_back(r);
    std::ostringstream a, b;
    write_csv(a, rows, false);
    write_csv(b, rows, false);
    CHECK(a.str() == b.str());
    CHECK(a.str().rfind("scenario,check,r,value,error,verdict,evals,ms\n", 0) == 0);
    // exactly 7 commas in the data line
    std::string data = a.str().substr(a.str().find('\n') + 1);
    CHECK(std::count(data.begin(), data.end(), ',') == 7);
    std::ostringstream c;
    write_csv(c, rows, true);
    CHECK(c.str().rfind("# generated ", 0) == 0);
}

TEST_CASE("list_catalog names every entry and the weight grammar") {
    std::string cat = list_catalog();
    for (const auto& name : catalog_names()) CHECK(cat.find(name) != std::string::npos);
    CHECK(cat.find("euclid |z|^2 homogeneity 1") != std::string::npos);
    CHECK(cat.find("aniso") != std::string::npos);
    CHECK(cat.find("ddc = -[z=0]") != std::string::npos);
    CHECK(cat.find("validity radius 0.8") != std::string::npos);
}

TEST_CASE("end-to-end binary run on a minimal config" *
          doctest::skip(std::getenv("LELONG_CLI") == nullptr)) {
    const char* bin = std::getenv("LELONG_CLI");
    REQUIRE(bin != nullptr);
    std::string dir = "cli_e2e_out";
    int mkdirRc = std::system(("mkdir -p " + dir).c_str());
    REQUIRE(mkdirRc == 0);
    std::string cfg = dir + "/mini.cfg";
    {
        std::ofstream out(cfg);
        out << "[t3]\ncurrent = T3\nball = disc 0,0 0.5\n"
            << "check = nu_at 0.04 0.21875 1e-3\n";
    }
    int rc = std::system((std::string(bin) + " run " + cfg + " --out " + dir).c_str());
    CHECK(rc == 0);
    std::ifstream csv(dir + "/report.csv");
    REQUIRE(csv.good());
    std::string line;
    std::getline(csv, line);  // timestamp comment
    CHECK(line.rfind("# generated ", 0) == 0);
    std::getline(csv, line);
    CHECK(line == "scenario,check,r,value,error,verdict,evals,ms");
    std::ifstream js(dir + "/summary.json");
    REQUIRE(js.good());
}
