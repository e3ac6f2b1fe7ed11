// Scenario runner: parses sectioned key-value configs, executes checks
// against the current catalog, and emits CSV/JSON reports.
#pragma once

#include "lelong/lelong.hpp"

#include <iosfwd>
#include <optional>

namespace lelong::cli {

// configuration problems are reported with this type and map to exit code 2
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CheckSpec {
    std::string name;               // profile, limit, nu_at, condition_c, g_monotone,
                                    // lelong_jensen, scaling, comparison, k0, additivity
    std::vector<std::string> args;  // check-specific arguments, see README
};

struct Scenario {
    std::string id;
    std::string current;            // catalog name
    std::string weightSpec = "euclid";
    std::string ballSpec = "none";  // "none" | "disc re,im radius"
    double rMax = 0.25;
    double ratio = 0.6;
    int count = 10;
    double tol = 1e-4;
    std::uint64_t seed = 1;
    std::vector<CheckSpec> checks;
};

struct ReportRow {
    std::string scenario;
    std::string check;
    std::optional<double> r;  // per-radius rows only
    double value = 0.0;
    double error = 0.0;
    std::string verdict;  // pass | fail: <bound> | inconclusive | error: <msg>
    long long evals = 0;
    double ms = 0.0;
};

struct RunResult {
    int exitCode = 0;  // 0 pass, 1 any fail, 2 config error, 3 budget exhausted
    std::vector<ReportRow> rows;
    std::string jsonSummary;
};

// "euclid[:scale][^p]" | "aniso:l1,l2,...[^p]"; n = z-dimension of the current
Weight parse_weight(const std::string& spec, int n);
// "none" | "disc re,im radius"
DirectionalBall parse_ball(const std::string& spec);

std::vector<Scenario> parse_config(std::istream& in);        // throws ConfigError
std::vector<Scenario> parse_config_file(const std::string& path);

// geometric grid r_max * ratio^i, i = 0..count-1
std::vector<double> scenario_grid(const Scenario& sc);

// executes one scenario (all checks), never throws: failures become rows
std::vector<ReportRow> run_scenario(const Scenario& sc, std::optional<double> tolOverride,
                                    std::optional<std::uint64_t> seedOverride,
                                    std::optional<long long> budgetOverride);

// runs scenarios (parallel up to jobs), assembles rows in config order
RunResult run_scenarios(const std::vector<Scenario>& scenarios, int jobs,
                        std::optional<double> tolOverride,
                        std::optional<std::uint64_t> seedOverride,
                        std::optional<long long> budgetOverride);

// fixed columns: scenario,check,r,value,error,verdict,evals,ms; the optional
// timestamp comment is the only nondeterministic line
void write_csv(std::ostream& out, const std::vector<ReportRow>& rows, bool timestamp = true);

std::string list_catalog();

// the full "run" operation: reads LELONG_BUDGET, writes <outDir>/report.csv
// and <outDir>/summary.json, returns the exit code
int run(const std::string& configPath, int jobs, std::optional<double> tolOverride,
        std::optional<std::uint64_t> seedOverride, const std::string& outDir);

}  // namespace lelong::cli
