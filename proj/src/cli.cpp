#include "lelong/cli.hpp"

#include <json.hpp>

#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

namespace lelong::cli {

namespace {

using json = nlohmann::json;
using clk = std::chrono::steady_clock;

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream is(s);
    std::vector<std::string> out;
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

std::vector<std::string> split_on(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

double to_double(const std::string& s, const std::string& what) {
    try {
        size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("expected a number for " + what + ", got '" + s + "'");
    }
}

long long to_ll(const std::string& s, const std::string& what) {
    try {
        size_t pos = 0;
        long long v = std::stoll(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("expected an integer for " + what + ", got '" + s + "'");
    }
}

// sanitize free-text verdicts for the comma-separated report
std::string csv_safe(std::string s) {
    for (char& c : s)
        if (c == ',' || c == '\n') c = ';';
    return s;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

struct CheckOutcome {
    std::vector<ReportRow> rows;
    bool budgetHit = false;
};

struct ScenarioContext {
    const Scenario& sc;
    ModelCurrent current;
    Weight phi;
    DirectionalBall ball;
    std::vector<double> grid;
    QuadratureOptions opts;
};

ReportRow base_row(const ScenarioContext& cx, const std::string& check) {
    ReportRow row;
    row.scenario = cx.sc.id;
    row.check = check;
    return row;
}

std::string pass_or_fail(bool ok, const std::string& bound) {
    return ok ? "pass" : "fail: " + bound;
}

const std::string kHolds = "holds", kFails = "fails", kTrivially = "trivially_holds";

std::string verdict_name(ConditionCReport::Verdict v) {
    switch (v) {
        case ConditionCReport::Verdict::Holds: return kHolds;
        case ConditionCReport::Verdict::Fails: return kFails;
        case ConditionCReport::Verdict::TriviallyHolds: return kTrivially;
        default: return "inconclusive";
    }
}

void require_args(const CheckSpec& ck, size_t lo, size_t hi) {
    if (ck.args.size() < lo || ck.args.size() > hi)
        throw ConfigError("check '" + ck.name + "': wrong argument count");
}

// ---- individual checks ------------------------------------------------------
void run_profile(const ScenarioContext& cx, const CheckSpec&, std::vector<ReportRow>& rows,
                 json& summary) {
    RadialProfile prof = radial_profile(cx.current, cx.phi, cx.ball, cx.grid, cx.opts);
    json pts = json::array();
    for (size_t i = 0; i < prof.grid.size(); ++i) {
        ReportRow row = base_row(cx, "profile");
        row.r = prof.grid[i];
        row.value = prof.nu[i].value;
        row.error = prof.nu[i].error;
        row.evals = prof.nu[i].evals;
        row.verdict = std::isfinite(row.value) ? "pass" : "fail: non-finite value";
        rows.push_back(row);
        pts.push_back({{"r", prof.grid[i]}, {"value", prof.nu[i].value},
                       {"error", prof.nu[i].error}});
    }
    summary["profile"] = pts;
}

void run_limit(const ScenarioContext& cx, const CheckSpec& ck, std::vector<ReportRow>& rows,
               json& summary) {
    require_args(ck, 1, 2);
    RadialProfile prof = radial_profile(cx.current, cx.phi, cx.ball, cx.grid, cx.opts);
    NuVerdict v = nu_limit(prof);
    ReportRow row = base_row(cx, "limit");
    for (const auto& e : prof.nu) row.evals += e.evals;
    row.value = v.value;
    row.error = v.uncertainty;
    summary["nu"] = {{"kind", v.kind == NuVerdict::Kind::Converged    ? "converged"
                              : v.kind == NuVerdict::Kind::Diverges   ? "diverges"
                                                                      : "inconclusive"},
                     {"value", v.value},
                     {"uncertainty", v.uncertainty},
                     {"model", v.model}};
    if (ck.args[0] == "diverges") {
        if (v.kind == NuVerdict::Kind::Diverges)
            row.verdict = "pass";
        else if (v.kind == NuVerdict::Kind::Inconclusive)
            row.verdict = "inconclusive";
        else
            row.verdict = "fail: expected divergence, extrapolated " + fmt(v.value);
    } else {
        require_args(ck, 2, 2);
        double expected = to_double(ck.args[0], "limit expected");
        double tol = to_double(ck.args[1], "limit tol");
        if (v.kind == NuVerdict::Kind::Inconclusive)
            row.verdict = "inconclusive";
        else if (v.kind == NuVerdict::Kind::Diverges)
            row.verdict = "fail: expected " + fmt(expected) + ", profile diverges (" + v.model + ")";
        else
            row.verdict = pass_or_fail(std::abs(v.value - expected) <= tol,
                                       "|" + fmt(v.value) + " - " + fmt(expected) +
                                           "| <= " + fmt(tol));
    }
    rows.push_back(row);
}

void run_nu_at(const ScenarioContext& cx, const CheckSpec& ck, std::vector<ReportRow>& rows,
               json&) {
    require_args(ck, 3, 3);
    double r = to_double(ck.args[0], "nu_at r");
    double expected = to_double(ck.args[1], "nu_at expected");
    double tol = to_double(ck.args[2], "nu_at tol");
    auto t0 = clk::now();
    Estimate e = nu_at(cx.current, cx.phi, cx.ball, r, cx.opts);
    ReportRow row = base_row(cx, "nu_at");
    row.r = r;
    row.value = e.value;
    row.error = e.error;
    row.evals = e.evals;
    row.ms = std::chrono::duration<double, std::milli>(clk::now() - t0).count();
    row.verdict = pass_or_fail(std::abs(e.value - expected) <= tol,
                               "|" + fmt(e.value) + " - " + fmt(expected) + "| <= " + fmt(tol));
    rows.push_back(row);
}

void run_condition_c(const ScenarioContext& cx, const CheckSpec& ck, std::vector<ReportRow>& rows,
                     json& summary) {
    require_args(ck, 1, 1);
    const std::string& expected = ck.args[0];
    if (expected != kHolds && expected != kFails && expected != kTrivially)
        throw ConfigError("condition_c: expected verdict must be holds|fails|trivially_holds");
    ConditionCReport rep = condition_c(cx.current, cx.phi, cx.ball, cx.grid, cx.opts);
    ReportRow row = base_row(cx, "condition_c");
    row.value = rep.alpha;
    row.error = rep.residual;
    for (const auto& e : rep.ddcProfile.nu) row.evals += e.evals;
    std::string got = verdict_name(rep.verdict);
    summary["condition_c"] = {{"verdict", got}, {"alpha", rep.alpha}, {"coeff", rep.coeff},
                              {"tail_integral", rep.tailIntegral}};
    if (rep.verdict == ConditionCReport::Verdict::Inconclusive)
        row.verdict = "inconclusive";
    else
        row.verdict = pass_or_fail(got == expected, "verdict " + got + " == " + expected);
    rows.push_back(row);
}

void run_g_monotone(const ScenarioContext& cx, const CheckSpec& ck, std::vector<ReportRow>& rows,
                    json&) {
    require_args(ck, 0, 0);
    std::vector<Estimate> g = g_profile(cx.current, cx.phi, cx.ball, cx.grid, cx.opts);
    // grid is decreasing: nondecreasing in r means g[i] >= g[i+1] within error
    double worst = 0.0, maxErr = 0.0;
    long long evals = 0;
    for (size_t i = 0; i + 1 < g.size(); ++i) {
        double slack = g[i].error + g[i + 1].error + 1e-12;
        worst = std::max(worst, g[i + 1].value - g[i].value - slack);
        maxErr = std::max(maxErr, g[i].error);
        evals += g[i].evals;
    }
    ReportRow row = base_row(cx, "g_monotone");
    row.value = worst;
    row.error = maxErr;
    row.evals = evals;
    row.verdict = pass_or_fail(worst <= 0.0, "max monotonicity violation " + fmt(worst) + " <= 0");
    rows.push_back(row);
}

void run_lelong_jensen(const ScenarioContext& cx, const CheckSpec& ck,
                       std::vector<ReportRow>& rows, json&) {
    require_args(ck, 4, 4);
    int p = static_cast<int>(to_ll(ck.args[0], "lelong_jensen p"));
    int q = static_cast<int>(to_ll(ck.args[1], "lelong_jensen q"));
    double r1 = to_double(ck.args[2], "lelong_jensen r1");
    double r2 = to_double(ck.args[3], "lelong_jensen r2");
    auto t0 = clk::now();
    Estimate e = lelong_jensen_residual(cx.current, cx.phi, cx.ball, r1, r2, p, q, cx.opts);
    ReportRow row = base_row(cx, "lelong_jensen");
    row.value = e.value;
    row.error = e.error;
    row.evals = e.evals;
    row.ms = std::chrono::duration<double, std::milli>(clk::now() - t0).count();
    row.verdict = pass_or_fail(std::abs(e.value) <= 3 * e.error,
                               "|residual " + fmt(e.value) + "| <= 3*error " + fmt(3 * e.error));
    rows.push_back(row);
}

void run_scaling(const ScenarioContext& cx, const CheckSpec& ck, std::vector<ReportRow>& rows,
                 json& summary) {
    require_args(ck, 1, 3);
    int p = static_cast<int>(to_ll(ck.args[0], "scaling p"));
    ScalingReport rep = scaling_check(cx.current, cx.phi, cx.ball, p, cx.grid, cx.opts);
    for (const auto& pt : rep.points) {
        ReportRow row = base_row(cx, "scaling");
        row.r = pt.r;
        row.value = pt.residual;
        row.error = pt.error;
        row.verdict = pass_or_fail(std::abs(pt.residual) <= 3 * pt.error,
                                   "|residual| <= 3*error " + fmt(3 * pt.error));
        rows.push_back(row);
    }
    summary["scaling"] = {{"max_residual", rep.maxResidual},
                          {"max_error", rep.maxError},
                          {"limit_lhs", rep.limitLhs},
                          {"limit_rhs", rep.limitRhs},
                          {"limits_available", rep.limitsAvailable}};
    if (ck.args.size() == 3) {
        double expected = to_double(ck.args[1], "scaling expected");
        double tol = to_double(ck.args[2], "scaling tol");
        ReportRow row = base_row(cx, "scaling_limit");
        row.value = rep.limitLhs;
        row.error = rep.limitError;
        if (!rep.limitsAvailable)
            row.verdict = "inconclusive";
        else
            row.verdict = pass_or_fail(std::abs(rep.limitLhs - expected) <= tol,
                                       "|" + fmt(rep.limitLhs) + " - " + fmt(expected) +
                                           "| <= " + fmt(tol));
        rows.push_back(row);
    }
}

void run_comparison(const ScenarioContext& cx, const CheckSpec& ck, std::vector<ReportRow>& rows,
                    json& summary) {
    require_args(ck, 4, 4);
    double ell = to_double(ck.args[0], "comparison ell");
    Weight psi = parse_weight(ck.args[1], cx.current.n());
    double expected = to_double(ck.args[2], "comparison expected");
    double tol = to_double(ck.args[3], "comparison tol");
    ComparisonReport rep =
        comparison_check(cx.current, cx.phi, psi, ell, cx.ball, cx.grid, cx.opts);
    ReportRow row = base_row(cx, "comparison");
    row.value = rep.ratio;
    row.error = rep.ratioError;
    summary["comparison"] = {{"ratio", rep.ratio}, {"ratio_error", rep.ratioError},
                             {"ell", ell}};
    if (!rep.converged)
        row.verdict = "inconclusive";
    else
        row.verdict = pass_or_fail(std::abs(rep.ratio - expected) <= tol,
                                   "|" + fmt(rep.ratio) + " - " + fmt(expected) +
                                       "| <= " + fmt(tol));
    rows.push_back(row);
}

void run_k0(const ScenarioContext& cx, const CheckSpec& ck, std::vector<ReportRow>& rows,
            json& summary) {
    require_args(ck, 1, 1);
    double tol = to_double(ck.args[0], "k0 tol");
    auto [lim, direct] = k0_identity(cx.current, cx.ball, cx.grid, cx.opts);
    ReportRow row = base_row(cx, "k0");
    row.value = lim.value - direct.value;
    row.error = lim.error + direct.error;
    row.evals = lim.evals + direct.evals;
    summary["k0"] = {{"limit", lim.value}, {"direct", direct.value}};
    row.verdict = pass_or_fail(std::abs(row.value) <= tol,
                               "|" + fmt(lim.value) + " - " + fmt(direct.value) +
                                   "| <= " + fmt(tol));
    rows.push_back(row);
}

void run_additivity(const ScenarioContext& cx, const CheckSpec& ck, std::vector<ReportRow>& rows,
                    json&) {
    require_args(ck, 2, 2);
    auto center = split_on(ck.args[0], ',');
    if (center.size() != 2) throw ConfigError("additivity: center must be re,im");
    Complex c(to_double(center[0], "additivity center"), to_double(center[1], "additivity center"));
    double rad = to_double(ck.args[1], "additivity radius");
    DirectionalBall B2 = DirectionalBall::disc(c, rad);
    Estimate e = additivity_check(cx.current, cx.phi, cx.ball, B2, cx.grid, cx.opts);
    ReportRow row = base_row(cx, "additivity");
    row.value = e.value;
    row.error = e.error;
    row.evals = e.evals;
    row.verdict = pass_or_fail(std::abs(e.value) <= 3 * e.error + 1e-9,
                               "|defect " + fmt(e.value) + "| <= 3*error + 1e-9");
    rows.push_back(row);
}

void dispatch_check(const ScenarioContext& cx, const CheckSpec& ck, std::vector<ReportRow>& rows,
                    json& summary) {
    if (ck.name == "profile") return run_profile(cx, ck, rows, summary);
    if (ck.name == "limit") return run_limit(cx, ck, rows, summary);
    if (ck.name == "nu_at") return run_nu_at(cx, ck, rows, summary);
    if (ck.name == "condition_c") return run_condition_c(cx, ck, rows, summary);
    if (ck.name == "g_monotone") return run_g_monotone(cx, ck, rows, summary);
    if (ck.name == "lelong_jensen") return run_lelong_jensen(cx, ck, rows, summary);
    if (ck.name == "scaling") return run_scaling(cx, ck, rows, summary);
    if (ck.name == "comparison") return run_comparison(cx, ck, rows, summary);
    if (ck.name == "k0") return run_k0(cx, ck, rows, summary);
    if (ck.name == "additivity") return run_additivity(cx, ck, rows, summary);
    throw ConfigError("unknown check '" + ck.name + "'");
}

bool needs_limit_grid(const Scenario& sc) {
    for (const auto& ck : sc.checks)
        if (ck.name == "limit" || ck.name == "condition_c" || ck.name == "g_monotone" ||
            ck.name == "scaling" || ck.name == "comparison" || ck.name == "k0" ||
            ck.name == "additivity")
            return true;
    return false;
}

// semantic validation; throws ConfigError (exit 2, nothing runs)
ScenarioContext make_context(const Scenario& sc, std::optional<double> tolOverride,
                             std::optional<std::uint64_t> seedOverride,
                             std::optional<long long> budgetOverride) {
    ModelCurrent cur = [&] {
        try {
            // "ddc(NAME)" selects the attached dd^c of a catalog entry
            if (sc.current.rfind("ddc(", 0) == 0 && sc.current.back() == ')')
                return ddc(catalog(sc.current.substr(4, sc.current.size() - 5)));
            return catalog(sc.current);
        } catch (const std::out_of_range& e) {
            throw ConfigError(std::string("[") + sc.id + "] " + e.what());
        }
    }();
    Weight phi = parse_weight(sc.weightSpec, cur.n());
    DirectionalBall ball = parse_ball(sc.ballSpec);
    if (ball.m != cur.m())
        throw ConfigError("[" + sc.id + "] ball has m=" + std::to_string(ball.m) +
                          " but current '" + sc.current + "' has m=" + std::to_string(cur.m()));
    if (!(sc.rMax > 0) || !(sc.ratio > 0) || sc.ratio >= 1)
        throw ConfigError("[" + sc.id + "] grid needs r_max > 0 and 0 < ratio < 1");
    if (sc.rMax >= phi.validityRadius())
        throw ConfigError("[" + sc.id + "] r_max " + fmt(sc.rMax) + " >= R(phi) " +
                          fmt(phi.validityRadius()));
    if (sc.count < 1) throw ConfigError("[" + sc.id + "] grid count must be >= 1");
    if (sc.count < 6 && needs_limit_grid(sc))
        throw ConfigError("[" + sc.id + "] limit-type checks need grid count >= 6");
    if (sc.checks.empty()) throw ConfigError("[" + sc.id + "] no checks requested");
    for (const auto& ck : sc.checks) {  // reject unknown names before running
        static const std::vector<std::string> known = {
            "profile", "limit", "nu_at", "condition_c", "g_monotone",
            "lelong_jensen", "scaling", "comparison", "k0", "additivity"};
        if (std::find(known.begin(), known.end(), ck.name) == known.end())
            throw ConfigError("[" + sc.id + "] unknown check '" + ck.name + "'");
    }
    ScenarioContext cx{sc, std::move(cur), std::move(phi), std::move(ball), scenario_grid(sc), {}};
    cx.opts.tol = tolOverride.value_or(sc.tol);
    cx.opts.seed = seedOverride.value_or(sc.seed);
    if (budgetOverride) cx.opts.budget = *budgetOverride;
    return cx;
}

}  // namespace

// ---- parsing ------------------------------------------------------------------
Weight parse_weight(const std::string& spec, int n) {
    std::string s = trim(spec);
    double p = 1.0;
    if (auto caret = s.find('^'); caret != std::string::npos) {
        p = to_double(s.substr(caret + 1), "weight power");
        s = s.substr(0, caret);
    }
    std::string base = s, params;
    if (auto colon = s.find(':'); colon != std::string::npos) {
        base = s.substr(0, colon);
        params = s.substr(colon + 1);
    }
    Weight w;
    if (base == "euclid") {
        double scale = params.empty() ? 1.0 : to_double(params, "euclid scale");
        if (scale <= 0) throw ConfigError("euclid scale must be positive");
        w = Weight::euclid(n, scale);
    } else if (base == "aniso") {
        if (params.empty()) throw ConfigError("aniso weight needs lambdas, e.g. aniso:1,2");
        std::vector<double> lambdas;
        for (const auto& tok : split_on(params, ','))
            lambdas.push_back(to_double(tok, "aniso lambda"));
        if (static_cast<int>(lambdas.size()) != n)
            throw ConfigError("aniso weight needs exactly " + std::to_string(n) + " lambdas");
        for (double l : lambdas)
            if (l <= 0) throw ConfigError("aniso lambdas must be positive");
        w = Weight::aniso(std::move(lambdas));
    } else {
        throw ConfigError("unknown weight '" + base + "' (use euclid[:scale] or aniso:l1,...)");
    }
    if (p != 1.0) {
        if (p < 2) throw ConfigError("weight power must be >= 2");
        w = power_weight(w, p);
    }
    return w;
}

DirectionalBall parse_ball(const std::string& spec) {
    auto toks = split_ws(trim(spec));
    if (toks.size() == 1 && toks[0] == "none") return DirectionalBall::none();
    if (toks.size() == 3 && toks[0] == "disc") {
        auto c = split_on(toks[1], ',');
        if (c.size() != 2) throw ConfigError("disc center must be re,im");
        double rad = to_double(toks[2], "disc radius");
        if (rad <= 0) throw ConfigError("disc radius must be positive");
        return DirectionalBall::disc(
            Complex(to_double(c[0], "disc center"), to_double(c[1], "disc center")), rad);
    }
    throw ConfigError("ball must be 'none' or 'disc re,im radius', got '" + spec + "'");
}

std::vector<Scenario> parse_config(std::istream& in) {
    std::vector<Scenario> out;
    Scenario* cur = nullptr;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("line " + std::to_string(lineno) + ": unterminated section");
            std::string id = trim(line.substr(1, line.size() - 2));
            if (id.empty())
                throw ConfigError("line " + std::to_string(lineno) + ": empty scenario id");
            for (const auto& sc : out)
                if (sc.id == id)
                    throw ConfigError("line " + std::to_string(lineno) + ": duplicate scenario '" +
                                      id + "'");
            out.emplace_back();
            out.back().id = id;
            cur = &out.back();
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        if (!cur)
            throw ConfigError("line " + std::to_string(lineno) + ": key outside any [scenario]");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key == "current") {
            cur->current = val;
        } else if (key == "weight") {
            cur->weightSpec = val;
        } else if (key == "ball") {
            cur->ballSpec = val;
        } else if (key == "grid") {
            auto toks = split_ws(val);
            if (toks.size() != 3)
                throw ConfigError("line " + std::to_string(lineno) +
                                  ": grid = r_max ratio count");
            cur->rMax = to_double(toks[0], "grid r_max");
            cur->ratio = to_double(toks[1], "grid ratio");
            cur->count = static_cast<int>(to_ll(toks[2], "grid count"));
        } else if (key == "tol") {
            cur->tol = to_double(val, "tol");
            if (cur->tol <= 0) throw ConfigError("tol must be positive");
        } else if (key == "seed") {
            cur->seed = static_cast<std::uint64_t>(to_ll(val, "seed"));
        } else if (key == "check") {
            auto toks = split_ws(val);
            if (toks.empty())
                throw ConfigError("line " + std::to_string(lineno) + ": empty check");
            CheckSpec ck;
            ck.name = toks[0];
            ck.args.assign(toks.begin() + 1, toks.end());
            cur->checks.push_back(std::move(ck));
        } else {
            throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        }
    }
    if (out.empty()) throw ConfigError("config defines no scenarios");
    for (const auto& sc : out)
        if (sc.current.empty()) throw ConfigError("[" + sc.id + "] missing 'current'");
    return out;
}

std::vector<Scenario> parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return parse_config(in);
}

std::vector<double> scenario_grid(const Scenario& sc) {
    std::vector<double> g(sc.count);
    for (int i = 0; i < sc.count; ++i) g[i] = sc.rMax * std::pow(sc.ratio, i);
    return g;
}

// ---- execution ------------------------------------------------------------------
namespace {

std::vector<ReportRow> run_scenario_impl(const Scenario& sc, std::optional<double> tolOverride,
                                         std::optional<std::uint64_t> seedOverride,
                                         std::optional<long long> budgetOverride, json& summary) {
    ScenarioContext cx = make_context(sc, tolOverride, seedOverride, budgetOverride);
    std::vector<ReportRow> rows;
    for (const auto& ck : sc.checks) {
        auto t0 = clk::now();
        size_t before = rows.size();
        try {
            dispatch_check(cx, ck, rows, summary);
        } catch (const BudgetExceededError&) {
            ReportRow row = base_row(cx, ck.name);
            row.verdict = "error: budget exceeded";
            rows.push_back(row);
        } catch (const ConfigError&) {
            throw;  // malformed check arguments: config problem, not a result
        } catch (const std::exception& e) {
            ReportRow row = base_row(cx, ck.name);
            row.verdict = std::string("error: ") + e.what();
            rows.push_back(row);
        }
        double ms = std::chrono::duration<double, std::milli>(clk::now() - t0).count();
        for (size_t i = before; i < rows.size(); ++i)
            if (rows[i].ms == 0.0) rows[i].ms = ms;
    }
    return rows;
}

}  // namespace

std::vector<ReportRow> run_scenario(const Scenario& sc, std::optional<double> tolOverride,
                                    std::optional<std::uint64_t> seedOverride,
                                    std::optional<long long> budgetOverride) {
    json scratch;
    return run_scenario_impl(sc, tolOverride, seedOverride, budgetOverride, scratch);
}

RunResult run_scenarios(const std::vector<Scenario>& scenarios, int jobs,
                        std::optional<double> tolOverride,
                        std::optional<std::uint64_t> seedOverride,
                        std::optional<long long> budgetOverride) {
    // validate everything up front: any config error aborts before work starts
    for (const auto& sc : scenarios)
        (void)make_context(sc, tolOverride, seedOverride, budgetOverride);

    std::vector<std::vector<ReportRow>> perScenario(scenarios.size());
    std::vector<json> perSummary(scenarios.size());
    std::atomic<size_t> next{0};
    auto worker = [&] {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= scenarios.size()) return;
            perScenario[i] = run_scenario_impl(scenarios[i], tolOverride, seedOverride,
                                               budgetOverride, perSummary[i]);
        }
    };
    jobs = std::max(1, jobs);
    if (jobs == 1 || scenarios.size() <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        size_t nThreads = std::min<size_t>(jobs, scenarios.size());
        for (size_t j = 0; j < nThreads; ++j)
            pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    RunResult res;
    bool anyFail = false, anyBudget = false;
    json js;
    js["scenarios"] = json::array();
    for (size_t i = 0; i < scenarios.size(); ++i) {
        json sj;
        sj["id"] = scenarios[i].id;
        sj["current"] = scenarios[i].current;
        sj["checks"] = json::array();
        for (const auto& row : perScenario[i]) {
            res.rows.push_back(row);
            if (row.verdict == "error: budget exceeded") anyBudget = true;
            if (row.verdict != "pass") anyFail = true;
            json cj = {{"check", row.check}, {"verdict", row.verdict},
                       {"value", row.value},  {"error", row.error}};
            if (row.r) cj["r"] = *row.r;
            sj["checks"].push_back(std::move(cj));
        }
        if (!perSummary[i].is_null()) sj["results"] = perSummary[i];
        js["scenarios"].push_back(std::move(sj));
    }
    res.exitCode = anyBudget ? 3 : (anyFail ? 1 : 0);
    js["exit"] = res.exitCode;
    res.jsonSummary = js.dump(2) + "\n";
    return res;
}

void write_csv(std::ostream& out, const std::vector<ReportRow>& rows, bool timestamp) {
    if (timestamp) {
        auto now = std::chrono::system_clock::now();
        out << "# generated "
            << std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count()
            << "\n";
    }
    out << "scenario,check,r,value,error,verdict,evals,ms\n";
    out.precision(12);
    for (const auto& row : rows) {
        out << csv_safe(row.scenario) << ',' << csv_safe(row.check) << ',';
        if (row.r) out << *row.r;
        out << ',' << row.value << ',' << row.error << ',' << csv_safe(row.verdict) << ','
            << row.evals << ',' << row.ms << "\n";
    }
}

std::string list_catalog() {
    std::ostringstream os;
    os << "currents:\n";
    for (const auto& name : catalog_names()) {
        ModelCurrent c = catalog(name);
        const char* cls = c.monotonicity == MonotonicityClass::Psh    ? "psh"
                          : c.monotonicity == MonotonicityClass::Prh  ? "prh"
                          : c.monotonicity == MonotonicityClass::Closed ? "closed"
                                                                        : "none";
        os << "  " << name << "  bidegree (" << c.bidegree() << "," << c.bidegree()
           << ")  split (" << c.n() << "," << c.m() << ")  " << cls
           << (c.smooth ? "  smooth" : "") << "  validity radius " << c.validityEuclid << "\n"
           << "      " << catalog_description(name) << "\n";
    }
    os << "weights:\n"
       << "  euclid |z|^2 homogeneity 1 (euclid[:scale], validity radius 1)\n"
       << "  aniso sum lambda_j |z_j|^2 homogeneity 1 (aniso:l1,l2,...)\n"
       << "  powers base^p homogeneity p (p >= 2), e.g. euclid^2 = |z|^4\n";
    return os.str();
}

int run(const std::string& configPath, int jobs, std::optional<double> tolOverride,
        std::optional<std::uint64_t> seedOverride, const std::string& outDir) {
    std::optional<long long> budgetOverride;
    if (const char* env = std::getenv("LELONG_BUDGET")) {
        try {
            budgetOverride = std::stoll(env);
        } catch (const std::exception&) {
            std::fprintf(stderr, "invalid LELONG_BUDGET '%s'\n", env);
            return 2;
        }
    }
    std::vector<Scenario> scenarios;
    RunResult res;
    try {
        scenarios = parse_config_file(configPath);
        res = run_scenarios(scenarios, jobs, tolOverride, seedOverride, budgetOverride);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    }
    std::ofstream csv(outDir + "/report.csv");
    if (!csv) {
        std::fprintf(stderr, "cannot write %s/report.csv\n", outDir.c_str());
        return 2;
    }
    write_csv(csv, res.rows);
    std::ofstream js(outDir + "/summary.json");
    js << res.jsonSummary;
    for (const auto& row : res.rows)
        if (row.verdict != "pass")
            std::fprintf(stderr, "%s/%s: %s\n", row.scenario.c_str(), row.check.c_str(),
                         row.verdict.c_str());
    return res.exitCode;
}

}  // namespace lelong::cli
