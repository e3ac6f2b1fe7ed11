// Acceptance gate: one criterion per invocation (argv[1] in 1..10), one
// pass/fail line on stdout, exit 0 on pass. Tolerances are pinned here and
// nowhere else; every expected value is either a closed form derived in the
// comments or reproduced by an independent in-file oracle.
#include "lelong/cli.hpp"
#include "lelong/lelong.hpp"

#include "calibration.hpp"
#include "wedge_oracle.hpp"

#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>

using namespace lelong;

namespace {

std::vector<double> geom_grid(double rMax, double ratio, int count) {
    std::vector<double> g(count);
    double r = rMax;
    for (int i = 0; i < count; ++i, r *= ratio) g[i] = r;
    return g;
}

QuadratureOptions opts(double tol) {
    QuadratureOptions o;
    o.tol = tol;
    return o;
}

const DirectionalBall kHalf = DirectionalBall::disc(Complex(0, 0), 0.5);
const DirectionalBall kUnit = DirectionalBall::disc(Complex(0, 0), 1.0);

struct Gate {
    bool ok = true;
    std::ostringstream detail;

    void expect(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            detail << (detail.str().empty() ? "" : "; ") << what;
        }
    }
    void expect_close(double got, double want, double tol, const std::string& what) {
        std::ostringstream os;
        os << what << ": got " << got << ", want " << want << " +- " << tol;
        expect(std::abs(got - want) <= tol, os.str());
    }
};

// --- criterion 1: nu(T2) is identically 1 ----------------------------------
bool crit1(Gate& g) {
    ModelCurrent T2 = catalog("T2");
    Weight phi = Weight::euclid(2);
    for (double r : {0.5, 0.25, 0.1, 0.05, 0.01}) {
        Estimate e = nu_at(T2, phi, kUnit, r, opts(1e-4));
        g.expect_close(e.value, 1.0, 1e-3, "nu(T2, r=" + std::to_string(r) + ")");
    }
    RadialProfile prof = radial_profile(T2, phi, kUnit, geom_grid(0.25, 0.6, 9), opts(1e-4));
    NuVerdict v = nu_limit(prof);
    g.expect(v.kind == NuVerdict::Kind::Converged, "nu(T2) limit must converge");
    if (v.kind == NuVerdict::Kind::Converged)
        g.expect_close(v.value, 1.0, 1e-2, "nu(T2) limit");
    return g.ok;
}

// --- criterion 2: nu(ddc T2) is identically -1 ------------------------------
bool crit2(Gate& g) {
    ModelCurrent d = ddc(catalog("T2"));
    Weight phi = Weight::euclid(2);
    for (double r : {0.5, 0.25, 0.1, 0.05, 0.01}) {
        Estimate e = nu_at(d, phi, kUnit, r, opts(1e-7));
        g.expect_close(e.value, -1.0, 1e-6, "nu(ddcT2, r=" + std::to_string(r) + ")");
    }
    return g.ok;
}

// --- criterion 3: the T1 profile --------------------------------------------
// Closed form: with phi = |z|^2 on C^2, B = D(0, 1/2),
//   nu(T1, r) = (1/r) int_0^r [u log u - (u + 1/4) log(u + 1/4)] du + 1/4
// (polar coordinates in z_1 and t, u = rho^2, v = s^2, inner v-integral done
// exactly). Antiderivative of w log w is w^2/2 log w - w^2/4.
double t1_oracle(double r) {
    auto F = [](double w) { return 0.5 * w * w * std::log(w) - 0.25 * w * w; };
    double termA = F(r);  // int_0^r u log u du (F(0) = 0)
    double termB = F(r + 0.25) - F(0.25);
    return (termA - termB) / r + 0.25;
}

bool crit3(Gate& g) {
    // cross-check the closed form against frozen 50-digit quadrature values
    const double frozen[][2] = {{0.16, 0.426000502530169},
                                {0.04, 0.528895430624422},
                                {0.01, 0.572913200697541},
                                {0.0025, 0.588937971256028}};
    for (auto [r, want] : frozen)
        g.expect(std::abs(t1_oracle(r) - want) < 1e-12, "t1 oracle self-check at r=" +
                                                            std::to_string(r));

    ModelCurrent T1 = catalog("T1");
    Weight phi = Weight::euclid(2);
    for (auto [r, want] : frozen) {
        Estimate e = nu_at(T1, phi, kHalf, r, opts(1e-4));
        g.expect_close(e.value, want, 1e-2 * std::abs(want),
                       "nu(T1, r=" + std::to_string(r) + ")");
    }
    RadialProfile prof = radial_profile(T1, phi, kHalf, geom_grid(0.16, 0.6, 10), opts(1e-4));
    NuVerdict v = nu_limit(prof);
    // the profile tends to log(2)/2 + 1/4, so a required divergence verdict
    // cannot be produced honestly; this clause is expected to fail
    g.expect(v.kind == NuVerdict::Kind::Diverges,
             "nu(T1) limit verdict must be 'diverges' (measured: profile converges to " +
                 std::to_string(v.value) + ")");
    return g.ok;
}

// --- criterion 4: the T0 dichotomy -------------------------------------------
bool crit4(Gate& g) {
    // full-mass normalization: nu(T0_full, r) = 1 - log r, diverging like log(1/r)
    ModelCurrent Tf = catalog("T0_full");
    Weight phi2 = Weight::euclid(2);
    DirectionalBall none = DirectionalBall::none();
    for (double r : {0.25, 0.0625}) {
        Estimate e = nu_at(Tf, phi2, none, r, opts(1e-4));
        g.expect_close(e.value, 1.0 - std::log(r), 1e-3,
                       "nu(T0_full, r=" + std::to_string(r) + ")");
    }
    NuVerdict vf = nu_limit(radial_profile(Tf, phi2, none, geom_grid(0.25, 0.6, 9), opts(1e-4)));
    g.expect(vf.kind == NuVerdict::Kind::Diverges && vf.rate == NuVerdict::Rate::Log,
             "nu(T0_full) must diverge logarithmically");

    // directional normalization: constant log(2)/2 + 1/4
    ModelCurrent Td = catalog("T0");
    Weight phi1 = Weight::euclid(1);
    double want = 0.5 * std::log(2.0) + 0.25;
    for (double r : {0.2, 0.04}) {
        Estimate e = nu_at(Td, phi1, kHalf, r, opts(1e-4));
        g.expect_close(e.value, want, 2e-3, "nu(T0, r=" + std::to_string(r) + ")");
    }
    NuVerdict vd = nu_limit(radial_profile(Td, phi1, kHalf, geom_grid(0.2, 0.6, 9), opts(1e-4)));
    g.expect(vd.kind == NuVerdict::Kind::Converged, "nu(T0) limit must converge");
    if (vd.kind == NuVerdict::Kind::Converged)
        g.expect_close(vd.value, want, 2e-3, "nu(T0) limit");
    return g.ok;
}

// --- criterion 5: the phi^p scaling law ---------------------------------------
bool crit5(Gate& g) {
    Weight phi = Weight::euclid(2);
    auto grid = geom_grid(0.2, 0.6, 8);
    struct Case {
        const char* name;
        DirectionalBall ball;
        int p;
    } cases[] = {{"T2", kUnit, 2}, {"T3", kHalf, 2}, {"T4", kHalf, 3}};
    for (const auto& c : cases) {
        ScalingReport rep = scaling_check(catalog(c.name), phi, c.ball, c.p, grid, opts(1e-4));
        for (const auto& pt : rep.points)
            g.expect(std::abs(pt.residual) <= 3 * pt.error + 1e-9,
                     std::string("scaling residual ") + c.name + " at r=" + std::to_string(pt.r) +
                         ": " + std::to_string(pt.residual) + " vs error " +
                         std::to_string(pt.error));
        if (std::string(c.name) == "T2") {
            // nu(T2, phi^2) = 2 (nu(T2) + (1/2) nu(ddcT2)) = 2 (1 - 1/2) = 1
            g.expect(rep.limitsAvailable, "T2 scaling limits must be available");
            if (rep.limitsAvailable) {
                g.expect_close(rep.limitLhs, 1.0, 2e-2, "nu(T2, phi^2) limit");
                g.expect_close(rep.limitRhs, 1.0, 2e-2, "T2 scaling RHS limit");
            }
        }
    }
    return g.ok;
}

// --- criterion 6: the Lelong-Jensen identity -----------------------------------
bool crit6(Gate& g) {
    Weight phi2 = Weight::euclid(2);
    Weight phi3 = Weight::euclid(3);
    auto check = [&](const char* name, const Weight& phi, const DirectionalBall& B, int p,
                     int q) {
        Estimate e =
            lelong_jensen_residual(catalog(name), phi, B, 0.04, 0.25, p, q, opts(1e-4));
        g.expect(std::abs(e.value) <= 3 * e.error + 1e-9,
                 std::string("LJ(") + name + ", p=" + std::to_string(p) +
                     ", q=" + std::to_string(q) + "): residual " + std::to_string(e.value) +
                     " vs error " + std::to_string(e.error));
    };
    check("T2", phi2, kUnit, 1, 0);
    check("TS", phi2, kHalf, 1, 0);
    check("TS4", phi3, kHalf, 1, 0);
    check("TS4", phi3, kHalf, 2, 0);  // smooth: q < p - 1 allowed
    check("TS4", phi3, kHalf, 2, 1);
    return g.ok;
}

// --- criterion 7: the integrability condition and the g-certificate -------------
bool crit7(Gate& g) {
    Weight phi = Weight::euclid(2);
    auto grid = geom_grid(0.2, 0.6, 8);
    auto verdict = [&](const char* name, const DirectionalBall& B) {
        return condition_c(catalog(name), phi, B, grid, opts(1e-4)).verdict;
    };
    g.expect(verdict("T2", kUnit) == ConditionCReport::Verdict::Fails,
             "condition (C) must fail for T2");
    g.expect(verdict("T3", kHalf) == ConditionCReport::Verdict::TriviallyHolds,
             "condition (C) must hold trivially for T3");
    g.expect(verdict("T4", kHalf) == ConditionCReport::Verdict::Holds,
             "condition (C) must hold for T4");

    for (const char* name : {"T3", "TS"}) {
        auto gp = g_profile(catalog(name), phi, kHalf, grid, opts(1e-4));
        for (size_t i = 0; i + 1 < gp.size(); ++i)
            g.expect(gp[i + 1].value <= gp[i].value + gp[i].error + gp[i + 1].error + 1e-9,
                     std::string("g(") + name + ") must be monotone along the grid");
    }
    Estimate nu3 = nu_at(catalog("T3"), phi, kHalf, 0.04, opts(1e-5));
    g.expect_close(nu3.value, 7.0 / 32.0, 2e-3, "nu(T3)");
    return g.ok;
}

// --- criterion 8: the weight-comparison theorem ----------------------------------
bool crit8(Gate& g) {
    Weight phi = Weight::euclid(2);
    auto grid = geom_grid(0.2, 0.6, 8);
    ModelCurrent T3 = catalog("T3");
    // psi = phi^2, ell = 2: limit ratio ell^{n-k} = 2
    ComparisonReport a =
        comparison_check(T3, phi, Weight::power(phi, 2.0), 2.0, kHalf, grid, opts(1e-4));
    g.expect(a.converged, "comparison(T3, phi^2) must converge");
    if (a.converged) g.expect_close(a.ratio, 2.0, 2e-2, "ratio nu(T3,phi^2)/nu(T3,phi)");
    // psi = 3 phi, ell = 1: limit ratio 1
    ComparisonReport b =
        comparison_check(T3, phi, Weight::euclid(2, 3.0), 1.0, kHalf, grid, opts(1e-4));
    g.expect(b.converged, "comparison(T3, 3 phi) must converge");
    if (b.converged) g.expect_close(b.ratio, 1.0, 2e-2, "ratio nu(T3,3phi)/nu(T3,phi)");
    return g.ok;
}

// --- criterion 9: the k = 0 identity and additivity -------------------------------
bool crit9(Gate& g) {
    auto grid = geom_grid(0.2, 0.6, 8);
    auto [lim, direct] = k0_identity(catalog("H0"), kHalf, grid, opts(1e-4));
    // int_{D(0,1/2)} (1 - |t|^2) omega_t / pi = 7/32
    g.expect_close(direct.value, 7.0 / 32.0, 1e-4, "k0 direct integral");
    g.expect(std::abs(lim.value - direct.value) <= lim.error + direct.error + 2e-3,
             "k0: profile limit " + std::to_string(lim.value) + " vs direct " +
                 std::to_string(direct.value));

    Weight phi = Weight::euclid(2);
    DirectionalBall b2 = DirectionalBall::disc(Complex(0.7, 0.0), 0.2);
    for (const char* name : {"T2", "T3"}) {
        Estimate d = additivity_check(catalog(name), phi, kHalf, b2, grid, opts(1e-4));
        g.expect(std::abs(d.value) <= 3 * d.error + 1e-9,
                 std::string("additivity defect for ") + name + ": " + std::to_string(d.value) +
                     " vs error " + std::to_string(d.error));
    }
    return g.ok;
}

// --- criterion 10: kernel exactness and error honesty ------------------------------
bool crit10(Gate& g) {
    // wedge coefficients against the independent exterior-algebra oracle
    std::mt19937_64 rng(987654321);
    std::normal_distribution<double> nd;
    for (int trial = 0; trial < 100; ++trial) {
        int N = 1 + static_cast<int>(rng() % 3);
        std::vector<CMatrix> mats;
        std::vector<HermitianForm> forms;
        for (int i = 0; i < N; ++i) {
            CMatrix R(N, N);
            for (int a = 0; a < N; ++a)
                for (int b = 0; b < N; ++b) R(a, b) = Complex(nd(rng), nd(rng));
            mats.push_back((R * R.adjoint()).eval());
            forms.emplace_back(CMatrix(mats.back()));
        }
        double got = mixed_wedge_coeff(forms);
        double want = testing::wedge_oracle(mats);
        g.expect(std::abs(got - want) <= 1e-10 * std::max(1.0, std::abs(want)),
                 "wedge coefficient mismatch on trial " + std::to_string(trial));
    }
    // quadrature error honesty on the calibration suite
    for (const auto& c : lelong::testing::calibration_suite()) {
        Estimate e = integrate(c.region, c.f, opts(1e-6));
        g.expect(std::abs(e.value - c.exact) <= 3 * e.error + 1e-12,
                 c.name + ": |" + std::to_string(e.value) + " - " + std::to_string(c.exact) +
                     "| exceeds 3x reported error " + std::to_string(e.error));
    }
    return g.ok;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::fprintf(stderr, "usage: acceptance <criterion 1..10>\n");
        return 2;
    }
    int crit = std::atoi(argv[1]);
    static const struct {
        const char* title;
        bool (*fn)(Gate&);
    } table[] = {
        {"nu(T2) constant 1", crit1},
        {"nu(ddc T2) constant -1", crit2},
        {"T1 profile vs closed form + divergence verdict", crit3},
        {"T0 dichotomy (full log-divergence, directional limit)", crit4},
        {"phi^p scaling law", crit5},
        {"Lelong-Jensen identity", crit6},
        {"integrability condition + g-certificate", crit7},
        {"weight-comparison theorem", crit8},
        {"k=0 identity + additivity", crit9},
        {"kernel exactness + error honesty", crit10},
    };
    if (crit < 1 || crit > 10) {
        std::fprintf(stderr, "criterion must be 1..10\n");
        return 2;
    }
    Gate g;
    bool ok = false;
    try {
        ok = table[crit - 1].fn(g);
    } catch (const std::exception& e) {
        g.ok = false;
        g.detail << (g.detail.str().empty() ? "" : "; ") << "exception: " << e.what();
    }
    if (ok) {
        std::printf("criterion %d (%s): PASS\n", crit, table[crit - 1].title);
        return 0;
    }
    std::printf("criterion %d (%s): FAIL (%s)\n", crit, table[crit - 1].title,
                g.detail.str().c_str());
    return 1;
}
