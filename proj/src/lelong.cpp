#include "lelong/lelong.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace lelong {

namespace {

// ---- effective-frame embedding ---------------------------------------------
struct SliceFrame {
    std::vector<int> keptZ;  // full-frame z indices kept on the slice
    int n = 0, m = 0;
};

SliceFrame slice_frame(const ModelCurrent& C) {
    SliceFrame fr;
    fr.n = C.n();
    fr.m = C.m();
    const auto& J = C.sliceIndices();
    for (int i = 0; i < fr.n; ++i)
        if (std::find(J.begin(), J.end(), i) == J.end()) fr.keptZ.push_back(i);
    return fr;
}

CPoint full_point(const SliceFrame& fr, const CVector& eff) {
    CPoint p;
    p.n = fr.n;
    p.m = fr.m;
    p.coords = CVector::Zero(fr.n + fr.m);
    int dz = static_cast<int>(fr.keptZ.size());
    for (int j = 0; j < dz; ++j) p.coords(fr.keptZ[j]) = eff(j);
    for (int j = 0; j < fr.m; ++j) p.coords(fr.n + j) = eff(dz + j);
    return p;
}

HermitianForm beta_v_full(int n, int m) {
    CMatrix H = CMatrix::Zero(n + m, n + m);
    H.bottomRightCorner(m, m) = CMatrix::Identity(m, m);
    return HermitianForm(std::move(H));
}

// map full-frame annotation loci to effective coordinates of the slice
std::vector<SingularityAnnotation> effective_annotations(const ModelCurrent& C,
                                                         const SliceFrame& fr) {
    std::vector<SingularityAnnotation> out;
    int dz = static_cast<int>(fr.keptZ.size());
    for (const auto& a : C.annotations) {
        SingularityAnnotation e = a;
        e.locus.clear();
        for (int i : a.locus) {
            if (i < fr.n) {
                auto it = std::find(fr.keptZ.begin(), fr.keptZ.end(), i);
                if (it != fr.keptZ.end())
                    e.locus.push_back(static_cast<int>(it - fr.keptZ.begin()));
            } else {
                e.locus.push_back(dz + (i - fr.n));
            }
        }
        if (e.locus.empty())
            throw std::domain_error("annotation locus contains the whole slice " + C.name);
        out.push_back(std::move(e));
    }
    return out;
}

// merge Power annotations sharing a locus (kernels multiply, exponents add)
// and fold in the alpha-form singularity at the effective z-origin
std::vector<SingularityAnnotation> compose_annotations(std::vector<SingularityAnnotation> anns,
                                                       int dz, int nAlpha) {
    if (nAlpha > 0 && dz > 0) {
        SingularityAnnotation a;
        for (int j = 0; j < dz; ++j) a.locus.push_back(j);
        a.kernel = SingularityAnnotation::Kernel::Power;
        a.alpha = 2.0 * nAlpha;
        anns.push_back(std::move(a));
    }
    std::vector<SingularityAnnotation> merged;
    for (auto& a : anns) {
        std::sort(a.locus.begin(), a.locus.end());
        bool found = false;
        for (auto& b : merged) {
            if (b.locus != a.locus) continue;
            found = true;
            if (a.kernel == SingularityAnnotation::Kernel::Power) {
                if (b.kernel == SingularityAnnotation::Kernel::Power)
                    b.alpha += a.alpha;
                else {
                    b.kernel = SingularityAnnotation::Kernel::Power;
                    b.alpha = a.alpha;
                }
            }
            break;
        }
        if (!found) merged.push_back(a);
    }
    return merged;
}

struct MassProblem {
    Region region;
    EffIntegrand f;
};

MassProblem mass_problem(const ModelCurrent& C, const Weight& phi, const DirectionalBall& B,
                         double rLo, double rHi, int nAlpha, int nBeta) {
    if (B.m != C.m()) throw std::invalid_argument("paired_mass: ball/current split mismatch");
    SliceFrame fr = slice_frame(C);
    int dz = static_cast<int>(fr.keptZ.size());
    if (dz == 0 && nAlpha > 0)
        throw std::invalid_argument("paired_mass: alpha-form against a point slice");

    MassProblem mp;
    mp.region.dz = dz;
    mp.region.zWeight = C.sliceIndices().empty() ? phi : phi.restricted(C.sliceIndices());
    mp.region.rLo = rLo;
    mp.region.rHi = rHi;
    mp.region.tBall = B;
    mp.region.annotations = compose_annotations(effective_annotations(C, fr), dz, nAlpha);

    if (dz > 0) {
        double bound = mp.region.zWeight.sublevelBound(rHi);
        if (bound > C.validityEuclid + 1e-12)
            throw std::out_of_range("paired_mass: sublevel set exceeds the validity radius of " +
                                    C.name);
    }
    int m = C.m();
    HermitianForm bv = beta_v_full(C.n(), m);
    mp.f = [C, phi, fr, nAlpha, nBeta, m, bv](const CVector& eff) {
        CPoint p = full_point(fr, eff);
        std::vector<HermitianForm> forms;
        forms.reserve(nAlpha + nBeta + m);
        if (nAlpha > 0) {
            HermitianForm a = alpha(phi, p);
            for (int j = 0; j < nAlpha; ++j) forms.push_back(a);
        }
        if (nBeta > 0) {
            HermitianForm b = beta(phi, p);
            for (int j = 0; j < nBeta; ++j) forms.push_back(b);
        }
        for (int j = 0; j < m; ++j) forms.push_back(bv);
        return C.densityAt(p, forms);
    };
    return mp;
}

void check_counts(const ModelCurrent& C, int nAlpha, int nBeta) {
    if (nAlpha < 0 || nBeta < 0) throw std::invalid_argument("paired_mass: negative form count");
    if (C.kind() == ModelCurrent::Kind::Zero) return;
    if (nAlpha + nBeta != C.n() - C.bidegree())
        throw std::invalid_argument("paired_mass: form counts incompatible with bidegree of " +
                                    C.name);
}

// ---- least-squares fits -----------------------------------------------------
struct LinFit {
    double a = 0, b = 0, rms = 0;
};

LinFit fit2(const std::vector<double>& x, const std::vector<double>& y) {
    size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    double det = n * sxx - sx * sx;
    LinFit f;
    if (std::abs(det) < 1e-300) {
        f.a = sy / n;
        f.b = 0;
    } else {
        f.b = (n * sxy - sx * sy) / det;
        f.a = (sy - f.b * sx) / n;
    }
    double ss = 0;
    for (size_t i = 0; i < n; ++i) {
        double d = y[i] - f.a - f.b * x[i];
        ss += d * d;
    }
    f.rms = std::sqrt(ss / n);
    return f;
}

struct PowerFit {
    double c = 0, alpha = 0, residual = 0;  // y(s) ~ c s^alpha (signed c)
    bool valid = false;
};

// log-log fit of |y| against s over the points clearly above the noise floor
PowerFit fit_power(const std::vector<double>& s, const std::vector<double>& y, double noise) {
    PowerFit pf;
    std::vector<double> lx, ly;
    int pos = 0, neg = 0;
    for (size_t i = 0; i < s.size(); ++i) {
        if (std::abs(y[i]) <= noise) continue;
        (y[i] > 0 ? pos : neg)++;
        lx.push_back(std::log(s[i]));
        ly.push_back(std::log(std::abs(y[i])));
    }
    if (lx.size() < 3 || (pos > 0 && neg > 0)) return pf;
    LinFit f = fit2(lx, ly);
    pf.c = (pos > 0 ? 1.0 : -1.0) * std::exp(f.a);
    pf.alpha = f.b;
    pf.residual = f.rms;  // relative, since the fit is in log space
    pf.valid = true;
    return pf;
}

double quad_noise(const RadialProfile& prof) {
    double s = 0;
    for (const auto& e : prof.nu) s = std::max(s, e.error);
    return s + 1e-12;
}

// ---- ds-integrals -----------------------------------------------------------
// int_0^r w(s) nu(s) / s ds with w(s) = sum_j coeff_j s^{e_j}; the profile is
// interpolated linearly between measured points and each segment integrated
// in closed form against the power weights; the fitted-model tail covers
// (0, s_min].
struct PowTerm {
    double coeff, expnt;
};

// int_{s0}^{s1} s^p ds (s0, s1 > 0)
double ipow(double s0, double s1, double p) {
    if (std::abs(p + 1.0) < 1e-12) return std::log(s1 / s0);
    return (std::pow(s1, p + 1) - std::pow(s0, p + 1)) / (p + 1);
}

// int_{s0}^{s1} s^e * (linear through (s0,y0), (s1,y1)) ds
double seg_powlin(double s0, double s1, double y0, double y1, double e) {
    double slope = (y1 - y0) / (s1 - s0);
    return (y0 - slope * s0) * ipow(s0, s1, e) + slope * ipow(s0, s1, e + 1.0);
}

// xs ascending; sum_j terms_j int xs^{e_j} * piecewise-linear(ys) over
// [xs[0], xs.back()] using every stride-th node
double grid_powint(const std::vector<double>& xs, const std::vector<double>& ys,
                   const std::vector<PowTerm>& terms, size_t stride) {
    if (xs.size() < 2) return 0.0;
    double acc = 0;
    size_t prev = 0;
    while (prev + 1 < xs.size()) {
        size_t cur = std::min(prev + stride, xs.size() - 1);
        for (const auto& t : terms)
            acc += t.coeff * seg_powlin(xs[prev], xs[cur], ys[prev], ys[cur], t.expnt);
        prev = cur;
    }
    return acc;
}

Estimate ds_integral(const RadialProfile& prof, const PowerFit& fit, double r,
                     const std::vector<PowTerm>& wterms) {
    std::vector<double> s, nuv, nue;
    for (size_t i = prof.grid.size(); i-- > 0;) {  // ascending s
        if (prof.grid[i] > r * (1 + 1e-12)) break;
        s.push_back(prof.grid[i]);
        nuv.push_back(prof.nu[i].value);
        nue.push_back(prof.nu[i].error);
    }
    Estimate out;
    out.strategy = "profile-powint";
    if (s.empty()) throw std::invalid_argument("ds_integral: no profile points below r");
    if (s.back() < r * (1 - 1e-9)) {  // constant extension on the uncovered [s_max, r]
        s.push_back(r);
        nuv.push_back(nuv.back());
        nue.push_back(nue.back() + 0.1 * std::abs(nuv.back()));
    }
    // the extra s^{-1} of the measure shifts every exponent down by one
    std::vector<PowTerm> terms, absTerms;
    for (const auto& t : wterms) {
        terms.push_back({t.coeff, t.expnt - 1.0});
        absTerms.push_back({std::abs(t.coeff), t.expnt - 1.0});
    }
    double fine = grid_powint(s, nuv, terms, 1);
    double coarse = grid_powint(s, nuv, terms, 2);
    out.value = fine;
    out.error = std::abs(fine - coarse) + grid_powint(s, nue, absTerms, 1) + 1e-15;

    // tail below the smallest measured s
    double smin = s.front();
    if (fit.valid && std::abs(fit.c) > 0) {
        double tail = 0;
        for (const auto& t : wterms) {
            double e = fit.alpha + t.expnt;
            if (e <= 1e-9)
                throw std::domain_error("ds_integral: divergent tail (exponent " +
                                        std::to_string(e) + ")");
            tail += t.coeff * fit.c * std::pow(smin, e) / e;
        }
        out.value += tail;
        out.error += std::abs(tail) * (0.25 + fit.residual);
    }
    return out;
}

std::pair<double, double> limit_value(const RadialProfile& prof, const NuVerdict& v) {
    if (v.kind == NuVerdict::Kind::Converged) return {v.value, v.uncertainty};
    const Estimate& last = prof.nu.back();
    double spread = std::abs(last.value - prof.nu.front().value);
    return {last.value, last.error + spread};
}

}  // namespace

// ---- masses and profiles ----------------------------------------------------
Estimate paired_mass(const ModelCurrent& C, const Weight& phi, const DirectionalBall& B,
                     double rLo, double rHi, int nAlpha, int nBeta,
                     const QuadratureOptions& opts) {
    check_counts(C, nAlpha, nBeta);
    switch (C.kind()) {
        case ModelCurrent::Kind::Zero:
            return Estimate{0.0, 0.0, 0, "zero"};
        case ModelCurrent::Kind::ScaledSum: {
            Estimate acc{0.0, 0.0, 0, "scaled-sum"};
            for (const auto& [c, t] : C.terms()) {
                Estimate e = paired_mass(t, phi, B, rLo, rHi, nAlpha, nBeta, opts);
                acc.value += c * e.value;
                acc.error += std::abs(c) * e.error;
                acc.evals += e.evals;
            }
            return acc;
        }
        default: {
            MassProblem mp = mass_problem(C, phi, B, rLo, rHi, nAlpha, nBeta);
            return integrate(mp.region, mp.f, opts);
        }
    }
}

std::vector<Estimate> paired_masses_nested(const ModelCurrent& C, const Weight& phi,
                                           const DirectionalBall& B,
                                           const std::vector<double>& grid, int nAlpha, int nBeta,
                                           const QuadratureOptions& opts) {
    check_counts(C, nAlpha, nBeta);
    switch (C.kind()) {
        case ModelCurrent::Kind::Zero:
            return std::vector<Estimate>(grid.size(), Estimate{0.0, 0.0, 0, "zero"});
        case ModelCurrent::Kind::ScaledSum: {
            std::vector<Estimate> acc(grid.size(), Estimate{0.0, 0.0, 0, "scaled-sum"});
            for (const auto& [c, t] : C.terms()) {
                auto es = paired_masses_nested(t, phi, B, grid, nAlpha, nBeta, opts);
                for (size_t i = 0; i < grid.size(); ++i) {
                    acc[i].value += c * es[i].value;
                    acc[i].error += std::abs(c) * es[i].error;
                    acc[i].evals += es[i].evals;
                }
            }
            return acc;
        }
        default: {
            MassProblem mp = mass_problem(C, phi, B, 0.0, grid.front(), nAlpha, nBeta);
            return nested_masses(mp.region, grid, mp.f, opts);
        }
    }
}

Estimate nu_at(const ModelCurrent& C, const Weight& phi, const DirectionalBall& B, double r,
               const QuadratureOptions& opts) {
    if (r <= 0 || r >= phi.validityRadius())
        throw std::out_of_range("nu_at: need 0 < r < R(phi)");
    int nk = C.n() - C.bidegree();
    if (C.kind() != ModelCurrent::Kind::Zero && nk < 0)
        throw std::invalid_argument("nu_at: bidegree exceeds the z-dimension for " + C.name);
    Estimate e = paired_mass(C, phi, B, 0.0, r, 0, std::max(nk, 0), opts);
    double scale = std::pow(r, -nk);
    e.value *= scale;
    e.error *= scale;
    return e;
}

RadialProfile radial_profile(const ModelCurrent& C, const Weight& phi, const DirectionalBall& B,
                             const std::vector<double>& grid, const QuadratureOptions& opts) {
    if (grid.empty()) throw std::invalid_argument("radial_profile: empty grid");
    for (double r : grid)
        if (r <= 0 || r >= phi.validityRadius())
            throw std::out_of_range("radial_profile: grid point outside (0, R(phi))");
    RadialProfile prof;
    prof.grid = grid;
    prof.exponent = C.n() - C.bidegree();
    prof.nu = paired_masses_nested(C, phi, B, grid, 0, std::max(prof.exponent, 0), opts);
    for (size_t i = 0; i < grid.size(); ++i) {
        double scale = std::pow(grid[i], -prof.exponent);
        prof.nu[i].value *= scale;
        prof.nu[i].error *= scale;
    }
    return prof;
}

// ---- limit extrapolation ------------------------------------------------------
NuVerdict nu_limit(const RadialProfile& profile) {
    size_t n = profile.grid.size();
    if (n < 6) throw std::invalid_argument("nu_limit: need at least 6 grid points");
    std::vector<double> r = profile.grid, y(n);
    for (size_t i = 0; i < n; ++i) y[i] = profile.nu[i].value;
    double sigma = quad_noise(profile);
    double ymax = 0;
    for (double v : y) ymax = std::max(ymax, std::abs(v));

    // constant
    double a0 = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double rms0 = 0;
    for (double v : y) rms0 += (v - a0) * (v - a0);
    rms0 = std::sqrt(rms0 / n);

    // a + b r^alpha
    LinFit bestP;
    double bestPAlpha = 1.0, rmsP = std::numeric_limits<double>::infinity();
    std::vector<double> x(n);
    for (double al = 0.1; al <= 3.001; al += 0.05) {
        for (size_t i = 0; i < n; ++i) x[i] = std::pow(r[i], al);
        LinFit f = fit2(x, y);
        if (f.rms < rmsP) {
            rmsP = f.rms;
            bestP = f;
            bestPAlpha = al;
        }
    }

    // a + b log(1/r)
    for (size_t i = 0; i < n; ++i) x[i] = std::log(1.0 / r[i]);
    LinFit fL = fit2(x, y);

    // a + b r^{-beta}
    LinFit bestD;
    double bestDBeta = 0.5, rmsD = std::numeric_limits<double>::infinity();
    for (double be = 0.05; be <= 2.001; be += 0.05) {
        for (size_t i = 0; i < n; ++i) x[i] = std::pow(r[i], -be);
        LinFit f = fit2(x, y);
        if (f.rms < rmsD) {
            rmsD = f.rms;
            bestD = f;
            bestDBeta = be;
        }
    }

    NuVerdict v;
    double noise = 3 * sigma + 1e-9;
    // monotone |y| growth toward r -> 0 over the last >= 5 points
    int growthRun = 1;
    for (size_t i = n - 1; i > 0; --i) {
        if (std::abs(y[i]) > std::abs(y[i - 1]) + 0.1 * sigma)
            ++growthRun;
        else
            break;
    }
    double growth = std::abs(y[n - 1]) - std::abs(y[0]);
    bool growing = growthRun >= 5 && growth > 10 * noise;

    if (rms0 <= std::max(noise, 1e-4 * std::abs(a0))) {
        v.kind = NuVerdict::Kind::Converged;
        v.value = a0;
        v.uncertainty = rms0 + sigma;
        v.residual = rms0;
        v.model = "constant";
        return v;
    }
    double best = std::min({rms0, rmsP, fL.rms, rmsD});
    if (best == rmsP || best == rms0) {
        v.kind = NuVerdict::Kind::Converged;
        if (best == rmsP) {
            v.value = bestP.a;
            v.uncertainty = rmsP + sigma + 0.5 * std::abs(bestP.b) * std::pow(r[n - 1], bestPAlpha);
            v.residual = rmsP;
            v.model = "power-correction(alpha=" + std::to_string(bestPAlpha) + ")";
        } else {
            v.value = a0;
            v.uncertainty = rms0 + sigma;
            v.residual = rms0;
            v.model = "constant";
        }
        return v;
    }
    bool logWins = fL.rms <= rmsD;
    double rmsDiv = logWins ? fL.rms : rmsD;
    if (growing && rmsDiv <= 0.01 * ymax + sigma) {
        v.kind = NuVerdict::Kind::Diverges;
        v.rate = logWins ? NuVerdict::Rate::Log : NuVerdict::Rate::Power;
        v.beta = logWins ? 0.0 : bestDBeta;
        v.residual = rmsDiv;
        v.model = logWins ? "log-divergence" : ("power-divergence(beta=" + std::to_string(bestDBeta) + ")");
        return v;
    }
    v.kind = NuVerdict::Kind::Inconclusive;
    v.residual = best;
    v.model = "none";
    return v;
}

// ---- Condition (C) ------------------------------------------------------------
ConditionCReport condition_c(const ModelCurrent& T, const Weight& phi, const DirectionalBall& B,
                             const std::vector<double>& grid, const QuadratureOptions& opts) {
    const ModelCurrent& D = ddc(T);
    ConditionCReport rep;
    rep.ddcProfile = radial_profile(D, phi, B, grid, opts);
    const auto& prof = rep.ddcProfile;
    size_t n = grid.size();
    std::vector<double> y(n);
    for (size_t i = 0; i < n; ++i) y[i] = prof.nu[i].value;
    double sigma = quad_noise(prof);
    double ymax = 0, ymin = std::numeric_limits<double>::infinity();
    for (double v : y) {
        ymax = std::max(ymax, std::abs(v));
        ymin = std::min(ymin, std::abs(v));
    }

    if (ymax <= std::max(10 * sigma, 1e-7)) {
        rep.verdict = ConditionCReport::Verdict::TriviallyHolds;
        return rep;
    }
    PowerFit pf = fit_power(grid, y, 3 * sigma);
    if (!pf.valid) {
        rep.verdict = ConditionCReport::Verdict::Inconclusive;
        return rep;
    }
    rep.alpha = pf.alpha;
    rep.coeff = pf.c;
    rep.residual = pf.residual;

    // tail of int s^{-1} nu ds: trapezoid on the grid plus the model below
    bool integrable = pf.alpha > 0.05;
    Estimate tail{0, 0, 0, ""};
    PowerFit tailFit = pf;
    if (!integrable) tailFit.valid = false;  // report the partial sums only
    tail = ds_integral(prof, tailFit, grid.front(), {{1.0, 0.0}});
    rep.tailIntegral = tail.value;

    if (pf.alpha >= 0.2 && pf.residual < 0.10)
        rep.verdict = ConditionCReport::Verdict::Holds;
    else if (std::abs(pf.alpha) < 0.05 && ymin > 0.5 * ymax)
        rep.verdict = ConditionCReport::Verdict::Fails;
    else
        rep.verdict = ConditionCReport::Verdict::Inconclusive;
    return rep;
}

// ---- g --------------------------------------------------------------------------
std::vector<Estimate> g_profile(const ModelCurrent& T, const Weight& phi,
                                const DirectionalBall& B, const std::vector<double>& grid,
                                const QuadratureOptions& opts) {
    ConditionCReport cc = condition_c(T, phi, B, grid, opts);
    if (cc.verdict != ConditionCReport::Verdict::Holds &&
        cc.verdict != ConditionCReport::Verdict::TriviallyHolds)
        throw std::domain_error("g_function: integrability condition fails for " + T.name +
                                ", g is not well defined");
    RadialProfile profT = radial_profile(T, phi, B, grid, opts);
    int nk = profT.exponent;
    PowerFit fit;
    fit.valid = cc.verdict == ConditionCReport::Verdict::Holds;
    fit.c = cc.coeff;
    fit.alpha = cc.alpha;
    fit.residual = cc.residual;

    std::vector<Estimate> out(grid.size());
    for (size_t i = 0; i < grid.size(); ++i) {
        double r = grid[i];
        Estimate corr = ds_integral(cc.ddcProfile, fit, r,
                                    {{std::pow(r, -nk), static_cast<double>(nk)}, {-1.0, 0.0}});
        out[i].value = profT.nu[i].value + corr.value;
        out[i].error = profT.nu[i].error + corr.error;
        out[i].evals = profT.nu[i].evals + corr.evals;
        out[i].strategy = "g";
    }
    return out;
}

Estimate g_function(const ModelCurrent& T, const Weight& phi, const DirectionalBall& B, double r,
                    const std::vector<double>& gridBelow, const QuadratureOptions& opts) {
    std::vector<double> grid;
    grid.push_back(r);
    for (double s : gridBelow)
        if (s < r * (1 - 1e-12)) grid.push_back(s);
    if (grid.size() < 4) throw std::invalid_argument("g_function: need a grid below r");
    return g_profile(T, phi, B, grid, opts).front();
}

// ---- Lelong-Jensen ---------------------------------------------------------------
Estimate lelong_jensen_residual(const ModelCurrent& T, const Weight& phi,
                                const DirectionalBall& B, double r1, double r2, int p, int q,
                                const QuadratureOptions& opts) {
    int nk = T.n() - T.bidegree();
    if (!(0 < r1 && r1 < r2 && r2 < phi.validityRadius()))
        throw std::out_of_range("lelong_jensen_residual: need 0 < r1 < r2 < R(phi)");
    if (p < 1 || p > nk || q < 0 || q >= p)
        throw std::invalid_argument("lelong_jensen_residual: need 1 <= p <= n-k, 0 <= q < p");
    if (q != p - 1 && !T.smooth)
        throw std::invalid_argument(
            "lelong_jensen_residual: q != p-1 is admissible only for smooth currents");
    if (T.kind() == ModelCurrent::Kind::Zero) return Estimate{0.0, 0.0, 0, "lelong-jensen"};
    const ModelCurrent& D = ddc(T);

    Estimate A2 = paired_mass(T, phi, B, 0.0, r2, p - q - 1, nk - p + q + 1, opts);
    Estimate A1 = paired_mass(T, phi, B, 0.0, r1, p - q - 1, nk - p + q + 1, opts);
    double w2 = std::pow(r2, -(q + 1)), w1 = std::pow(r1, -(q + 1));
    double lhs = w2 * A2.value - w1 * A1.value;
    double err = w2 * A2.error + w1 * A1.error;
    long long evals = A2.evals + A1.evals;

    Estimate t3 = paired_mass(T, phi, B, r1, r2, p, nk - p, opts);
    err += t3.error;
    evals += t3.evals;

    // one nested pass for D(s) on a combined geometric grid through r1
    std::vector<double> sGrid;
    const int above = 12, below = 10;
    for (int i = 0; i <= above; ++i) sGrid.push_back(r2 * std::pow(r1 / r2, double(i) / above));
    for (int i = 1; i <= below; ++i) sGrid.push_back(r1 * std::pow(0.55, i));
    // the D-profile only enters through smoothing ds-integrals, so a relaxed
    // per-shell tolerance suffices; its quadrature errors still propagate
    // into the residual error below
    QuadratureOptions optsD = opts;
    optsD.tol = 3 * opts.tol;
    auto Dm = paired_masses_nested(D, phi, B, sGrid, p - q - 1, nk - p + q, optsD);
    // nested estimates carry cumulative eval counts; the outermost one is the
    // total work of the pass
    evals += Dm.front().evals;

    // sGrid is decreasing; exact segment integration of the piecewise-linear
    // interpolant of D against the power weights, ascending over [lo, hi]
    auto powint = [&](size_t lo, size_t hi, const std::vector<PowTerm>& terms, size_t stride) {
        std::vector<double> xs, ys;
        for (size_t i = hi + 1; i-- > lo;) {
            xs.push_back(sGrid[i]);
            ys.push_back(Dm[i].value);
        }
        return grid_powint(xs, ys, terms, stride);
    };
    std::vector<PowTerm> w4terms{{1.0, -double(q + 1)}, {-w2, 0.0}};
    auto w4 = [&](double s) { return std::pow(s, -(q + 1)) - w2; };
    double t4 = powint(0, above, w4terms, 1);
    err += std::abs(t4 - powint(0, above, w4terms, 2));
    for (int i = 0; i <= above; ++i) err += std::abs(w4(sGrid[i])) * Dm[i].error;

    // int_0^{r1} D(s) ds: segment integration over [s_min, r1] + fitted tail
    std::vector<PowTerm> oneTerm{{1.0, 0.0}};
    double i5 = powint(above, sGrid.size() - 1, oneTerm, 1);
    double i5err = std::abs(i5 - powint(above, sGrid.size() - 1, oneTerm, 2));
    for (size_t i = above; i < sGrid.size(); ++i) i5err += Dm[i].error;
    {
        std::vector<double> ss, dd;
        double dnoise = 0;
        for (size_t i = above; i < sGrid.size(); ++i) {
            ss.push_back(sGrid[i]);
            dd.push_back(Dm[i].value);
            dnoise = std::max(dnoise, Dm[i].error);
        }
        PowerFit pf = fit_power(ss, dd, 3 * dnoise + 1e-14);
        double smin = sGrid.back();
        if (pf.valid && pf.alpha > -1.0 + 1e-9) {
            double tail = pf.c * std::pow(smin, pf.alpha + 1) / (pf.alpha + 1);
            i5 += tail;
            i5err += std::abs(tail) * (0.25 + pf.residual);
        } else {
            // no reliable model: bound the tail by a constant extension
            i5err += std::abs(dd.back()) * smin;
        }
    }
    double t5 = (w1 - w2) * i5;
    err += (w1 - w2) * i5err;

    Estimate out;
    out.value = lhs - (t3.value + t4 + t5);
    out.error = err + 1e-12;
    out.evals = evals;
    out.strategy = "lelong-jensen";
    return out;
}

// ---- scaling law -------------------------------------------------------------------
ScalingReport scaling_check(const ModelCurrent& T, const Weight& phi, const DirectionalBall& B,
                            int p, const std::vector<double>& grid,
                            const QuadratureOptions& opts) {
    if (p < 2) throw std::invalid_argument("scaling_check: p must be >= 2");
    if (T.monotonicity != MonotonicityClass::Psh && T.monotonicity != MonotonicityClass::Prh)
        throw std::invalid_argument("scaling_check: current must be declared psh or prh");
    int nk = T.n() - T.bidegree();
    if (nk < 1) throw std::invalid_argument("scaling_check: need n - k >= 1");
    const ModelCurrent& D = ddc(T);

    RadialProfile profT = radial_profile(T, phi, B, grid, opts);
    RadialProfile profD = radial_profile(D, phi, B, grid, opts);
    PowerFit fit = fit_power(grid, [&] {
        std::vector<double> v(grid.size());
        for (size_t i = 0; i < v.size(); ++i) v[i] = profD.nu[i].value;
        return v;
    }(), 3 * quad_noise(profD));

    Weight phip = power_weight(phi, p);
    std::vector<double> gridP(grid.size());
    for (size_t i = 0; i < grid.size(); ++i) gridP[i] = std::pow(grid[i], p);
    RadialProfile profL = radial_profile(T, phip, B, gridP, opts);

    ScalingReport rep;
    double pnk = std::pow(double(p), nk);
    for (size_t i = 0; i < grid.size(); ++i) {
        double r = grid[i];
        Estimate corr = ds_integral(
            profD, fit, r,
            {{std::pow(r, -nk), double(nk)}, {-std::pow(r, -nk * p), double(nk) * p}});
        ScalingPoint pt;
        pt.r = r;
        pt.lhs = profL.nu[i].value;
        pt.rhs = pnk * (profT.nu[i].value + corr.value);
        pt.residual = pt.lhs - pt.rhs;
        pt.error = profL.nu[i].error + pnk * (profT.nu[i].error + corr.error);
        rep.maxResidual = std::max(rep.maxResidual, std::abs(pt.residual));
        rep.maxError = std::max(rep.maxError, pt.error);
        rep.points.push_back(pt);
    }
    NuVerdict vT = nu_limit(profT), vD = nu_limit(profD), vL = nu_limit(profL);
    if (vT.kind == NuVerdict::Kind::Converged && vD.kind == NuVerdict::Kind::Converged) {
        rep.limitsAvailable = true;
        rep.limitRhs = pnk * (vT.value + double(p - 1) / (p * nk) * vD.value);
        auto [lv, le] = limit_value(profL, vL);
        rep.limitLhs = lv;
        rep.limitError = le + pnk * (vT.uncertainty + vD.uncertainty);
    }
    return rep;
}

// ---- comparison ---------------------------------------------------------------------
ComparisonReport comparison_check(const ModelCurrent& T, const Weight& phi, const Weight& psi,
                                  double ell, const DirectionalBall& B,
                                  const std::vector<double>& grid,
                                  const QuadratureOptions& opts) {
    ComparisonReport rep;
    rep.ell = ell;
    rep.exponent = T.n() - T.bidegree();
    rep.psiCondition = condition_c(T, psi, B, grid, opts);
    if (rep.psiCondition.verdict != ConditionCReport::Verdict::Holds &&
        rep.psiCondition.verdict != ConditionCReport::Verdict::TriviallyHolds)
        throw std::domain_error("comparison_check: the integrability hypothesis fails for (" +
                                T.name + ", " + psi.name() + ")");
    RadialProfile profPhi = radial_profile(T, phi, B, grid, opts);
    RadialProfile profPsi = radial_profile(T, psi, B, grid, opts);
    rep.nuPhi = nu_limit(profPhi);
    rep.nuPsi = nu_limit(profPsi);
    rep.converged = rep.nuPhi.kind == NuVerdict::Kind::Converged &&
                    rep.nuPsi.kind == NuVerdict::Kind::Converged;
    auto [vphi, ephi] = limit_value(profPhi, rep.nuPhi);
    auto [vpsi, epsi] = limit_value(profPsi, rep.nuPsi);
    if (std::abs(vphi) < 1e-12)
        throw std::domain_error("comparison_check: nu(T, phi, B) vanishes, ratio undefined");
    rep.ratio = vpsi / vphi;
    rep.ratioError = (epsi + std::abs(rep.ratio) * ephi) / std::abs(vphi);
    return rep;
}

// ---- k = 0 identity ------------------------------------------------------------------
std::pair<Estimate, Estimate> k0_identity(const ModelCurrent& h, const DirectionalBall& B,
                                          const std::vector<double>& grid,
                                          const QuadratureOptions& opts) {
    if (h.bidegree() != 0 || h.kind() != ModelCurrent::Kind::Factored)
        throw std::invalid_argument("k0_identity: needs a bidegree-0 function current");
    Weight phi = Weight::euclid(h.n());
    RadialProfile prof = radial_profile(h, phi, B, grid, opts);
    NuVerdict v = nu_limit(prof);
    auto [val, unc] = limit_value(prof, v);
    Estimate lim;
    lim.value = val;
    lim.error = unc;
    for (const auto& e : prof.nu) lim.evals += e.evals;
    lim.strategy = "nu-limit(" + v.model + ")";

    Region reg;
    reg.dz = 0;
    reg.tBall = B;
    const int n = h.n(), m = h.m();
    const ScalarField& w = h.weight();
    double invPim = std::pow(std::numbers::pi, -m);
    Estimate direct = integrate(
        reg,
        [&](const CVector& t) {
            CVector full = CVector::Zero(n + m);
            full.tail(m) = t;
            return w.value(full) * invPim;
        },
        opts);
    direct.strategy = "direct-slice";
    return {lim, direct};
}

// ---- additivity ------------------------------------------------------------------------
Estimate additivity_check(const ModelCurrent& T, const Weight& phi, const DirectionalBall& B1,
                          const DirectionalBall& B2, const std::vector<double>& grid,
                          const QuadratureOptions& opts) {
    for (const auto& a : B1.parts)
        for (const auto& b : B2.parts)
            if ((a.center - b.center).norm() < a.radius + b.radius)
                throw std::invalid_argument("additivity_check: balls overlap");
    auto nu_of = [&](const DirectionalBall& B) {
        RadialProfile prof = radial_profile(T, phi, B, grid, opts);
        NuVerdict v = nu_limit(prof);
        auto [val, unc] = limit_value(prof, v);
        long long ev = 0;
        for (const auto& e : prof.nu) ev += e.evals;
        return std::tuple<double, double, long long>(val, unc, ev);
    };
    auto [v1, e1, n1] = nu_of(B1);
    auto [v2, e2, n2] = nu_of(B2);
    auto [v12, e12, n12] = nu_of(B1.unionWith(B2));
    Estimate out;
    out.value = v12 - v1 - v2;
    out.error = e1 + e2 + e12 + 1e-12;
    out.evals = n1 + n2 + n12;
    out.strategy = "additivity";
    return out;
}

}  // namespace lelong
