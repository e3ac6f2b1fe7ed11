#include "lelong/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

namespace lelong {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct KahanSum {
    double s = 0.0, c = 0.0;
    void add(double x) {
        double y = x - c;
        double t = s + y;
        c = (t - s) - y;
        s = t;
    }
};

// ---- resolution ladder ----------------------------------------------------
struct LevelParams {
    int simplexOrder;   // GL order per simplex dimension
    int zPhases;        // per z coordinate
    int radialOrder;    // GL order per radial cell
    int gradedDepth;    // geometric cells toward 0
    int annulusCells;   // log-spaced cells on [sLo, sHi]
    int tPhases;
    int tOrder;         // GL order per t radial cell
    int tRadialCells;   // uniform cells (smooth t-part)
    int tGradedDepth;   // geometric cells when grading toward the center
};

LevelParams level_params(int level, int dz) {
    LevelParams p;
    // catalog form fields conjugate to real matrices under diagonal phase
    // rotation, so the per-coordinate phase frequency is <= 2 and 4 phase
    // nodes are already exact; refine mildly in low dimension only, where
    // the cost of guarding the error estimate is negligible.
    if (dz <= 2) {
        p.simplexOrder = 5 + 2 * level;
        p.zPhases = 4 + std::min(level, 2);
        p.radialOrder = 4 + level;
        p.gradedDepth = 10 + 3 * level;
        p.tPhases = 8 + 2 * std::min(level, 2);
        p.tOrder = 3 + std::min(level, 3);
        p.tRadialCells = 2 + std::max(0, level - 1);
        p.tGradedDepth = 10 + 3 * level;
    } else {
        p.simplexOrder = 3 + level;
        p.zPhases = 2 + std::min(level, 2);
        p.radialOrder = 3 + level;
        p.gradedDepth = 6 + 2 * level;
        p.tPhases = 4 + 2 * std::min(level, 2);
        p.tOrder = 2 + std::min(level, 2);
        p.tRadialCells = 2;
        p.tGradedDepth = 8 + 2 * level;
    }
    p.annulusCells = 6 + 2 * level;
    return p;
}

// ---- node sets -------------------------------------------------------------
struct WeightedDir {
    CVector w;       // point on the unit sphere of C^dz
    double weight;   // includes simplex, phase and 2^{-(dz-1)} factors
};

struct WeightedPoint {
    Complex t;
    double weight;
};

// Duffy map [0,1]^{dz-1} -> simplex {u >= 0, sum u = 1}, tensor GL.
void simplex_nodes(int dz, int order, std::vector<std::pair<std::vector<double>, double>>& out) {
    out.clear();
    const auto& [x, wx] = gauss_legendre01(order);
    if (dz == 1) {
        out.push_back({{1.0}, 1.0});
        return;
    }
    if (dz == 2) {
        for (size_t i = 0; i < x.size(); ++i) out.push_back({{x[i], 1 - x[i]}, wx[i]});
        return;
    }
    if (dz == 3) {
        for (size_t i = 0; i < x.size(); ++i)
            for (size_t j = 0; j < x.size(); ++j) {
                double u1 = x[i], u2 = (1 - x[i]) * x[j], u3 = (1 - x[i]) * (1 - x[j]);
                out.push_back({{u1, u2, u3}, wx[i] * wx[j] * (1 - x[i])});
            }
        return;
    }
    if (dz == 4) {
        for (size_t i = 0; i < x.size(); ++i)
            for (size_t j = 0; j < x.size(); ++j)
                for (size_t k = 0; k < x.size(); ++k) {
                    double r1 = 1 - x[i], r2 = r1 * (1 - x[j]);
                    std::vector<double> u = {x[i], r1 * x[j], r2 * x[k], r2 * (1 - x[k])};
                    out.push_back({u, wx[i] * wx[j] * wx[k] * r1 * r1 * (1 - x[j])});
                }
        return;
    }
    throw std::invalid_argument("quadrature: z-dimension > 4 not supported");
}

std::vector<WeightedDir> direction_nodes(int dz, const LevelParams& lp) {
    std::vector<std::pair<std::vector<double>, double>> simplex;
    simplex_nodes(dz, lp.simplexOrder, simplex);
    int P = lp.zPhases;
    double phaseW = kTwoPi / P;
    double blockFactor = std::pow(2.0, -(dz - 1));

    std::vector<WeightedDir> dirs;
    dirs.reserve(simplex.size() * static_cast<size_t>(std::pow(P, dz)));
    std::vector<int> idx(dz, 0);
    for (const auto& [u, wu] : simplex) {
        std::fill(idx.begin(), idx.end(), 0);
        while (true) {
            WeightedDir d;
            d.w = CVector(dz);
            double w = wu * blockFactor;
            for (int j = 0; j < dz; ++j) {
                double th = kTwoPi * (idx[j] + 0.5) / P;
                d.w(j) = std::sqrt(u[j]) * Complex(std::cos(th), std::sin(th));
                w *= phaseW;
            }
            d.weight = w;
            dirs.push_back(std::move(d));
            int j = 0;
            while (j < dz && ++idx[j] == P) idx[j++] = 0;
            if (j == dz) break;
        }
    }
    return dirs;
}

// radial cells on [lo, hi]; graded geometrically toward lo = 0, log-spaced on
// annuli. Returns (node, weight) pairs including the s^{pow} volume factor.
void radial_nodes(double lo, double hi, int spow, bool graded, int cellsOrDepth, int order,
                  std::vector<std::pair<double, double>>& out) {
    out.clear();
    if (hi <= lo) return;
    const auto& [x, wx] = gauss_legendre01(order);
    auto add_cell = [&](double a, double b) {
        double len = b - a;
        for (size_t i = 0; i < x.size(); ++i) {
            double s = a + len * x[i];
            double w = len * wx[i];
            out.push_back({s, w * std::pow(s, spow)});
        }
    };
    if (lo <= 0.0) {
        if (graded) {
            double b = hi;
            for (int j = 0; j < cellsOrDepth; ++j) {
                double a = b * 0.5;
                add_cell(a, b);
                b = a;
            }
            add_cell(0.0, b);
        } else {
            for (int j = 0; j < cellsOrDepth; ++j)
                add_cell(hi * j / cellsOrDepth, hi * (j + 1) / cellsOrDepth);
        }
    } else {
        double ratio = std::pow(hi / lo, 1.0 / cellsOrDepth);
        double a = lo;
        for (int j = 0; j < cellsOrDepth; ++j) {
            double b = (j + 1 == cellsOrDepth) ? hi : a * ratio;
            add_cell(a, b);
            a = b;
        }
    }
}

std::vector<WeightedPoint> t_nodes(const DirectionalBall& B, const LevelParams& lp,
                                   bool gradeTowardCenter) {
    std::vector<WeightedPoint> out;
    if (B.m == 0) {
        out.push_back({Complex(0, 0), 1.0});
        return out;
    }
    std::vector<std::pair<double, double>> rad;
    for (const auto& ball : B.parts) {
        bool grade = gradeTowardCenter && std::abs(ball.center(0)) < 1e-12;
        radial_nodes(0.0, ball.radius, 1, grade, grade ? lp.tGradedDepth : lp.tRadialCells,
                     lp.tOrder, rad);
        int P = lp.tPhases;
        double phaseW = kTwoPi / P;
        for (const auto& [rho, wr] : rad)
            for (int i = 0; i < P; ++i) {
                double th = kTwoPi * (i + 0.5) / P;
                out.push_back({ball.center(0) + rho * Complex(std::cos(th), std::sin(th)),
                               wr * phaseW});
            }
    }
    return out;
}

// ---- integrability check ---------------------------------------------------
void check_integrable(const Region& region) {
    for (const auto& a : region.annotations) {
        if (a.kernel == SingularityAnnotation::Kernel::Log) continue;
        int codim2 = 2 * static_cast<int>(a.locus.size());
        if (a.alpha < codim2) continue;
        // excluded when the locus forces the whole z-part to 0 and the region
        // is an annulus staying away from phi = 0
        bool locusCoversZ = true;
        for (int j = 0; j < region.dz; ++j)
            if (std::find(a.locus.begin(), a.locus.end(), j) == a.locus.end()) locusCoversZ = false;
        bool excluded = region.rLo > 0.0 && locusCoversZ && region.dz > 0;
        if (!excluded)
            throw std::invalid_argument(
                "quadrature: non-integrable kernel |.|^-" + std::to_string(a.alpha) +
                " on a locus of real codimension " + std::to_string(codim2));
    }
}

bool wants_t_grading(const Region& region) {
    for (const auto& a : region.annotations)
        for (int i : a.locus)
            if (i >= region.dz) return true;
    return false;
}

// narrow annuli need few log-spaced cells; wide ones scale with log(rHi/rLo)
int annulus_cells(const Region& region, const LevelParams& lp, int level) {
    double ratio = region.rHi / std::max(region.rLo, 1e-300);
    int base = std::max(2, static_cast<int>(std::ceil(std::log2(ratio))));
    return std::min(lp.annulusCells, base + 2 * level);
}

long long level_cost(const Region& region, const LevelParams& lp, int level) {
    long long dirs = 1, radial = 1, tcnt = 1;
    if (region.dz >= 1) {
        long long simplex = 1;
        for (int j = 0; j < region.dz - 1; ++j) simplex *= lp.simplexOrder;
        long long phases = 1;
        for (int j = 0; j < region.dz; ++j) phases *= lp.zPhases;
        dirs = simplex * phases;
        radial = static_cast<long long>(lp.radialOrder) *
                 ((region.rLo > 0 ? annulus_cells(region, lp, level) : lp.gradedDepth + 1));
    }
    if (region.tBall.m == 1) {
        int cells = wants_t_grading(region) ? lp.tGradedDepth + 1 : lp.tRadialCells;
        long long perBall = static_cast<long long>(lp.tOrder) * cells * lp.tPhases;
        tcnt = perBall * static_cast<long long>(region.tBall.parts.size());
    }
    return dirs * radial * tcnt;
}

double run_level(const Region& region, const EffIntegrand& f, const LevelParams& lp, int level,
                 long long& evals) {
    int dz = region.dz;
    int m = region.tBall.m;
    auto tns = t_nodes(region.tBall, lp, wants_t_grading(region));
    KahanSum acc;
    CVector pt(dz + m);
    if (dz == 0) {
        if (region.rLo > 0.0) return 0.0;  // empty annulus on a 0-dim z-part
        for (const auto& tn : tns) {
            if (m == 1) pt(0) = tn.t;
            acc.add(tn.weight * f(pt));
            ++evals;
        }
        return acc.s;
    }
    auto dirs = direction_nodes(dz, lp);
    std::vector<std::pair<double, double>> rad;
    for (const auto& d : dirs) {
        double sHi = region.zWeight.radialBound(region.rHi, d.w);
        double sLo = region.rLo > 0 ? region.zWeight.radialBound(region.rLo, d.w) : 0.0;
        radial_nodes(sLo, sHi, 2 * dz - 1, true,
                     region.rLo > 0 ? annulus_cells(region, lp, level) : lp.gradedDepth,
                     lp.radialOrder, rad);
        for (const auto& [s, wr] : rad) {
            pt.head(dz) = s * d.w;
            double wzs = d.weight * wr;
            for (const auto& tn : tns) {
                if (m == 1) pt(dz) = tn.t;
                acc.add(wzs * tn.weight * f(pt));
                ++evals;
            }
        }
    }
    return acc.s;
}

}  // namespace

const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre01(int order) {
    static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
    auto it = cache.find(order);
    if (it != cache.end()) return it->second;
    std::vector<double> x(order), w(order);
    for (int i = 0; i < order; ++i) {
        // Newton iteration on P_n over [-1,1], Chebyshev initial guess
        double t = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = t;
            for (int k = 2; k <= order; ++k) {
                double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            double dp = order * (t * p1 - p0) / (t * t - 1.0);
            double dt = p1 / dp;
            t -= dt;
            if (std::abs(dt) < 1e-15) break;
        }
        double p0 = 1.0, p1 = t;
        for (int k = 2; k <= order; ++k) {
            double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        double dp = order * (t * p1 - p0) / (t * t - 1.0);
        x[i] = 0.5 * (1.0 - t);  // mapped to [0,1], descending t -> ascending x
        w[i] = 1.0 / ((1.0 - t * t) * dp * dp);
    }
    return cache.emplace(order, std::make_pair(std::move(x), std::move(w))).first->second;
}

Estimate integrate(const Region& region, const EffIntegrand& f, const QuadratureOptions& opts) {
    if (opts.tol <= 0) throw std::invalid_argument("integrate: tol must be > 0");
    if (region.tBall.m > 1) throw std::invalid_argument("integrate: t-dimension > 1 not supported");
    if (region.dz > 0 && region.rHi >= region.zWeight.validityRadius())
        throw std::out_of_range("integrate: level r >= R(weight)");
    check_integrable(region);

    Estimate best;
    best.strategy = "polar-product";
    double prev = 0.0;
    bool havePrev = false;
    for (int level = 0; level <= opts.maxLevel; ++level) {
        LevelParams lp = level_params(level, region.dz);
        long long cost = level_cost(region, lp, level);
        if (best.evals + cost > opts.budget) {
            if (havePrev) throw BudgetExceededError(best);
            // not even one level fits: run nothing, report a budget failure
            throw BudgetExceededError(best);
        }
        double val = run_level(region, f, lp, level, best.evals);
        if (havePrev) {
            best.value = val;
            best.error = std::abs(val - prev) + 1e-12 * std::abs(val) + 1e-15;
            if (best.error <= opts.tol) return best;
        } else {
            best.value = val;
            best.error = std::abs(val);
        }
        prev = val;
        havePrev = true;
    }
    return best;  // error field reports the achieved accuracy honestly
}

std::vector<Estimate> nested_masses(const Region& regionTemplate, const std::vector<double>& grid,
                                    const EffIntegrand& f, const QuadratureOptions& opts) {
    if (grid.empty()) return {};
    for (size_t j = 0; j + 1 < grid.size(); ++j)
        if (grid[j] <= grid[j + 1])
            throw std::invalid_argument("nested_masses: grid must be strictly decreasing");
    QuadratureOptions piece = opts;
    piece.tol = opts.tol / std::max<size_t>(2, grid.size());

    std::vector<Estimate> masses(grid.size());
    Region core = regionTemplate;
    core.rLo = 0.0;
    core.rHi = grid.back();
    masses.back() = integrate(core, f, piece);
    for (int j = static_cast<int>(grid.size()) - 2; j >= 0; --j) {
        Region ann = regionTemplate;
        ann.rLo = grid[j + 1];
        ann.rHi = grid[j];
        Estimate a = integrate(ann, f, piece);
        masses[j].value = masses[j + 1].value + a.value;
        masses[j].error = masses[j + 1].error + a.error;
        masses[j].evals = masses[j + 1].evals + a.evals;
        masses[j].strategy = "polar-product/annular";
    }
    masses.back().strategy = "polar-product/annular";
    return masses;
}

namespace {
double halton(std::uint64_t i, int base) {
    double f = 1.0, r = 0.0;
    while (i > 0) {
        f /= base;
        r += f * (i % base);
        i /= base;
    }
    return r;
}
std::uint64_t splitmix64(std::uint64_t& s) {
    std::uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}
}  // namespace

Estimate integrate_qmc(const Region& region, double zBound, const EffIntegrand& f,
                       const QuadratureOptions& opts) {
    static const int bases[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29};
    int dz = region.dz, m = region.tBall.m;
    int dreal = 2 * dz + 2 * m;
    if (dreal > 10) throw std::invalid_argument("integrate_qmc: dimension too large");
    if (m == 1 && region.tBall.parts.size() != 1)
        throw std::invalid_argument("integrate_qmc: single t-ball only");

    std::uint64_t s = opts.seed + 0x51ab1eULL;
    std::vector<double> shift(dreal);
    for (int j = 0; j < dreal; ++j)
        shift[j] = static_cast<double>(splitmix64(s) >> 11) * 0x1.0p-53;

    double boxVol = std::pow(2.0 * zBound, 2 * dz);
    double ballArea = (m == 1) ? std::numbers::pi * region.tBall.parts[0].radius *
                                     region.tBall.parts[0].radius
                               : 1.0;
    const int batches = 16;
    long long perBatch = std::max<long long>(1024, opts.budget / (batches * 4));
    CVector pt(dz + m);
    std::vector<double> batchMean(batches, 0.0);
    long long evals = 0;
    std::uint64_t idx = 1;
    for (int b = 0; b < batches; ++b) {
        KahanSum acc;
        for (long long i = 0; i < perBatch; ++i, ++idx) {
            double u;
            bool inside = true;
            for (int j = 0; j < dz; ++j) {
                double xr = halton(idx, bases[2 * j]) + shift[2 * j];
                double xi = halton(idx, bases[2 * j + 1]) + shift[2 * j + 1];
                xr -= std::floor(xr);
                xi -= std::floor(xi);
                pt(j) = Complex((2 * xr - 1) * zBound, (2 * xi - 1) * zBound);
            }
            if (dz > 0) {
                double v = region.zWeight.value(pt.head(dz));
                inside = v < region.rHi && v >= region.rLo;
            }
            if (m == 1) {
                double ur = halton(idx, bases[2 * dz]) + shift[2 * dz];
                double ua = halton(idx, bases[2 * dz + 1]) + shift[2 * dz + 1];
                ur -= std::floor(ur);
                ua -= std::floor(ua);
                double rho = region.tBall.parts[0].radius * std::sqrt(ur);
                pt(dz) = region.tBall.parts[0].center(0) +
                         rho * Complex(std::cos(kTwoPi * ua), std::sin(kTwoPi * ua));
            }
            u = inside ? f(pt) : 0.0;
            ++evals;
            acc.add(u);
        }
        batchMean[b] = acc.s / perBatch;
    }
    double mean = 0;
    for (double v : batchMean) mean += v;
    mean /= batches;
    double var = 0;
    for (double v : batchMean) var += (v - mean) * (v - mean);
    var /= (batches - 1);
    Estimate e;
    e.value = mean * boxVol * ballArea;
    e.error = 3.0 * std::sqrt(var / batches) * boxVol * ballArea + 1e-15;
    e.evals = evals;
    e.strategy = "qmc-halton";
    return e;
}

}  // namespace lelong
