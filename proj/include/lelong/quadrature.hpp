// Deterministic numerical integration over regions B_phi(r) x B (and phi-annuli),
// in polar coordinates on each block. Radial rules absorb the catalog's kernel
// classes (log and |.|^-alpha about coordinate subspaces) by geometric grading
// toward the singular end; nodes are always interior, so singular loci are
// never probed.
#pragma once

#include "lelong/currents.hpp"
#include "lelong/weights.hpp"

#include <cstdint>
#include <functional>
#include <string>

namespace lelong {

struct Estimate {
    double value = 0.0;
    double error = 0.0;  // absolute, upper estimate
    long long evals = 0;
    std::string strategy;
};

struct BudgetExceededError : std::runtime_error {
    Estimate best;
    explicit BudgetExceededError(Estimate e)
        : std::runtime_error("quadrature: evaluation budget exhausted (best value " +
                             std::to_string(e.value) + ", error " + std::to_string(e.error) + ")"),
          best(std::move(e)) {}
};

struct QuadratureOptions {
    double tol = 1e-4;              // absolute
    long long budget = 10'000'000;  // integrand evaluations
    std::uint64_t seed = 0;         // consumed by the quasi-random fallback only
    int maxLevel = 5;               // resolution ladder cap
};

// Integration domain in effective coordinates: z-part a sublevel set or
// annulus of a (restricted) weight on C^dz, t-part a disjoint union of discs.
struct Region {
    int dz = 0;          // effective complex z-dimension (0 = no z-part)
    Weight zWeight;      // effective weight; ignored when dz = 0
    double rLo = 0.0;    // > 0 selects the annulus {rLo <= phi < rHi}
    double rHi = 0.0;
    DirectionalBall tBall;  // m in {0, 1}
    // singular structure of the integrand, in effective coordinates
    std::vector<SingularityAnnotation> annotations;
};

// Density against real Lebesgue measure at an effective point (dz + m coords).
using EffIntegrand = std::function<double(const CVector&)>;

// Deterministic product-rule integration. |value - true| <= max(tol, error)
// on the calibration suite; identical inputs give bit-identical results.
// Throws BudgetExceededError when tol is unreachable within the budget, and
// std::invalid_argument when an annotation fails the integrability check.
Estimate integrate(const Region& region, const EffIntegrand& f, const QuadratureOptions& opts);

// Raw masses over the nested family {phi < r_j} for a decreasing grid, built
// from one pass of annulus integrals (each annulus integrated once) plus the
// innermost core.
std::vector<Estimate> nested_masses(const Region& regionTemplate, const std::vector<double>& grid,
                                    const EffIntegrand& f, const QuadratureOptions& opts);

// Seeded quasi-random fallback (Halton with a seed-derived rotation) for
// sublevel sets known only through membership, given a bounding euclidean
// radius for the z-part.
Estimate integrate_qmc(const Region& region, double zBound, const EffIntegrand& f,
                       const QuadratureOptions& opts);

// Gauss-Legendre nodes/weights on [0,1]; cached per order.
const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre01(int order);

}  // namespace lelong
