// Directional mass profiles nu(T, phi, B, r), their limits, the integrability
// condition on s -> s^{-1} nu(dd^cT, phi, B, s) ("Condition (C)"), the
// g-certificate, the Lelong-Jensen residual, the phi^p scaling law, the
// weight-comparison theorem and the k = 0 identity.
#pragma once

#include "lelong/quadrature.hpp"

#include <utility>

namespace lelong {

struct RadialProfile {
    std::vector<double> grid;   // strictly decreasing, phi-units, all < R(phi)
    std::vector<Estimate> nu;   // normalized masses r^{-exponent} * mass(r)
    int exponent = 0;           // n - k of the measured current
};

struct NuVerdict {
    enum class Kind { Converged, Diverges, Inconclusive };
    enum class Rate { None, Log, Power };
    Kind kind = Kind::Inconclusive;
    double value = 0.0;        // the limit, for Converged
    double uncertainty = 0.0;  // extrapolation + quadrature, for Converged
    Rate rate = Rate::None;    // divergence rate
    double beta = 0.0;         // exponent for Rate::Power (nu ~ r^{-beta})
    double residual = 0.0;     // best-fit RMS residual
    std::string model;         // selected model
};

struct ConditionCReport {
    enum class Verdict { Holds, Fails, TriviallyHolds, Inconclusive };
    Verdict verdict = Verdict::Inconclusive;
    double alpha = 0.0;         // fitted exponent of nu(ddcT, s) ~ coeff * s^alpha
    double coeff = 0.0;         // signed
    double residual = 0.0;      // log-space relative RMS of the fit
    double tailIntegral = 0.0;  // estimate of int_0 s^{-1} nu(ddcT, s) ds
                                // (the partial grid sum when diverging)
    RadialProfile ddcProfile;
};

struct ScalingPoint {
    double r = 0.0;  // phi-units; the LHS is evaluated at r^p in phi^p-units
    double lhs = 0.0, rhs = 0.0;
    double residual = 0.0, error = 0.0;
};

struct ScalingReport {
    std::vector<ScalingPoint> points;
    double maxResidual = 0.0, maxError = 0.0;
    bool limitsAvailable = false;
    double limitLhs = 0.0, limitRhs = 0.0, limitError = 0.0;
};

struct ComparisonReport {
    NuVerdict nuPhi, nuPsi;
    double ell = 0.0;
    int exponent = 0;       // n - k
    double ratio = 0.0;     // nu(T, psi, B) / nu(T, phi, B)
    double ratioError = 0.0;
    bool converged = false; // both limits exist
    ConditionCReport psiCondition;
};

// Mass of C wedged with alpha_phi^nAlpha ^ beta_phi^nBeta ^ beta_v^m over
// {rLo <= phi < rHi} x B (rLo = 0: the full sublevel set). Requires
// nAlpha + nBeta = n - bidegree(C).
Estimate paired_mass(const ModelCurrent& C, const Weight& phi, const DirectionalBall& B,
                     double rLo, double rHi, int nAlpha, int nBeta,
                     const QuadratureOptions& opts);

// Same masses over the nested family {phi < r} for a decreasing grid
// (annular decomposition: each shell integrated once).
std::vector<Estimate> paired_masses_nested(const ModelCurrent& C, const Weight& phi,
                                           const DirectionalBall& B,
                                           const std::vector<double>& grid, int nAlpha, int nBeta,
                                           const QuadratureOptions& opts);

// nu(C, phi, B, r) = r^{-(n-k)} int_{B_phi(r) x B} C ^ beta_phi^{n-k} ^ beta_v^m,
// k = bidegree(C); dd^c-type currents (bidegree k+1) get exponent n-k-1
// through the same formula.
Estimate nu_at(const ModelCurrent& C, const Weight& phi, const DirectionalBall& B, double r,
               const QuadratureOptions& opts);

RadialProfile radial_profile(const ModelCurrent& C, const Weight& phi, const DirectionalBall& B,
                             const std::vector<double>& grid, const QuadratureOptions& opts);

// Extrapolate r -> 0. Models: constant, a + b r^alpha, a + b log(1/r),
// a + b r^{-beta}; divergence additionally requires monotone growth over at
// least 5 grid points; all fits poor -> inconclusive. Needs >= 6 points.
NuVerdict nu_limit(const RadialProfile& profile);

// Measures nu(dd^cT, phi, B, s) on the grid and decides integrability of
// s^{-1} nu(dd^cT, phi, B, s) near 0 by a fitted power law.
ConditionCReport condition_c(const ModelCurrent& T, const Weight& phi, const DirectionalBall& B,
                             const std::vector<double>& grid, const QuadratureOptions& opts);

// g(r) = nu(T,phi,B,r) + int_0^r (s^{n-k}/r^{n-k} - 1) s^{-1} nu(dd^cT,phi,B,s) ds.
// gridBelow: decreasing s-grid with gridBelow.front() <= r, used for the
// trapezoid part; the (0, s_min] tail uses the Condition-C fitted model.
// Throws std::domain_error when Condition (C) fails (g is not well defined).
Estimate g_function(const ModelCurrent& T, const Weight& phi, const DirectionalBall& B, double r,
                    const std::vector<double>& gridBelow, const QuadratureOptions& opts);

// g on every grid point (profiles measured once).
std::vector<Estimate> g_profile(const ModelCurrent& T, const Weight& phi,
                                const DirectionalBall& B, const std::vector<double>& grid,
                                const QuadratureOptions& opts);

// LHS - RHS of the two-radius mass identity with parameters (p, q):
//   M(r2)/r2^{q+1} - M(r1)/r1^{q+1}
//     = int_{annulus} T^alpha^p^beta^{n-k-p}^beta_v^m
//       + int_{r1}^{r2} (s^{-(q+1)} - r2^{-(q+1)}) D(s) ds
//       + (r1^{-(q+1)} - r2^{-(q+1)}) int_0^{r1} D(s) ds,
// M(r) = mass of T^alpha^{p-q-1}^beta^{n-k-p+q+1}^beta_v^m over B_phi(r) x B
// and D(s) the analogous dd^cT mass with alpha^{p-q-1}^beta^{n-k-p+q}.
// Valid for 1 <= p <= n-k and q = p-1; smooth currents admit any 0 <= q < p.
Estimate lelong_jensen_residual(const ModelCurrent& T, const Weight& phi,
                                const DirectionalBall& B, double r1, double r2, int p, int q,
                                const QuadratureOptions& opts);

// Per-r residual of
//   nu(T,phi^p,B,r^p) = p^{n-k} ( nu(T,phi,B,r)
//       + int_0^r s^{-1} nu(dd^cT,phi,B,s) (s^{n-k}/r^{n-k} - s^{(n-k)p}/r^{(n-k)p}) ds ),
// the LHS measured with the genuine weight phi^p; plus, when both limits
// exist, the two sides of
//   nu(T,phi^p,B) = p^{n-k} ( nu(T,phi,B) + (p-1)/(p(n-k)) nu(dd^cT,phi,B) ).
ScalingReport scaling_check(const ModelCurrent& T, const Weight& phi, const DirectionalBall& B,
                            int p, const std::vector<double>& grid,
                            const QuadratureOptions& opts);

// nu(T,psi,B) / nu(T,phi,B) for the supplied comparability index ell;
// requires Condition (C) for (T, psi, B) (std::domain_error otherwise).
ComparisonReport comparison_check(const ModelCurrent& T, const Weight& phi, const Weight& psi,
                                  double ell, const DirectionalBall& B,
                                  const std::vector<double>& grid, const QuadratureOptions& opts);

// k = 0: (nu-limit of the profile of h, direct quadrature of
// int_B h(0,t) omega_t^m); the two must agree. Uses phi = |z|^2.
std::pair<Estimate, Estimate> k0_identity(const ModelCurrent& h, const DirectionalBall& B,
                                          const std::vector<double>& grid,
                                          const QuadratureOptions& opts);

// Signed defect nu(T, B1 u B2) - nu(T, B1) - nu(T, B2) for disjoint balls,
// with the combined uncertainty in the error field.
Estimate additivity_check(const ModelCurrent& T, const Weight& phi, const DirectionalBall& B1,
                          const DirectionalBall& B2, const std::vector<double>& grid,
                          const QuadratureOptions& opts);

}  // namespace lelong
