// Semi-exhaustive C^2 weights on the z-block: value/gradient/Hessian,
// homogeneity degree, validity radius and exact sublevel geometry for the
// catalog kinds (c|z|^2, sum lambda_j |z_j|^2, and powers of those).
#pragma once

#include "lelong/forms.hpp"

#include <memory>
#include <optional>
#include <string>

namespace lelong {

class Weight {
  public:
    enum class Kind { Euclid, Aniso, Power };

    Weight() = default;  // zero-dimensional placeholder

    // c * |z|^2 on C^n.
    static Weight euclid(int n, double scale = 1.0, double validity = 1.0);
    // sum lambda_j |z_j|^2.
    static Weight aniso(std::vector<double> lambdas, double validity = 1.0);
    // base^p, p >= 2 (C^2 powers only).
    static Weight power(const Weight& base, double p);

    double value(const CVector& z) const;
    CVector gradient(const CVector& z) const;  // (dphi/dz_1, ..., dphi/dz_n)
    CMatrix hessian(const CVector& z) const;

    int dim() const { return n_; }
    const std::string& name() const { return name_; }
    // phi(lambda z) = |lambda|^{2 gamma} phi(z).
    double homogeneity() const { return gamma_; }
    double validityRadius() const { return R_; }
    Weight withValidity(double R) const;

    // min of phi on the unit sphere; with homogeneity this makes sublevel
    // geometry exact: {phi < r} is circumscribed by |z| = (r/min)^{1/(2 gamma)}.
    double sphereMin() const;

    bool contains(double r, const CVector& z) const;  // sublevel membership
    double sublevelBound(double r) const;             // circumscribed euclidean radius
    // largest s with phi(s*u) < r for a unit direction u (exact for
    // homogeneous weights).
    double radialBound(double r, const CVector& u) const;

    // drop the z-coordinates in J (0-based): the weight pulled back to the
    // slice {z_J = 0}.
    Weight restricted(const std::vector<int>& J) const;

  private:
    Kind kind_ = Kind::Euclid;
    int n_ = 0;
    double scale_ = 1.0;
    std::vector<double> lambdas_;
    std::shared_ptr<const Weight> base_;
    double p_ = 1.0;
    double gamma_ = 1.0;
    double R_ = 1.0;
    std::string name_;
    mutable std::optional<double> sphereMinCache_;

    double sphereMinSampled() const;
};

// phi^p as a Weight; p >= 2 per the C^2 requirement.
Weight power_weight(const Weight& phi, double p);

// dd^c phi at p, embedded into the NxN frame (zero t-block).
HermitianForm beta(const Weight& phi, const CPoint& p);
// dd^c log phi at p = (Hess phi)/phi - g g*/phi^2, embedded likewise.
// Requires phi(p) > 0.
HermitianForm alpha(const Weight& phi, const CPoint& p);

// Same forms on the z-slice frame: matrices of the restricted weight on the
// effective coordinates (dim(weight) + m), with zero t-block.
HermitianForm beta_effective(const Weight& phiEff, const CVector& zEff, int m);
HermitianForm alpha_effective(const Weight& phiEff, const CVector& zEff, int m);

// dd^c v embedded into the t-block (v = |t|^2 unless stated otherwise).
HermitianForm beta_v_effective(int dzEff, int m);

bool sublevel_contains(const Weight& phi, double r, const CPoint& p);
double sublevel_bound(const Weight& phi, double r);

// Open subset of C^m: a disjoint union of balls (discs for m = 1).
struct Ball {
    CVector center;
    double radius = 0.0;
};

struct DirectionalBall {
    int m = 0;
    std::vector<Ball> parts;

    static DirectionalBall disc(Complex center, double radius) {
        DirectionalBall b;
        b.m = 1;
        CVector c(1);
        c(0) = center;
        b.parts.push_back({c, radius});
        return b;
    }
    static DirectionalBall none() { return DirectionalBall{0, {}}; }
    DirectionalBall unionWith(const DirectionalBall& other) const {
        DirectionalBall b = *this;
        for (const auto& p : other.parts) b.parts.push_back(p);
        return b;
    }
};

}  // namespace lelong
