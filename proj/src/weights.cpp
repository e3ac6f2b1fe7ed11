#include "lelong/weights.hpp"

#include <cmath>
#include <random>

namespace lelong {

Weight Weight::euclid(int n, double scale, double validity) {
    Weight w;
    w.kind_ = Kind::Euclid;
    w.n_ = n;
    w.scale_ = scale;
    w.gamma_ = 1.0;
    w.R_ = validity;
    w.name_ = (scale == 1.0) ? "euclid" : ("euclid:" + std::to_string(scale));
    return w;
}

Weight Weight::aniso(std::vector<double> lambdas, double validity) {
    Weight w;
    w.kind_ = Kind::Aniso;
    w.n_ = static_cast<int>(lambdas.size());
    w.lambdas_ = std::move(lambdas);
    w.gamma_ = 1.0;
    w.R_ = validity;
    w.name_ = "aniso";
    for (double l : w.lambdas_)
        if (l <= 0) throw std::invalid_argument("aniso weight: lambdas must be > 0");
    return w;
}

Weight Weight::power(const Weight& base, double p) {
    if (p < 2.0) throw std::invalid_argument("power_weight: p must be >= 2");
    Weight w;
    w.kind_ = Kind::Power;
    w.n_ = base.n_;
    w.base_ = std::make_shared<Weight>(base);
    w.p_ = p;
    w.gamma_ = base.gamma_ * p;
    w.R_ = std::pow(base.R_, p);
    w.name_ = base.name_ + "^" + std::to_string(p);
    return w;
}

Weight power_weight(const Weight& phi, double p) { return Weight::power(phi, p); }

Weight Weight::withValidity(double R) const {
    Weight w = *this;
    w.R_ = R;
    return w;
}

double Weight::value(const CVector& z) const {
    switch (kind_) {
        case Kind::Euclid:
            return scale_ * z.squaredNorm();
        case Kind::Aniso: {
            double s = 0;
            for (int j = 0; j < n_; ++j) s += lambdas_[j] * std::norm(z(j));
            return s;
        }
        case Kind::Power:
            return std::pow(base_->value(z), p_);
    }
    return 0;
}

CVector Weight::gradient(const CVector& z) const {
    switch (kind_) {
        case Kind::Euclid:
            return scale_ * z.conjugate();
        case Kind::Aniso: {
            CVector g(n_);
            for (int j = 0; j < n_; ++j) g(j) = lambdas_[j] * std::conj(z(j));
            return g;
        }
        case Kind::Power: {
            double b = base_->value(z);
            return p_ * std::pow(b, p_ - 1.0) * base_->gradient(z);
        }
    }
    return CVector();
}

CMatrix Weight::hessian(const CVector& z) const {
    switch (kind_) {
        case Kind::Euclid:
            return scale_ * CMatrix::Identity(n_, n_);
        case Kind::Aniso: {
            CMatrix H = CMatrix::Zero(n_, n_);
            for (int j = 0; j < n_; ++j) H(j, j) = lambdas_[j];
            return H;
        }
        case Kind::Power: {
            // d^2 phi^p = p phi^{p-1} Hess(phi) + p(p-1) phi^{p-2} g g*
            double b = base_->value(z);
            CVector g = base_->gradient(z);
            return p_ * std::pow(b, p_ - 1.0) * base_->hessian(z) +
                   p_ * (p_ - 1.0) * std::pow(b, p_ - 2.0) * (g * g.adjoint());
        }
    }
    return CMatrix();
}

double Weight::sphereMinSampled() const {
    // dense sphere sampling + local refinement (fallback for kinds without a
    // closed-form minimum; the shipped kinds all have one).
    std::mt19937_64 rng(0x5eed);
    std::normal_distribution<double> nd;
    double best = std::numeric_limits<double>::infinity();
    CVector bestU(n_);
    for (int it = 0; it < 4000; ++it) {
        CVector u(n_);
        for (int j = 0; j < n_; ++j) u(j) = Complex(nd(rng), nd(rng));
        u.normalize();
        double v = value(u);
        if (v < best) {
            best = v;
            bestU = u;
        }
    }
    double step = 0.1;
    while (step > 1e-7) {
        bool improved = false;
        for (int j = 0; j < 2 * n_; ++j) {
            for (double sgn : {1.0, -1.0}) {
                CVector u = bestU;
                u(j / 2) += (j % 2 == 0) ? Complex(sgn * step, 0) : Complex(0, sgn * step);
                u.normalize();
                double v = value(u);
                if (v < best) {
                    best = v;
                    bestU = u;
                    improved = true;
                }
            }
        }
        if (!improved) step *= 0.5;
    }
    return best;
}

double Weight::sphereMin() const {
    if (sphereMinCache_) return *sphereMinCache_;
    double v;
    switch (kind_) {
        case Kind::Euclid:
            v = scale_;
            break;
        case Kind::Aniso:
            v = *std::min_element(lambdas_.begin(), lambdas_.end());
            break;
        case Kind::Power:
            v = std::pow(base_->sphereMin(), p_);
            break;
        default:
            v = sphereMinSampled();
    }
    sphereMinCache_ = v;
    return v;
}

bool Weight::contains(double r, const CVector& z) const { return value(z) < r; }

double Weight::sublevelBound(double r) const {
    if (r <= 0 || r >= R_) throw std::out_of_range("sublevel_bound: need 0 < r < R(phi)");
    return std::pow(r / sphereMin(), 1.0 / (2.0 * gamma_));
}

double Weight::radialBound(double r, const CVector& u) const {
    double vu = value(u);
    if (vu <= 0) return 0.0;
    return std::pow(r / vu, 1.0 / (2.0 * gamma_));
}

Weight Weight::restricted(const std::vector<int>& J) const {
    auto keepOf = [&](int n) {
        std::vector<int> keep;
        for (int i = 0; i < n; ++i)
            if (std::find(J.begin(), J.end(), i) == J.end()) keep.push_back(i);
        return keep;
    };
    switch (kind_) {
        case Kind::Euclid: {
            Weight w = euclid(n_ - static_cast<int>(J.size()), scale_, R_);
            return w;
        }
        case Kind::Aniso: {
            std::vector<double> l;
            for (int i : keepOf(n_)) l.push_back(lambdas_[i]);
            Weight w = aniso(std::move(l), R_);
            return w;
        }
        case Kind::Power:
            return power(base_->restricted(J), p_).withValidity(R_);
    }
    throw std::logic_error("unreachable");
}

namespace {
CMatrix embed_z_block(const CMatrix& Hz, int n, int m) {
    CMatrix H = CMatrix::Zero(n + m, n + m);
    H.topLeftCorner(n, n) = Hz;
    return H;
}
}  // namespace

HermitianForm beta(const Weight& phi, const CPoint& p) {
    if (phi.dim() != p.n) throw std::invalid_argument("beta: weight/point dimension mismatch");
    HermitianForm f(embed_z_block(phi.hessian(p.coords.head(p.n)), p.n, p.m));
    f.symmetrize();
    return f;
}

HermitianForm alpha(const Weight& phi, const CPoint& p) {
    if (phi.dim() != p.n) throw std::invalid_argument("alpha: weight/point dimension mismatch");
    CVector z = p.coords.head(p.n);
    double v = phi.value(z);
    if (v <= 0) throw std::domain_error("alpha: phi(p) <= 0");
    CVector g = phi.gradient(z);
    CMatrix Hz = phi.hessian(z) / v - (g * g.adjoint()) / (v * v);
    HermitianForm f(embed_z_block(Hz, p.n, p.m));
    f.symmetrize();
    return f;
}

HermitianForm beta_effective(const Weight& phiEff, const CVector& zEff, int m) {
    return HermitianForm(embed_z_block(phiEff.hessian(zEff), phiEff.dim(), m));
}

HermitianForm alpha_effective(const Weight& phiEff, const CVector& zEff, int m) {
    double v = phiEff.value(zEff);
    if (v <= 0) throw std::domain_error("alpha: phi(p) <= 0");
    CVector g = phiEff.gradient(zEff);
    CMatrix Hz = phiEff.hessian(zEff) / v - (g * g.adjoint()) / (v * v);
    return HermitianForm(embed_z_block(Hz, phiEff.dim(), m));
}

HermitianForm beta_v_effective(int dzEff, int m) {
    CMatrix H = CMatrix::Zero(dzEff + m, dzEff + m);
    H.bottomRightCorner(m, m) = CMatrix::Identity(m, m);
    return HermitianForm(std::move(H));
}

bool sublevel_contains(const Weight& phi, double r, const CPoint& p) {
    if (r <= 0 || r >= phi.validityRadius())
        throw std::out_of_range("sublevel_contains: need 0 < r < R(phi)");
    return phi.contains(r, p.coords.head(p.n));
}

double sublevel_bound(const Weight& phi, double r) { return phi.sublevelBound(r); }

}  // namespace lelong
