// Pointwise exterior algebra of (1,1)-forms via Hermitian coefficient
// matrices. Fixes the normalization dd^c = (i/2pi) d dbar for the whole
// library: a (1,1)-form with coefficient matrix H stands for
// (i/2pi) sum_jk H[j][k] dz_j ^ dzbar_k, so the wedge of N such forms has
// density mixed_wedge_coeff(...) * pi^{-N} against real Lebesgue measure.
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace lelong {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

// Element of C^N = C^n x C^m; the split marks the z-block and t-block.
struct CPoint {
    CVector coords;
    int n = 0;  // z-block size
    int m = 0;  // t-block size

    CPoint() = default;
    CPoint(CVector c, int n_, int m_) : coords(std::move(c)), n(n_), m(m_) {
        if (n < 0 || m < 0 || n + m != coords.size() || coords.size() < 1)
            throw std::invalid_argument("CPoint: invalid split");
    }
    int dim() const { return n + m; }
    double normSq() const { return coords.squaredNorm(); }
    double zNormSq() const { return coords.head(n).squaredNorm(); }
    double tNormSq() const { return coords.tail(m).squaredNorm(); }
};

// Coefficient matrix of a (1,1)-form at a point.
struct HermitianForm {
    CMatrix mat;

    HermitianForm() = default;
    explicit HermitianForm(CMatrix m) : mat(std::move(m)) {}
    int dim() const { return static_cast<int>(mat.rows()); }

    static HermitianForm Zero(int n) { return HermitianForm(CMatrix::Zero(n, n)); }
    static HermitianForm Identity(int n) { return HermitianForm(CMatrix::Identity(n, n)); }

    // (H + H*)/2, suppresses round-off asymmetry.
    void symmetrize() { mat = 0.5 * (mat + mat.adjoint()).eval(); }

    bool isHermitian(double relTol = 1e-12) const {
        double scale = mat.norm();
        if (scale == 0.0) return true;
        return (mat - mat.adjoint()).norm() <= relTol * scale * 10.0;
    }
};

// Scalar field u: C^N -> R with optional analytic derivatives.
// gradient returns (du/dz_1, ..., du/dz_N); hessian returns the matrix
// H[j][k] = d^2 u / dz_j dzbar_k.
struct ScalarField {
    std::function<double(const CVector&)> value;
    std::function<CVector(const CVector&)> gradient;  // may be empty
    std::function<CMatrix(const CVector&)> hessian;   // may be empty
};

// d^2 u / dz_j dzbar_k at p; analytic evaluator when present, otherwise
// central finite differences with h = 1e-4 * max(1, |p|).
HermitianForm complex_hessian(const ScalarField& u, const CPoint& p);

// Coefficient matrix of du ^ d^c u: rank-one g g* with g_j = du/dz_j.
HermitianForm gradient_form(const ScalarField& u, const CPoint& p);

// Coefficient c of the wedge of N (1,1)-forms against the top form
// (i/2pi)^N dz_1 dzbar_1 ... dz_N dzbar_N. Symmetric and multilinear;
// equals N! det(A) when all arguments coincide.
double mixed_wedge_coeff(std::span<const HermitianForm> forms);
double mixed_wedge_coeff(const std::vector<HermitianForm>& forms);

// Principal submatrix with rows/columns in J deleted: the pullback of the
// form to the slice {z_J = 0}.
HermitianForm restrict_form(const HermitianForm& H, const std::vector<int>& J);

// Complex first derivatives by finite differences (used by the fallbacks).
CVector fd_gradient(const std::function<double(const CVector&)>& f, const CVector& p);
CMatrix fd_hessian(const std::function<double(const CVector&)>& f, const CVector& p);

}  // namespace lelong
