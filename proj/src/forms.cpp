#include "lelong/forms.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>

namespace lelong {

namespace {

double fd_step(const CVector& p) { return 1e-4 * std::max(1.0, p.norm()); }

// d/dz_j = (d/dx_j - i d/dy_j)/2 by central differences.
Complex dz(const std::function<double(const CVector&)>& f, const CVector& p, int j, double h) {
    CVector q = p;
    q(j) = p(j) + h;
    double fxp = f(q);
    q(j) = p(j) - h;
    double fxm = f(q);
    q(j) = p(j) + Complex(0, h);
    double fyp = f(q);
    q(j) = p(j) - Complex(0, h);
    double fym = f(q);
    double ux = (fxp - fxm) / (2 * h);
    double uy = (fyp - fym) / (2 * h);
    return 0.5 * Complex(ux, -uy);
}

void check_finite(const Complex& v, int coord, const char* what) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw std::runtime_error(std::string("non-finite ") + what + " at coordinate " +
                                 std::to_string(coord));
}

int permutation_sign(const std::array<int, 8>& perm, int n) {
    int inv = 0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (perm[i] > perm[j]) ++inv;
    return (inv % 2 == 0) ? 1 : -1;
}

}  // namespace

CVector fd_gradient(const std::function<double(const CVector&)>& f, const CVector& p) {
    double h = fd_step(p);
    CVector g(p.size());
    for (int j = 0; j < p.size(); ++j) g(j) = dz(f, p, j, h);
    return g;
}

CMatrix fd_hessian(const std::function<double(const CVector&)>& f, const CVector& p) {
    // H[j][k] = d/dz_j (d/dzbar_k u) = d/dz_j conj(d/dz_k u) for real u.
    double h = fd_step(p);
    int N = static_cast<int>(p.size());
    CMatrix H(N, N);
    for (int j = 0; j < N; ++j) {
        for (int k = 0; k < N; ++k) {
            auto dbar_k = [&](const CVector& q) -> Complex { return std::conj(dz(f, q, k, h)); };
            // complex central difference of a complex-valued function
            CVector q = p;
            q(j) = p(j) + h;
            Complex fxp = dbar_k(q);
            q(j) = p(j) - h;
            Complex fxm = dbar_k(q);
            q(j) = p(j) + Complex(0, h);
            Complex fyp = dbar_k(q);
            q(j) = p(j) - Complex(0, h);
            Complex fym = dbar_k(q);
            H(j, k) = 0.5 * ((fxp - fxm) / (2 * h) - Complex(0, 1) * (fyp - fym) / (2 * h));
        }
    }
    return H;
}

HermitianForm complex_hessian(const ScalarField& u, const CPoint& p) {
    CMatrix H = u.hessian ? u.hessian(p.coords) : fd_hessian(u.value, p.coords);
    for (int j = 0; j < H.rows(); ++j)
        for (int k = 0; k < H.cols(); ++k) check_finite(H(j, k), j, "second derivative");
    HermitianForm out(std::move(H));
    out.symmetrize();
    return out;
}

HermitianForm gradient_form(const ScalarField& u, const CPoint& p) {
    CVector g = u.gradient ? u.gradient(p.coords) : fd_gradient(u.value, p.coords);
    for (int j = 0; j < g.size(); ++j) check_finite(g(j), j, "derivative");
    HermitianForm out((g * g.adjoint()).eval());
    out.symmetrize();
    return out;
}

namespace {

inline Complex det2c(const Complex* a, const Complex* b, int c0, int c1) {
    return a[c0] * b[c1] - a[c1] * b[c0];
}

inline Complex det3c(const Complex* a, const Complex* b, const Complex* c, int c0, int c1,
                     int c2) {
    return a[c0] * det2c(b, c, c1, c2) - a[c1] * det2c(b, c, c0, c2) +
           a[c2] * det2c(b, c, c0, c1);
}

// determinant of the implicit matrix rows[r][c] by column-mask minor
// expansion; allocation-free, N <= 6
Complex det_rows(const Complex* const rows[], int N, unsigned colMask, int r) {
    Complex acc(0, 0);
    double sign = 1.0;
    for (int c = 0; c < N; ++c) {
        if (colMask & (1u << c)) continue;
        if (r + 1 == N) return sign * rows[r][c];
        acc += sign * rows[r][c] * det_rows(rows, N, colMask | (1u << c), r + 1);
        sign = -sign;
    }
    return acc;
}

inline Complex det_dispatch(const Complex* const rows[], int N) {
    switch (N) {
        case 1:
            return rows[0][0];
        case 2:
            return det2c(rows[0], rows[1], 0, 1);
        case 3:
            return det3c(rows[0], rows[1], rows[2], 0, 1, 2);
        case 4:
            return rows[0][0] * det3c(rows[1], rows[2], rows[3], 1, 2, 3) -
                   rows[0][1] * det3c(rows[1], rows[2], rows[3], 0, 2, 3) +
                   rows[0][2] * det3c(rows[1], rows[2], rows[3], 0, 1, 3) -
                   rows[0][3] * det3c(rows[1], rows[2], rows[3], 0, 1, 2);
        default:
            return det_rows(rows, N, 0u, 0);
    }
}

}  // namespace

double mixed_wedge_coeff(std::span<const HermitianForm> forms) {
    int N = static_cast<int>(forms.size());
    if (N < 1 || N > 6) throw std::invalid_argument("mixed_wedge_coeff: need 1..6 forms");
    for (const auto& f : forms)
        if (f.dim() != N)
            throw std::invalid_argument("mixed_wedge_coeff: dimension mismatch (need NxN matrices)");

    // row-major copies so the permutation loop below is allocation-free
    Complex F[6][6 * 6];
    for (int i = 0; i < N; ++i)
        for (int r = 0; r < N; ++r)
            for (int c = 0; c < N; ++c) F[i][r * N + c] = forms[i].mat(r, c);

    // adjacent identical forms (the usual alpha^a ^ beta^b ^ beta_v^m stacks)
    // contribute equally for every permutation within the run, so enumerate
    // only run-sorted assignments and scale by the run factorials
    bool dup[6] = {};  // dup[i]: form i equals form i-1
    double runFactor = 1.0;
    for (int i = 1, runLen = 1; i < N; ++i) {
        dup[i] = std::memcmp(F[i], F[i - 1], sizeof(Complex) * N * N) == 0;
        runLen = dup[i] ? runLen + 1 : 1;
        if (dup[i]) runFactor *= runLen;
    }

    // sum over row assignments sigma: sgn(sigma) * det(M_sigma) with
    // M_sigma[i][.] = forms[i].mat.row(sigma(i)); this expands the wedge of
    // N (1,1)-forms over the full 2N-form basis.
    std::array<int, 8> sigma{};
    for (int i = 0; i < N; ++i) sigma[i] = i;
    const Complex* rows[6];
    Complex acc(0, 0);
    do {
        bool canonical = true;
        for (int i = 1; i < N; ++i)
            if (dup[i] && sigma[i - 1] > sigma[i]) {
                canonical = false;
                break;
            }
        if (!canonical) continue;
        for (int i = 0; i < N; ++i) rows[i] = &F[i][sigma[i] * N];
        acc += static_cast<double>(permutation_sign(sigma, N)) * det_dispatch(rows, N);
    } while (std::next_permutation(sigma.begin(), sigma.begin() + N));
    return runFactor * acc.real();
}

double mixed_wedge_coeff(const std::vector<HermitianForm>& forms) {
    return mixed_wedge_coeff(std::span<const HermitianForm>(forms.data(), forms.size()));
}

HermitianForm restrict_form(const HermitianForm& H, const std::vector<int>& J) {
    int N = H.dim();
    std::vector<int> keep;
    keep.reserve(N);
    for (int i = 0; i < N; ++i)
        if (std::find(J.begin(), J.end(), i) == J.end()) keep.push_back(i);
    CMatrix out(keep.size(), keep.size());
    for (size_t a = 0; a < keep.size(); ++a)
        for (size_t b = 0; b < keep.size(); ++b) out(a, b) = H.mat(keep[a], keep[b]);
    return HermitianForm(std::move(out));
}

}  // namespace lelong
