#include "lelong/currents.hpp"

#include <cmath>
#include <numbers>

namespace lelong {

namespace {

constexpr double kPi = std::numbers::pi;

// c0 + s * sum_{i in I} |p_i|^2
ScalarField sqnorm_field(std::vector<int> idx, double s, double c0) {
    ScalarField f;
    f.value = [idx, s, c0](const CVector& p) {
        double acc = c0;
        for (int i : idx) acc += s * std::norm(p(i));
        return acc;
    };
    f.gradient = [idx, s](const CVector& p) {
        CVector g = CVector::Zero(p.size());
        for (int i : idx) g(i) = s * std::conj(p(i));
        return g;
    };
    f.hessian = [idx, s](const CVector& p) {
        CMatrix H = CMatrix::Zero(p.size(), p.size());
        for (int i : idx) H(i, i) = s;
        return H;
    };
    return f;
}

// s * log(sum_{i in I} |p_i|^2)
ScalarField lognorm_field(std::vector<int> idx, double s) {
    ScalarField f;
    f.value = [idx, s](const CVector& p) {
        double w = 0;
        for (int i : idx) w += std::norm(p(i));
        return s * std::log(w);
    };
    f.gradient = [idx, s](const CVector& p) {
        double w = 0;
        for (int i : idx) w += std::norm(p(i));
        CVector g = CVector::Zero(p.size());
        for (int i : idx) g(i) = s * std::conj(p(i)) / w;
        return g;
    };
    f.hessian = [idx, s](const CVector& p) {
        double w = 0;
        for (int i : idx) w += std::norm(p(i));
        CMatrix H = CMatrix::Zero(p.size(), p.size());
        for (int a : idx)
            for (int b : idx) {
                H(a, b) = -s * std::conj(p(a)) * p(b) / (w * w);
                if (a == b) H(a, b) += s / w;
            }
        return H;
    };
    return f;
}

ScalarField const_field(double c) {
    ScalarField f;
    f.value = [c](const CVector&) { return c; };
    f.gradient = [](const CVector& p) { return CVector::Zero(p.size()).eval(); };
    f.hessian = [](const CVector& p) { return CMatrix::Zero(p.size(), p.size()).eval(); };
    return f;
}

}  // namespace

ModelCurrent ModelCurrent::zero(int n, int m, int k) {
    ModelCurrent T;
    T.kind_ = Kind::Zero;
    T.n_ = n;
    T.m_ = m;
    T.k_ = k;
    T.monotonicity = MonotonicityClass::Closed;
    T.name = "Zero";
    return T;
}

ModelCurrent ModelCurrent::slice(int n, int m, std::vector<int> J, ScalarField weight,
                                 std::vector<FormFactor> factors) {
    ModelCurrent T;
    T.kind_ = Kind::Slice;
    T.n_ = n;
    T.m_ = m;
    T.J_ = std::move(J);
    for (int j : T.J_)
        if (j < 0 || j >= n) throw std::invalid_argument("slice: J must index the z-block");
    T.weight_ = std::move(weight);
    T.factors_ = std::move(factors);
    T.k_ = static_cast<int>(T.J_.size() + T.factors_.size());
    return T;
}

ModelCurrent ModelCurrent::factored(int n, int m, ScalarField weight,
                                    std::vector<FormFactor> factors) {
    ModelCurrent T;
    T.kind_ = Kind::Factored;
    T.n_ = n;
    T.m_ = m;
    T.weight_ = std::move(weight);
    T.factors_ = std::move(factors);
    T.k_ = static_cast<int>(T.factors_.size());
    return T;
}

ModelCurrent ModelCurrent::scaledSum(std::vector<std::pair<double, ModelCurrent>> terms) {
    if (terms.empty()) throw std::invalid_argument("scaledSum: empty term list");
    ModelCurrent T;
    T.kind_ = Kind::ScaledSum;
    T.n_ = terms[0].second.n_;
    T.m_ = terms[0].second.m_;
    T.k_ = terms[0].second.k_;
    for (const auto& [c, t] : terms) {
        if (t.n_ != T.n_ || t.m_ != T.m_ || t.k_ != T.k_)
            throw std::invalid_argument("scaledSum: mixed bidegree or split");
        for (const auto& a : t.annotations) T.annotations.push_back(a);
    }
    T.terms_ = std::move(terms);
    return T;
}

bool ModelCurrent::onSingularLocus(const CPoint& p) const {
    for (const auto& a : annotations) {
        bool allZero = true;
        for (int i : a.locus)
            if (std::abs(p.coords(i)) > 1e-15) {
                allZero = false;
                break;
            }
        if (allZero && !a.locus.empty()) return true;
    }
    return false;
}

double ModelCurrent::densityAt(const CPoint& p, std::span<const HermitianForm> testForms) const {
    switch (kind_) {
        case Kind::Zero:
            return 0.0;
        case Kind::ScaledSum: {
            double acc = 0;
            for (const auto& [c, t] : terms_) acc += c * t.densityAt(p, testForms);
            return acc;
        }
        case Kind::Slice:
        case Kind::Factored: {
            int expected = (n_ - k_) + m_;
            if (static_cast<int>(testForms.size()) != expected)
                throw std::invalid_argument("densityAt: expected " + std::to_string(expected) +
                                            " test forms, got " + std::to_string(testForms.size()));
            if (onSingularLocus(p))
                throw std::domain_error("densityAt: point lies on a singular locus of " + name);
            int effDim = dim() - static_cast<int>(J_.size());
            std::vector<HermitianForm> stack;
            stack.reserve(factors_.size() + testForms.size());
            for (const auto& f : factors_) {
                HermitianForm full = (f.type == FormFactor::Type::Gradient)
                                         ? gradient_form(f.potential, p)
                                         : complex_hessian(f.potential, p);
                stack.push_back(J_.empty() ? std::move(full) : restrict_form(full, J_));
            }
            for (const auto& tf : testForms)
                stack.push_back(J_.empty() ? tf : restrict_form(tf, J_));
            double w = weight_.value ? weight_.value(p.coords) : 1.0;
            return w * mixed_wedge_coeff(stack) * std::pow(kPi, -effDim);
        }
    }
    throw std::logic_error("unreachable");
}

double ModelCurrent::densityAt(const CPoint& p, const std::vector<HermitianForm>& testForms) const {
    return densityAt(p, std::span<const HermitianForm>(testForms.data(), testForms.size()));
}

const ModelCurrent& ddc(const ModelCurrent& T) {
    if (!T.ddc_)
        throw std::runtime_error("ddc: no attached dd^c descriptor on current " + T.name);
    return *T.ddc_;
}

namespace {

ModelCurrent make_T0_directional() {
    // -log|t|^2 [z_1 = 0] on C x C, bidegree (1,1)
    ModelCurrent T = ModelCurrent::slice(1, 1, {0}, lognorm_field({1}, -1.0));
    T.name = "T0";
    T.monotonicity = MonotonicityClass::Prh;
    T.annotations = {{{1}, SingularityAnnotation::Kernel::Log, 0.0}};
    // dd^c T0 = -[z_1=0, t=0], an atom of bidegree (2,2) with k+1 > n: the
    // dd^c-mass machinery (n-k-1 < 0) does not apply on this split, so no
    // descriptor is attached and ddc(T0) reports unsupported.
    return T;
}

ModelCurrent make_T0_full() {
    // -log|z_2|^2 [z_1 = 0] on C^2, m = 0
    ModelCurrent T = ModelCurrent::slice(2, 0, {0}, lognorm_field({1}, -1.0));
    T.name = "T0_full";
    T.monotonicity = MonotonicityClass::Prh;
    T.annotations = {{{1}, SingularityAnnotation::Kernel::Log, 0.0}};
    // dd^c T0_full = -[z=0] (unit atom at the origin of C^2).
    ModelCurrent atom = ModelCurrent::slice(2, 0, {0, 1}, const_field(1.0));
    atom.name = "[z=0]";
    atom.monotonicity = MonotonicityClass::Closed;
    atom.withDdc(ModelCurrent::zero(2, 0, 3));
    ModelCurrent d = ModelCurrent::scaledSum({{-1.0, std::move(atom)}});
    d.name = "ddcT0_full";
    d.positive = false;
    d.monotonicity = MonotonicityClass::Closed;
    T.withDdc(std::move(d));
    return T;
}

ModelCurrent make_T1() {
    // -log(|z_1|^2 + |t|^2) [z_2 = 0] on C^2 x C; valid for euclidean z-radius
    // up to 0.8 (the region {|z| < r} x D(0,1/2) stays in the unit ball for
    // r < sqrt(3)/2).
    ModelCurrent T = ModelCurrent::slice(2, 1, {1}, lognorm_field({0, 2}, -1.0));
    T.name = "T1";
    T.monotonicity = MonotonicityClass::Prh;
    T.validityEuclid = 0.8;
    T.annotations = {{{0, 2}, SingularityAnnotation::Kernel::Log, 0.0}};
    ModelCurrent inner = ModelCurrent::slice(2, 1, {1}, const_field(1.0),
                                             {{FormFactor::Type::Hessian, lognorm_field({0, 2}, 1.0)}});
    inner.name = "ddcT1_inner";
    inner.monotonicity = MonotonicityClass::Closed;
    inner.annotations = {{{0, 2}, SingularityAnnotation::Kernel::Power, 2.0}};
    inner.positive = true;
    ModelCurrent d = ModelCurrent::scaledSum({{-1.0, std::move(inner)}});
    d.name = "ddcT1";
    d.positive = false;
    d.monotonicity = MonotonicityClass::Closed;
    T.withDdc(std::move(d));
    return T;
}

ModelCurrent make_T2(void) {
    // d log|z|^2 ^ d^c log|z|^2 on C^2 x C
    ModelCurrent T = ModelCurrent::factored(
        2, 1, const_field(1.0), {{FormFactor::Type::Gradient, lognorm_field({0, 1}, 1.0)}});
    T.name = "T2";
    T.monotonicity = MonotonicityClass::Prh;
    T.annotations = {{{0, 1}, SingularityAnnotation::Kernel::Power, 2.0}};
    ModelCurrent atom = ModelCurrent::slice(2, 1, {0, 1}, const_field(1.0));
    atom.name = "[z=0]";
    atom.monotonicity = MonotonicityClass::Closed;
    atom.withDdc(ModelCurrent::zero(2, 1, 3));
    ModelCurrent d = ModelCurrent::scaledSum({{-1.0, std::move(atom)}});
    d.name = "ddcT2";
    d.positive = false;
    d.monotonicity = MonotonicityClass::Closed;
    T.withDdc(std::move(d));
    return T;
}

ModelCurrent make_T3() {
    // (1 - |t|^2) [z_1 = 0] on C^2 x C
    ModelCurrent T = ModelCurrent::slice(2, 1, {0}, sqnorm_field({2}, -1.0, 1.0));
    T.name = "T3";
    T.monotonicity = MonotonicityClass::Prh;
    ModelCurrent inner = ModelCurrent::slice(2, 1, {0}, const_field(1.0),
                                             {{FormFactor::Type::Hessian, sqnorm_field({2}, 1.0, 0.0)}});
    inner.name = "[z1=0]^omega_t";
    inner.monotonicity = MonotonicityClass::Closed;
    inner.withDdc(ModelCurrent::zero(2, 1, 3));
    ModelCurrent d = ModelCurrent::scaledSum({{-1.0, std::move(inner)}});
    d.name = "ddcT3";
    d.positive = false;
    d.monotonicity = MonotonicityClass::Closed;
    T.withDdc(std::move(d));
    return T;
}

ModelCurrent make_T4() {
    // (|z_2|^2 + |t|^2) [z_1 = 0] on C^2 x C, psh
    ModelCurrent T = ModelCurrent::slice(2, 1, {0}, sqnorm_field({1, 2}, 1.0, 0.0));
    T.name = "T4";
    T.monotonicity = MonotonicityClass::Psh;
    ModelCurrent d = ModelCurrent::slice(2, 1, {0}, const_field(1.0),
                                         {{FormFactor::Type::Hessian, sqnorm_field({1, 2}, 1.0, 0.0)}});
    d.name = "ddcT4";
    d.monotonicity = MonotonicityClass::Closed;
    d.withDdc(ModelCurrent::zero(2, 1, 3));
    T.withDdc(std::move(d));
    return T;
}

ModelCurrent make_TS(int nz) {
    // (2 - |z|^2 - |t|^2) dd^c|z|^2, smooth prh, on C^nz x C
    std::vector<int> zIdx, allIdx;
    for (int i = 0; i < nz; ++i) zIdx.push_back(i);
    allIdx = zIdx;
    allIdx.push_back(nz);
    ModelCurrent T = ModelCurrent::factored(nz, 1, sqnorm_field(allIdx, -1.0, 2.0),
                                            {{FormFactor::Type::Hessian, sqnorm_field(zIdx, 1.0, 0.0)}});
    T.name = (nz == 2) ? "TS" : "TS4";
    T.monotonicity = MonotonicityClass::Prh;
    T.smooth = true;
    ModelCurrent inner = ModelCurrent::factored(nz, 1, const_field(1.0),
                                                {{FormFactor::Type::Hessian, sqnorm_field(allIdx, 1.0, 0.0)},
                                                 {FormFactor::Type::Hessian, sqnorm_field(zIdx, 1.0, 0.0)}});
    inner.name = T.name + "_ddc_inner";
    inner.monotonicity = MonotonicityClass::Closed;
    inner.withDdc(ModelCurrent::zero(nz, 1, 3));
    ModelCurrent d = ModelCurrent::scaledSum({{-1.0, std::move(inner)}});
    d.name = "ddc" + T.name;
    d.positive = false;
    d.monotonicity = MonotonicityClass::Closed;
    T.withDdc(std::move(d));
    return T;
}

ModelCurrent make_H0() {
    // function current h = 1 - |z|^2 - |t|^2 on C x C, bidegree (0,0)
    ModelCurrent T = ModelCurrent::factored(1, 1, sqnorm_field({0, 1}, -1.0, 1.0), {});
    T.name = "H0";
    T.monotonicity = MonotonicityClass::Prh;
    T.smooth = true;
    ModelCurrent inner = ModelCurrent::factored(1, 1, const_field(1.0),
                                                {{FormFactor::Type::Hessian, sqnorm_field({0, 1}, 1.0, 0.0)}});
    inner.name = "omega";
    inner.monotonicity = MonotonicityClass::Closed;
    inner.withDdc(ModelCurrent::zero(1, 1, 2));
    ModelCurrent d = ModelCurrent::scaledSum({{-1.0, std::move(inner)}});
    d.name = "ddcH0";
    d.positive = false;
    d.monotonicity = MonotonicityClass::Closed;
    T.withDdc(std::move(d));
    return T;
}

}  // namespace

ModelCurrent catalog(const std::string& name) {
    if (name == "Zero") {
        ModelCurrent T = ModelCurrent::zero(2, 1, 1);
        T.smooth = true;
        T.withDdc(ModelCurrent::zero(2, 1, 2));
        return T;
    }
    if (name == "T0") return make_T0_directional();
    if (name == "T0_full") return make_T0_full();
    if (name == "T1") return make_T1();
    if (name == "T2") return make_T2();
    if (name == "T3") return make_T3();
    if (name == "T4") return make_T4();
    if (name == "TS") return make_TS(2);
    if (name == "TS4") return make_TS(3);
    if (name == "H0") return make_H0();
    std::string msg = "catalog: unknown current '" + name + "'; available:";
    for (const auto& n : catalog_names()) msg += " " + n;
    throw std::out_of_range(msg);
}

std::vector<std::string> catalog_names() {
    return {"Zero", "T0", "T0_full", "T1", "T2", "T3", "T4", "TS", "TS4", "H0"};
}

std::string catalog_description(const std::string& name) {
    if (name == "Zero") return "zero current, bidegree (1,1), split (2,1), closed";
    if (name == "T0") return "-log|t|^2 [z1=0] on CxC, bidegree (1,1), prh, directional split (1,1)";
    if (name == "T0_full") return "-log|z2|^2 [z1=0] on C^2, bidegree (1,1), prh, split (2,0)";
    if (name == "T1")
        return "-log(|z1|^2+|t|^2) [z2=0] on C^2xC, bidegree (1,1), prh, validity radius 0.8";
    if (name == "T2")
        return "dlog|z|^2 ^ d^c log|z|^2 on C^2xC, bidegree (1,1), prh, ddc = -[z=0]";
    if (name == "T3") return "(1-|t|^2) [z1=0] on C^2xC, bidegree (1,1), prh";
    if (name == "T4") return "(|z2|^2+|t|^2) [z1=0] on C^2xC, bidegree (1,1), psh";
    if (name == "TS") return "(2-|z|^2-|t|^2) dd^c|z|^2 on C^2xC, bidegree (1,1), smooth prh";
    if (name == "TS4") return "(2-|z|^2-|t|^2) dd^c|z|^2 on C^3xC, bidegree (1,1), smooth prh";
    if (name == "H0") return "function current 1-|z|^2-|t|^2 on CxC, bidegree (0,0), prh";
    return "";
}

}  // namespace lelong
