#include "lelong/currents.hpp"

#include "lelong/weights.hpp"
#include "wedge_oracle.hpp"

#include <doctest.h>

#include <numbers>

using namespace lelong;

namespace {

constexpr double kPi = std::numbers::pi;

// identity on the z-block, embedded into dim coords
HermitianForm z_identity(int n, int dim) {
    CMatrix M = CMatrix::Zero(dim, dim);
    for (int j = 0; j < n; ++j) M(j, j) = 1.0;
    return HermitianForm(std::move(M));
}

// identity on the t-block
HermitianForm t_identity(int n, int dim) {
    CMatrix M = CMatrix::Zero(dim, dim);
    for (int j = n; j < dim; ++j) M(j, j) = 1.0;
    return HermitianForm(std::move(M));
}

}  // namespace

TEST_CASE("catalog: every listed name resolves and is described") {
    auto names = catalog_names();
    REQUIRE(names.size() == 10);
    for (const auto& nm : names) {
        ModelCurrent T = catalog(nm);
        CHECK(T.name == nm);
        CHECK(!catalog_description(nm).empty());
        CHECK(T.dim() >= 1);
    }
    CHECK_THROWS_AS(catalog("nope"), std::out_of_range);
}

TEST_CASE("catalog metadata: splits, bidegrees, classes") {
    ModelCurrent T2 = catalog("T2");
    CHECK(T2.n() == 2);
    CHECK(T2.m() == 1);
    CHECK(T2.bidegree() == 1);
    CHECK(T2.monotonicity == MonotonicityClass::Prh);
    CHECK(T2.hasDdc());
    CHECK(ddc(T2).bidegree() == 2);
    CHECK_FALSE(ddc(T2).positive);

    ModelCurrent T4 = catalog("T4");
    CHECK(T4.monotonicity == MonotonicityClass::Psh);
    CHECK(ddc(T4).positive);

    ModelCurrent H0 = catalog("H0");
    CHECK(H0.bidegree() == 0);
    CHECK(H0.smooth);

    ModelCurrent T0 = catalog("T0");
    CHECK(T0.n() == 1);
    CHECK_FALSE(T0.hasDdc());
    CHECK_THROWS_AS(ddc(T0), std::runtime_error);

    ModelCurrent T1 = catalog("T1");
    CHECK(T1.validityEuclid == doctest::Approx(0.8));
}

TEST_CASE("densityAt of T3 matches the closed form (1-|t|^2)/pi^2") {
    ModelCurrent T3 = catalog("T3");
    CVector c(3);
    c << Complex(0, 0), Complex(0.1, 0.2), Complex(0.3, -0.1);
    CPoint p(c, 2, 1);
    std::vector<HermitianForm> tf{z_identity(2, 3), t_identity(2, 3)};
    double want = (1.0 - std::norm(c(2))) / (kPi * kPi);
    CHECK(T3.densityAt(p, tf) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("densityAt of T2 matches an independent exterior-algebra evaluation") {
    ModelCurrent T2 = catalog("T2");
    CVector c(3);
    c << Complex(0.15, -0.05), Complex(-0.2, 0.1), Complex(0.05, 0.25);
    CPoint p(c, 2, 1);
    std::vector<HermitianForm> tf{z_identity(2, 3), t_identity(2, 3)};
    // build d log|z|^2 ^ d^c log|z|^2 by hand: rank-one g g* with g_j = zbar_j/|z|^2
    double w = c.head(2).squaredNorm();
    CMatrix G = CMatrix::Zero(3, 3);
    for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) G(j, k) = std::conj(c(j)) * c(k) / (w * w);
    double want =
        testing::wedge_oracle({G, tf[0].mat, tf[1].mat}) * std::pow(kPi, -3);
    CHECK(T2.densityAt(p, tf) == doctest::Approx(want).epsilon(1e-10));
}

TEST_CASE("declared dd^c of TS agrees with finite differences of the potentials") {
    // ddc(TS) should represent -(dd^c(|z|^2+|t|^2)) ^ dd^c|z|^2; with the
    // beta_v test form its density is -2/pi^3 everywhere.
    ModelCurrent dT = ddc(catalog("TS"));
    CHECK(dT.bidegree() == 2);
    CVector c(3);
    c << Complex(0.1, 0.1), Complex(-0.05, 0.2), Complex(0.02, -0.3);
    CPoint p(c, 2, 1);
    std::vector<HermitianForm> tf{t_identity(2, 3)};
    CHECK(dT.densityAt(p, tf) == doctest::Approx(-2.0 / std::pow(kPi, 3)).epsilon(1e-9));
}

TEST_CASE("declared dd^c of T4 matches the Hessian of |z2|^2 + |t|^2 on the slice") {
    // on {z1=0}, dd^c(|z2|^2+|t|^2) wedged with beta_v gives density 1/pi^2
    ModelCurrent dT = ddc(catalog("T4"));
    CVector c(3);
    c << Complex(0, 0), Complex(0.2, -0.1), Complex(0.1, 0.3);
    CPoint p(c, 2, 1);
    std::vector<HermitianForm> tf{t_identity(2, 3)};
    CHECK(dT.densityAt(p, tf) == doctest::Approx(1.0 / (kPi * kPi)).epsilon(1e-9));
}

TEST_CASE("scaled sums combine densities linearly") {
    ModelCurrent T3 = catalog("T3");
    ModelCurrent S = ModelCurrent::scaledSum({{2.0, catalog("T3")}, {0.5, catalog("T3")}});
    CVector c(3);
    c << Complex(0, 0), Complex(0.1, 0.0), Complex(0.2, 0.1);
    CPoint p(c, 2, 1);
    std::vector<HermitianForm> tf{z_identity(2, 3), t_identity(2, 3)};
    CHECK(S.densityAt(p, tf) == doctest::Approx(2.5 * T3.densityAt(p, tf)).epsilon(1e-12));
}

TEST_CASE("onSingularLocus and the guarded evaluation") {
    ModelCurrent T2 = catalog("T2");
    CVector c = CVector::Zero(3);
    c(2) = Complex(0.1, 0.0);
    CPoint p(c, 2, 1);  // z = 0: on the singular locus of T2
    CHECK(T2.onSingularLocus(p));
    std::vector<HermitianForm> tf{z_identity(2, 3), t_identity(2, 3)};
    CHECK_THROWS_AS(T2.densityAt(p, tf), std::domain_error);
    c(0) = Complex(0.05, 0.0);
    CHECK_FALSE(T2.onSingularLocus(CPoint(c, 2, 1)));
}

TEST_CASE("densityAt validates the test-form count") {
    ModelCurrent T3 = catalog("T3");
    CVector c(3);
    c << Complex(0, 0), Complex(0.1, 0.0), Complex(0.1, 0.0);
    CPoint p(c, 2, 1);
    std::vector<HermitianForm> one{z_identity(2, 3)};
    CHECK_THROWS_AS(T3.densityAt(p, one), std::invalid_argument);
}

TEST_CASE("constructor validation") {
    CHECK_THROWS_AS(ModelCurrent::scaledSum({}), std::invalid_argument);
    CHECK_THROWS_AS(ModelCurrent::scaledSum({{1.0, catalog("T3")}, {1.0, catalog("H0")}}),
                    std::invalid_argument);
    ScalarField one;
    one.value = [](const CVector&) { return 1.0; };
    CHECK_THROWS_AS(ModelCurrent::slice(2, 1, {2}, one), std::invalid_argument);
}

TEST_CASE("Zero current has vanishing density") {
    ModelCurrent Z = catalog("Zero");
    CVector c(3);
    c << Complex(0.1, 0.0), Complex(0.0, 0.1), Complex(0.2, 0.0);
    std::vector<HermitianForm> tf{z_identity(2, 3), t_identity(2, 3)};
    CHECK(Z.densityAt(CPoint(c, 2, 1), tf) == 0.0);
}
