// Ten closed-form calibration integrals exercising every region feature:
// graded balls in C^1..C^4, power/log singular kernels, anisotropic and
// power-composed weights, annuli, t-discs and mixed product regions.
#pragma once

#include "lelong/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

namespace lelong::testing {

struct CalibrationCase {
    std::string name;
    Region region;
    EffIntegrand f;
    double exact;
};

inline std::vector<CalibrationCase> calibration_suite() {
    using std::numbers::pi;
    std::vector<CalibrationCase> out;

    // 1-4) Lebesgue volume of {|z| < 1/2} in C^N: pi^N / N! * (1/2)^{2N}
    for (int N = 1; N <= 4; ++N) {
        CalibrationCase c;
        c.name = "ball-volume-C" + std::to_string(N);
        c.region.dz = N;
        c.region.zWeight = Weight::euclid(N);
        c.region.rHi = 0.25;
        c.f = [](const CVector&) { return 1.0; };
        c.exact = std::pow(pi, N) / std::tgamma(N + 1) * std::pow(0.5, 2 * N);
        out.push_back(std::move(c));
    }

    // 5) |z|^{-2} kernel over {|z| < 0.4} in C^2: pi^2 r_phi
    {
        CalibrationCase c;
        c.name = "power-kernel-C2";
        c.region.dz = 2;
        c.region.zWeight = Weight::euclid(2);
        c.region.rHi = 0.16;
        c.region.annotations.push_back({{0, 1}, SingularityAnnotation::Kernel::Power, 2.0});
        c.f = [](const CVector& z) { return 1.0 / z.squaredNorm(); };
        c.exact = pi * pi * 0.16;
        out.push_back(std::move(c));
    }

    // 6) same kernel over the annulus {0.04 < |z|^2 < 0.16}: pi^2 (r2 - r1)
    {
        CalibrationCase c;
        c.name = "power-kernel-annulus";
        c.region.dz = 2;
        c.region.zWeight = Weight::euclid(2);
        c.region.rLo = 0.04;
        c.region.rHi = 0.16;
        c.region.annotations.push_back({{0, 1}, SingularityAnnotation::Kernel::Power, 2.0});
        c.f = [](const CVector& z) { return 1.0 / z.squaredNorm(); };
        c.exact = pi * pi * 0.12;
        out.push_back(std::move(c));
    }

    // 7) -log|t|^2 / pi over the disc D(0,1/2): (2 log 2 + 1)/4
    {
        CalibrationCase c;
        c.name = "log-kernel-disc";
        c.region.dz = 0;
        c.region.tBall = DirectionalBall::disc(Complex(0, 0), 0.5);
        c.region.annotations.push_back({{0}, SingularityAnnotation::Kernel::Log, 0.0});
        c.f = [](const CVector& t) { return -std::log(std::norm(t(0))) / std::numbers::pi; };
        c.exact = 0.25 * (2 * std::log(2.0) + 1.0);
        out.push_back(std::move(c));
    }

    // 8) anisotropic sublevel {|z1|^2 + 4|z2|^2 < 0.3}: pi^2 r^2 / (2 * 4)
    {
        CalibrationCase c;
        c.name = "aniso-ellipsoid";
        c.region.dz = 2;
        c.region.zWeight = Weight::aniso({1.0, 4.0});
        c.region.rHi = 0.3;
        c.f = [](const CVector&) { return 1.0; };
        c.exact = pi * pi / 2.0 * 0.09 / 4.0;
        out.push_back(std::move(c));
    }

    // 9) power-composed weight (|z|^2)^2 < 0.0625 on C^1: disc of area pi/4
    {
        CalibrationCase c;
        c.name = "power-weight-disc";
        c.region.dz = 1;
        c.region.zWeight = Weight::power(Weight::euclid(1), 2.0);
        c.region.rHi = 0.0625;
        c.f = [](const CVector&) { return 1.0; };
        c.exact = pi * 0.25;
        out.push_back(std::move(c));
    }

    // 10) product region {|z| < 1/2} x D(0.1, 0.3) with |z|^2 + |t|^2
    {
        CalibrationCase c;
        c.name = "product-region";
        c.region.dz = 1;
        c.region.zWeight = Weight::euclid(1);
        c.region.rHi = 0.25;
        c.region.tBall = DirectionalBall::disc(Complex(0.1, 0.0), 0.3);
        c.f = [](const CVector& p) { return std::norm(p(0)) + std::norm(p(1)); };
        double A1 = 2 * pi * std::pow(0.5, 4) / 4.0;
        double areaD = pi * 0.09, volB = pi * 0.25;
        double I2 = pi * (0.5 * std::pow(0.3, 4) + 0.09 * 0.01);
        c.exact = A1 * areaD + volB * I2;
        out.push_back(std::move(c));
    }
    return out;
}

}  // namespace lelong::testing
