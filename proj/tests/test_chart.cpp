#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "qps/chart.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

using namespace qps;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("round-metric components") {
    const ChartGeometry g{kPi / 3};
    CHECK(g.g_theta_theta() == 1.0);
    CHECK(g.g_phi_phi() == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(g.omega_theta_phi() == doctest::Approx(std::sqrt(0.75)).epsilon(1e-15));
    CHECK(g.gamma_theta_phiphi() == doctest::Approx(-std::sin(kPi / 3) * std::cos(kPi / 3)).epsilon(1e-14));
    CHECK(g.gamma_phi_thetaphi() == doctest::Approx(1.0 / std::tan(kPi / 3)).epsilon(1e-14));
}

TEST_CASE("area form and metric fit together everywhere") {
    for (const double theta : {0.1, kPi / 6, kPi / 3, kPi / 2, 2 * kPi / 3, 3.0}) {
        const ChartGeometry g{theta};
        CHECK(g.compatibility_residual() < 1e-12);
    }
}

TEST_CASE("level-splitting generator solves the flow identity") {
    for (const double theta : {kPi / 6, kPi / 3, kPi / 2, 2 * kPi / 3}) {
        for (const double h : {0.5, 1.0, 2.0}) {
            const KillingResidual r = killing_identity_residual_cp1(theta, h);
            CHECK(r.symmetrized < 1e-8);
            CHECK(r.divergence < 1e-8);
        }
    }
}

TEST_CASE("identity residuals scale linearly with h") {
    const KillingResidual small = killing_identity_residual_cp1(1.0, 1e-3);
    CHECK(small.symmetrized < 1e-10);
    CHECK(small.divergence < 1e-10);
}

TEST_CASE("the chart degenerates at the poles") {
    CHECK_THROWS_AS(killing_identity_residual_cp1(0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(killing_identity_residual_cp1(kPi, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(killing_identity_residual_cp1(1e-9, 1.0), std::invalid_argument);
}
