#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "qps/ensembles.hpp"
#include "qps/sampling.hpp"
#include "qps/two_level.hpp"

#include <cmath>
#include <numbers>

using namespace qps;

namespace {

constexpr double kPi = std::numbers::pi;

// Simpson quadrature of f over [a, b] with n (even) intervals
template <typename F>
double simpson(F f, double a, double b, int n) {
    const double dh = (b - a) / n;
    double acc = f(a) + f(b);
    for (int i = 1; i < n; ++i) acc += f(a + dh * i) * (i % 2 ? 4.0 : 2.0);
    return acc * dh / 3.0;
}

}  // namespace

TEST_CASE("phase-space closed forms at beta = h = 1") {
    const SpinThermo g = spin_gamma_closed_forms(1.0, 1.0);
    CHECK(g.z == doctest::Approx(14.76801374576529).epsilon(1e-14));
    CHECK(g.energy == doctest::Approx(-0.31303528549933124).epsilon(1e-14));
    CHECK(g.p_ground == doctest::Approx(0.6565176427496657).epsilon(1e-14));
    CHECK(g.p_excited == doctest::Approx(0.3434823572503344).epsilon(1e-14));
    CHECK(g.p_ground + g.p_excited == doctest::Approx(1.0).epsilon(1e-15));

    const SpinThermo g2 = spin_gamma_closed_forms(2.0, 1.0);
    CHECK(g2.p_ground == doctest::Approx(0.7686573603637741).epsilon(1e-14));
    CHECK(g2.p_excited == doctest::Approx(0.23134263963622595).epsilon(1e-14));
}

TEST_CASE("eigenstate-mixture closed forms at beta = h = 1") {
    const SpinThermo c = spin_conventional_closed_forms(1.0, 1.0);
    CHECK(c.z == doctest::Approx(2.0 * std::cosh(1.0)).epsilon(1e-15));
    CHECK(c.energy == doctest::Approx(-0.7615941559557649).epsilon(1e-14));
    CHECK(c.p_ground == doctest::Approx(0.8807970779778824).epsilon(1e-14));
    CHECK(c.p_excited == doctest::Approx(0.11920292202211756).epsilon(1e-14));
}

TEST_CASE("heat capacities at the temperature floor") {
    const double t = 0.05;
    const SpinThermo g = spin_gamma_closed_forms(1.0 / t, 1.0);
    const SpinThermo c = spin_conventional_closed_forms(1.0 / t, 1.0);
    CHECK(std::abs(g.heat_capacity - 1.0) < 1e-6);
    CHECK(c.heat_capacity < 1e-6);
}

TEST_CASE("Boltzmann constant scales the heat capacity only") {
    const SpinThermo one = spin_gamma_closed_forms(1.0, 1.0, 1.0);
    const SpinThermo two = spin_gamma_closed_forms(1.0, 1.0, 2.0);
    CHECK(two.heat_capacity == doctest::Approx(2.0 * one.heat_capacity).epsilon(1e-14));
    CHECK(two.energy == one.energy);
    CHECK(two.p_ground == one.p_ground);
}

TEST_CASE("phase-space polarization is weaker at every temperature") {
    for (const double beta : {0.25, 0.5, 1.0, 2.0, 4.0}) {
        const SpinThermo g = spin_gamma_closed_forms(beta, 1.0);
        const SpinThermo c = spin_conventional_closed_forms(beta, 1.0);
        CHECK(g.p_ground < c.p_ground);
        CHECK(g.p_ground > 0.5);
    }
}

TEST_CASE("series continuation is smooth across the switch") {
    for (const double x : {0.9e-6, 1.1e-6}) {
        const SpinThermo g = spin_gamma_closed_forms(x, 1.0);
        CHECK(g.z == doctest::Approx(4.0 * kPi * (1.0 + x * x / 6.0)).epsilon(1e-12));
        CHECK(g.p_ground == doctest::Approx(0.5 + x / 6.0).epsilon(1e-9));
        CHECK(std::abs(g.energy + x / 3.0) < 1e-12);
    }
    const SpinThermo flat = spin_gamma_closed_forms(0.0, 1.0);
    CHECK(flat.z == doctest::Approx(4.0 * kPi).epsilon(1e-15));
    CHECK(flat.p_ground == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(flat.heat_capacity == doctest::Approx(0.0).scale(1));
}

TEST_CASE("bloch coordinates round-trip") {
    for (const double theta : {0.2, 1.0, kPi / 2, 2.8}) {
        for (const double phi : {0.0, 0.7, 3.0, 6.0}) {
            const BlochCoords back = state_to_bloch(bloch_to_state({theta, phi}));
            CHECK(back.theta == doctest::Approx(theta).epsilon(1e-10));
            CHECK(back.phi == doctest::Approx(phi).epsilon(1e-10));
        }
    }
}

TEST_CASE("spin hamiltonian has levels exactly at -h and +h") {
    const PureState pole = sample_fs_uniform(2, 1, 8, 1)[0];
    const double h = 1.75;
    const HermitianObservable H = spin_hamiltonian(h, pole);
    CHECK(H.spectrum().eigenvalues(0) == doctest::Approx(-h).epsilon(1e-14));
    CHECK(H.spectrum().eigenvalues(1) == doctest::Approx(+h).epsilon(1e-14));
    CHECK(std::abs(expectation(H, pole) - h) < 1e-12);
}

TEST_CASE("two-level systems reject a collapsed splitting") {
    const PureState pole = PureState::standard_basis(2, 0);
    CHECK_THROWS_AS(TwoLevelSystem(1.0, 1.0, pole), std::invalid_argument);
    CHECK_THROWS_AS(TwoLevelSystem(2.0, 1.0, pole), std::invalid_argument);
    const TwoLevelSystem sys = TwoLevelSystem::spin(1.0, pole);
    CHECK(sys.e0() == -1.0);
    CHECK(sys.e1() == 1.0);
    CHECK(transition_probability(sys.pole(), sys.antipole()) < 1e-28);
}

TEST_CASE("density matrices ignore the spectral midpoint") {
    const PureState pole = PureState::standard_basis(2, 0);
    const TwoLevelSystem centered(-1.0, 1.0, pole);
    const TwoLevelSystem shifted(9.0, 11.0, pole);
    const Matrix a = two_level_canonical_dm(centered, 0.8).matrix();
    const Matrix b = two_level_canonical_dm(shifted, 0.8).matrix();
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("density matrices follow the pole") {
    const PureState pole = sample_fs_uniform(2, 1, 14, 1)[0];
    const TwoLevelSystem sys = TwoLevelSystem::spin(1.0, pole);
    const SpinThermo g = spin_gamma_closed_forms(1.0, 1.0);
    const Matrix rho = two_level_canonical_dm(sys, 1.0).matrix();
    const double on_pole = (pole.amplitudes().adjoint() * rho * pole.amplitudes())(0).real();
    const double on_anti = (sys.antipole().amplitudes().adjoint() * rho * sys.antipole().amplitudes())(0).real();
    CHECK(on_pole == doctest::Approx(g.p_excited).epsilon(1e-12));
    CHECK(on_anti == doctest::Approx(g.p_ground).epsilon(1e-12));
}

TEST_CASE("gibbs matrix reproduces the conventional populations") {
    const TwoLevelSystem sys = TwoLevelSystem::spin(1.0, PureState::standard_basis(2, 0));
    const Matrix rho = two_level_gibbs_dm(sys, 1.0).matrix();
    CHECK(rho(1, 1).real() == doctest::Approx(0.8807970779778824).epsilon(1e-13));
    CHECK(rho(0, 0).real() == doctest::Approx(0.11920292202211756).epsilon(1e-13));
    CHECK(std::abs(rho(0, 1)) < 1e-15);
}

TEST_CASE("energy distribution closed form") {
    CHECK(spin_energy_pdf(1.0, 1.0, 0.0) == doctest::Approx(0.4254590641196608).epsilon(1e-14));
    CHECK(spin_energy_pdf(1.0, 1.0, 1.5) == 0.0);
    CHECK(spin_energy_pdf(1.0, 1.0, -1.5) == 0.0);
    CHECK(spin_energy_pdf(0.0, 2.0, 0.3) == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("energy distribution integrates to one with the closed-form mean") {
    const double beta = 1.0, h = 1.0;
    auto pdf = [&](double e) { return spin_energy_pdf(beta, h, e); };
    auto epdf = [&](double e) { return e * spin_energy_pdf(beta, h, e); };
    CHECK(simpson(pdf, -h, h, 2000) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(simpson(epdf, -h, h, 2000) == doctest::Approx(-0.31303528549933124).epsilon(1e-10));
}

TEST_CASE("gridded energy distribution matches the pointwise form") {
    const EnergyDensity d = spin_energy_pdf_grid(1.0, 1.0, 201);
    d.validate();
    CHECK(d.grid(0) == -1.0);
    CHECK(d.grid(200) == 1.0);
    CHECK(d.value_at(0.0) == doctest::Approx(0.4254590641196608).epsilon(1e-5));
    CHECK(d.trapezoid() == doctest::Approx(1.0).epsilon(1e-4));
}
