#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "qps/flow.hpp"
#include "qps/sampling.hpp"
#include "qps/two_level.hpp"

#include <cmath>
#include <numbers>
#include <vector>

using namespace qps;

namespace {

constexpr double kPi = std::numbers::pi;

HermitianObservable spin_z(double h) { return spin_hamiltonian(h, PureState::standard_basis(2, 0)); }

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = a + (b - a) * i / (n - 1);
    return out;
}

PureState equator_state() {
    Vector z(2);
    z << Complex(std::sqrt(0.5), 0), Complex(std::sqrt(0.5), 0);
    return PureState(z);
}

}  // namespace

TEST_CASE("exact evolution is norm preserving and time additive") {
    RealVector levels(3);
    levels << 0.0, 1.0, std::sqrt(2.0);
    const HermitianObservable H = HermitianObservable::diagonal(levels);
    const PureState x0 = sample_fs_uniform(3, 1, 21, 1)[0];
    const PureState a = evolve_exact_state(H, x0, 0.7 + 0.3);
    const PureState b = evolve_exact_state(H, evolve_exact_state(H, x0, 0.7), 0.3);
    CHECK(std::abs(a.amplitudes().norm() - 1.0) < 1e-14);
    CHECK(fs_angle(a, b) < 1e-12);
}

TEST_CASE("eigenstates do not move") {
    const HermitianObservable H = spin_z(1.0);
    const PureState up = H.spectrum().eigenstate(1);
    CHECK(fs_angle(up, evolve_exact_state(H, up, 3.7)) < 1e-12);
    CHECK(phase_speed(H, up) < 1e-12);
}

TEST_CASE("speed equals twice the energy uncertainty") {
    RealVector levels(4);
    levels << -1.0, 0.2, 1.0, 2.5;
    const HermitianObservable H = HermitianObservable::diagonal(levels);
    const double delta = 1e-6;
    for (const PureState& x : sample_fs_uniform(4, 20, 6, 1)) {
        const double v = phase_speed(H, x);
        const double fd = fs_angle(x, evolve_exact_state(H, x, delta)) / delta;
        CHECK(std::abs(fd - v) < 1e-6);
    }
}

TEST_CASE("equator point of a two-level system circulates at rate 2h") {
    const double h = 1.0;
    const HermitianObservable H = spin_z(h);
    const PureState x0 = equator_state();
    const double t = 0.3;
    const PureState xt = evolve_exact_state(H, x0, t);
    const double azimuth = std::arg(xt[0]) - std::arg(xt[1]) - (std::arg(x0[0]) - std::arg(x0[1]));
    CHECK(std::abs(azimuth - 2.0 * h * t) < 1e-8);
    CHECK(std::abs(phase_speed(H, x0) - 2.0 * h) < 1e-12);
}

TEST_CASE("closed-form circulation matches the spectral flow") {
    const BlochCoords start{1.1, 0.4};
    const double h = 0.75;
    const HermitianObservable H = spin_z(h);
    for (const double t : {0.1, 1.0, 6.0}) {
        const PureState a = bloch_trajectory(start, h, t);
        const PureState b = evolve_exact_state(H, bloch_to_state(start), t);
        CHECK(fs_angle(a, b) < 1e-12);
    }
}

TEST_CASE("two-level orbits close after half the phase period") {
    const double h = 1.0;
    const HermitianObservable H = spin_z(h);
    const PureState x0 = equator_state();
    CHECK(fs_angle(x0, evolve_exact_state(H, x0, kPi / h)) < 1e-9);
    CHECK(fs_angle(x0, evolve_exact_state(H, x0, 0.5 * kPi / h)) > 1.0);
}

TEST_CASE("numerical integration tracks the exact flow") {
    const HermitianObservable H = spin_z(1.0);
    const PureState x0 = equator_state();
    const Trajectory traj = evolve_numeric(H, x0, 10.0, 1e-3);
    REQUIRE(traj.size() == 10001);
    CHECK(traj.times.back() == 10.0);
    CHECK(traj.max_energy_drift() < 1e-9);
    for (std::size_t i = 0; i < traj.size(); i += 1000)
        CHECK(std::abs(traj.states[i].amplitudes().norm() - 1.0) < 1e-13);
    const PureState exact = evolve_exact_state(H, x0, 10.0);
    CHECK(fs_angle(traj.states.back(), exact) < 1e-8);
}

TEST_CASE("short final step lands exactly on the requested time") {
    const HermitianObservable H = spin_z(1.0);
    const Trajectory traj = evolve_numeric(H, equator_state(), 0.0105, 1e-2);
    REQUIRE(traj.size() == 3);
    CHECK(traj.times[1] == 1e-2);
    CHECK(traj.times[2] == 0.0105);
}

TEST_CASE("eigen-overlaps are conserved along trajectories") {
    RealVector levels(3);
    levels << 0.0, 1.0, std::sqrt(2.0);
    const HermitianObservable H = HermitianObservable::diagonal(levels);
    const PureState x0 = PureState(Vector::Ones(3));

    const Trajectory exact = evolve_exact(H, x0, linspace(0.0, 10.0, 1001));
    CHECK(overlap_invariants(H, exact).worst() < 1e-12);
    CHECK(exact.max_energy_drift() < 1e-12);

    const Trajectory numeric = evolve_numeric(H, x0, 10.0, 1e-3);
    CHECK(overlap_invariants(H, numeric).worst() < 1e-8);
}

TEST_CASE("the flow moves state pairs rigidly") {
    RealVector levels(3);
    levels << -0.3, 0.9, 2.0;
    const HermitianObservable H = HermitianObservable::diagonal(levels);
    const auto pts = sample_fs_uniform(3, 2, 33, 1);
    CHECK(isometry_drift(H, pts[0], pts[1], linspace(0.0, 10.0, 101)) < 1e-10);
}

TEST_CASE("relative phases need support on every eigenstate") {
    const HermitianObservable H = spin_z(1.0);
    const PureState up = H.spectrum().eigenstate(1);
    CHECK_THROWS_AS(relative_phases(H, up), std::invalid_argument);
    const RealVector ph = relative_phases(H, equator_state());
    REQUIRE(ph.size() == 1);
    CHECK(ph(0) >= 0.0);
    CHECK(ph(0) < 2.0 * kPi);
}

TEST_CASE("one phase period covers the circle") {
    const double h = 1.0;
    const HermitianObservable H = spin_z(h);
    const PureState x0 = equator_state();
    std::vector<double> phases;
    for (const double t : linspace(0.0, kPi / h, 1000)) phases.push_back(relative_phases(H, evolve_exact_state(H, x0, t))(0));
    CHECK(max_phase_gap(phases) < 0.01);
}

TEST_CASE("max_phase_gap sees the wrap-around gap") {
    CHECK(max_phase_gap({0.0, kPi}) == doctest::Approx(kPi).epsilon(1e-12));
    CHECK(max_phase_gap({0.0, 0.1, 0.2}) == doctest::Approx(2.0 * kPi - 0.2).epsilon(1e-12));
}

TEST_CASE("incommensurate levels wind ever closer on the phase torus") {
    RealVector levels(3);
    levels << 0.0, 1.0, std::sqrt(2.0);
    const HermitianObservable H = HermitianObservable::diagonal(levels);
    const PureState x0 = PureState(Vector::Ones(3));
    auto collect = [&](double t_max, int n) {
        std::vector<RealVector> pts;
        for (const double t : linspace(0.0, t_max, n)) pts.push_back(relative_phases(H, evolve_exact_state(H, x0, t)));
        return min_pairwise_torus_gap(pts);
    };
    const double coarse = collect(30.0, 60);
    const double fine = collect(300.0, 600);
    CHECK(fine < coarse);
    CHECK(fine < 0.5);
}
