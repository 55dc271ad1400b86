#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "qps/geometry.hpp"
#include "qps/sampling.hpp"

#include <cmath>
#include <numbers>

using namespace qps;

namespace {
constexpr double kPi = std::numbers::pi;

Matrix pauli_x() {
    Matrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}
}  // namespace

TEST_CASE("states normalize on construction") {
    Vector z(2);
    z << Complex(3, 0), Complex(0, 4);
    const PureState s(z);
    CHECK(s.amplitudes().norm() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(s[0].real() == doctest::Approx(0.6));
    CHECK(s[1].imag() == doctest::Approx(0.8));
}

TEST_CASE("degenerate amplitude vectors are rejected") {
    CHECK_THROWS_AS(PureState(Vector::Zero(3)), std::invalid_argument);
    CHECK_THROWS_AS(PureState(Vector::Ones(1)), std::invalid_argument);
    Vector bad(2);
    bad << Complex(std::nan(""), 0), Complex(1, 0);
    CHECK_THROWS_AS(PureState{bad}, std::invalid_argument);
}

TEST_CASE("phase_canonical makes the leading amplitude real positive") {
    Vector z(3);
    z << Complex(0, 0), Complex(0, -2), Complex(1, 1);
    const PureState s = PureState(z).phase_canonical();
    CHECK(std::abs(s[0]) < 1e-15);
    CHECK(std::abs(s[1].imag()) < 1e-15);
    CHECK(s[1].real() > 0);
}

TEST_CASE("orthogonal states sit at separation pi") {
    const PureState a = PureState::standard_basis(2, 0);
    const PureState b = PureState::standard_basis(2, 1);
    CHECK(transition_probability(a, b) == doctest::Approx(0.0).scale(1));
    CHECK(fs_angle(a, b) == doctest::Approx(kPi).epsilon(1e-15));
    CHECK(fs_angle(a, a) == doctest::Approx(0.0).scale(1));
}

TEST_CASE("separation is phase blind") {
    Vector z(2);
    z << Complex(1, 0), Complex(1, 0);
    const PureState a(z);
    const PureState b(Vector(Complex(0, 1) * a.amplitudes()));
    CHECK(fs_angle(a, b) == doctest::Approx(0.0).scale(1));
    CHECK(transition_probability(a, b) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("separation keeps relative precision for nearby states") {
    for (const double eps : {1e-4, 1e-6, 1e-8}) {
        Vector z(2);
        z << Complex(std::cos(0.5 * eps), 0), Complex(std::sin(0.5 * eps), 0);
        const double d = fs_angle(PureState::standard_basis(2, 0), PureState(z));
        CHECK(std::abs(d - eps) / eps < 1e-6);
    }
}

TEST_CASE("separation is exactly symmetric in its arguments") {
    const std::vector<PureState> pts = sample_fs_uniform(4, 64, 17, 1);
    for (std::size_t i = 0; i + 1 < pts.size(); i += 2) {
        const double ab = fs_angle(pts[i], pts[i + 1]);
        const double ba = fs_angle(pts[i + 1], pts[i]);
        CHECK(ab == ba);
    }
}

TEST_CASE("separation obeys the triangle inequality") {
    const std::vector<PureState> pts = sample_fs_uniform(3, 90, 5, 1);
    for (std::size_t i = 0; i + 2 < pts.size(); i += 3) {
        const double xy = fs_angle(pts[i], pts[i + 1]);
        const double yz = fs_angle(pts[i + 1], pts[i + 2]);
        const double xz = fs_angle(pts[i], pts[i + 2]);
        CHECK(xz <= xy + yz + 1e-12);
    }
}

TEST_CASE("projectors are rank-one and idempotent") {
    const std::vector<PureState> pts = sample_fs_uniform(3, 8, 2, 1);
    for (const PureState& s : pts) {
        const Matrix p = projector(s);
        CHECK((p - p.adjoint()).cwiseAbs().maxCoeff() < 1e-15);
        CHECK(std::abs(p.trace().real() - 1.0) < 1e-14);
        CHECK((p * p - p).cwiseAbs().maxCoeff() < 1e-14);
    }
}

TEST_CASE("expectations stay inside the spectral interval") {
    RealVector levels(3);
    levels << -1.0, 0.25, 2.0;
    const HermitianObservable H = HermitianObservable::diagonal(levels);
    for (const PureState& s : sample_fs_uniform(3, 200, 3, 1)) {
        const double e = expectation(H, s);
        CHECK(e >= levels(0) - 1e-12);
        CHECK(e <= levels(2) + 1e-12);
        CHECK(observable_variance(H, s) >= 0.0);
    }
}

TEST_CASE("variance vanishes exactly on eigenstates") {
    const HermitianObservable H(pauli_x());
    const Spectrum& s = H.spectrum();
    CHECK(observable_variance(H, s.eigenstate(0)) < 1e-14);
    CHECK(observable_variance(H, s.eigenstate(1)) < 1e-14);
    CHECK(expectation(H, s.eigenstate(0)) == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(expectation(H, s.eigenstate(1)) == doctest::Approx(+1.0).epsilon(1e-14));
}

TEST_CASE("eigendecompose sorts ascending and reconstructs") {
    Matrix m(3, 3);
    m << Complex(2, 0), Complex(0, 1), Complex(0.5, 0), Complex(0, -1), Complex(-1, 0), Complex(0, 0.25),
        Complex(0.5, 0), Complex(0, -0.25), Complex(0.5, 0);
    const Spectrum s = eigendecompose(m);
    CHECK(s.eigenvalues(0) <= s.eigenvalues(1));
    CHECK(s.eigenvalues(1) <= s.eigenvalues(2));
    const Matrix rebuilt = s.eigenvectors * s.eigenvalues.asDiagonal() * s.eigenvectors.adjoint();
    CHECK((rebuilt - m).cwiseAbs().maxCoeff() < 1e-12);
    const Matrix gram = s.eigenvectors.adjoint() * s.eigenvectors;
    CHECK((gram - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("eigendecompose rejects non-Hermitian input") {
    Matrix m(2, 2);
    m << Complex(0, 0), Complex(1, 0), Complex(2, 0), Complex(0, 0);
    CHECK_THROWS_AS(eigendecompose(m), std::invalid_argument);
}

TEST_CASE("degenerate spectra decompose deterministically") {
    RealVector levels(3);
    levels << 1.0, 1.0, 0.0;
    const Matrix m = HermitianObservable::diagonal(levels).matrix();
    const Spectrum a = eigendecompose(m);
    const Spectrum b = eigendecompose(m);
    CHECK((a.eigenvectors - b.eigenvectors).cwiseAbs().maxCoeff() == 0.0);
    CHECK(a.degenerate());
    RealVector distinct(2);
    distinct << 0.0, 1.0;
    CHECK_FALSE(HermitianObservable::diagonal(distinct).spectrum().degenerate());
}

TEST_CASE("density matrices reject malformed input") {
    CHECK_THROWS_AS(DensityMatrix{pauli_x()}, std::invalid_argument);          // eigenvalue -1
    CHECK_THROWS_AS(DensityMatrix(2.0 * Matrix::Identity(2, 2)), std::invalid_argument);
    Matrix skew(2, 2);
    skew << Complex(0.5, 0), Complex(0.1, 0), Complex(0.3, 0), Complex(0.5, 0);
    CHECK_THROWS_AS(DensityMatrix{skew}, std::invalid_argument);
}

TEST_CASE("project repairs small violations") {
    Matrix raw = 0.5 * Matrix::Identity(2, 2);
    raw(0, 1) = Complex(1e-8, 2e-8);
    raw(0, 0) += 3e-9;
    const DensityMatrix rho = DensityMatrix::project(raw);
    CHECK(std::abs(rho.matrix().trace().real() - 1.0) < 1e-14);
    CHECK((rho.matrix() - rho.matrix().adjoint()).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("populations report the diagonal in any eigenbasis") {
    const DensityMatrix rho = DensityMatrix::maximally_mixed(3);
    CHECK(rho.population(0) == doctest::Approx(1.0 / 3).epsilon(1e-15));
    const HermitianObservable H(pauli_x());
    const DensityMatrix rho2 = DensityMatrix::maximally_mixed(2);
    const RealVector pops = rho2.populations_in(H.spectrum());
    CHECK(pops.sum() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(pops(0) == doctest::Approx(0.5).epsilon(1e-14));
}
