#include "qps/two_level.hpp"

#include "qps/ensembles.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qps {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kSeriesCut = 1e-6;   // switch for forms that only fail at 0
constexpr double kCancelCut = 0.05;   // switch for forms that cancel near 0

double wrap_2pi(double a) {
    a = std::fmod(a, kTwoPi);
    return a < 0 ? a + kTwoPi : a;
}

// ground-state weight of the phase-space canonical matrix for level gap d:
// 1/(1 - e^{-beta d}) - 1/(beta d). The direct form loses eps/y^2 of absolute
// accuracy near 0, so a Bernoulli series takes over below |y| = 0.1.
double gamma_ground_weight(double beta, double gap) {
    const double y = beta * gap;
    if (std::abs(y) < 2 * kCancelCut) {
        const double y2 = y * y;
        return 0.5 + (y / 12.0) * (1.0 - y2 / 60.0 * (1.0 - y2 / 42.0 * (1.0 - y2 / 40.0)));
    }
    return 1.0 / (1.0 - std::exp(-y)) - 1.0 / y;
}

// e^{x} / (2 cosh x) without overflow at large |x|
double gibbs_ground_weight(double x) { return 1.0 / (1.0 + std::exp(-2.0 * x)); }

}  // namespace

PureState bloch_to_state(const BlochCoords& b) {
    if (b.theta < 0 || b.theta > std::numbers::pi)
        throw std::invalid_argument("bloch_to_state: theta must lie in [0, pi]");
    const Complex up = std::polar(std::cos(0.5 * b.theta), b.phi);
    const Complex down = std::polar(std::sin(0.5 * b.theta), -b.phi);
    Vector z(2);
    z << up, down;
    return PureState(std::move(z));
}

BlochCoords state_to_bloch(const PureState& s) {
    if (s.dim() != 2) throw std::invalid_argument("state_to_bloch: need a two-level state");
    BlochCoords b;
    b.theta = 2.0 * std::atan2(std::abs(s[1]), std::abs(s[0]));
    // phases are recovered separately so the full [0, 2pi) range of phi
    // survives the round trip; for arbitrary representatives the result is
    // the canonical choice mod pi
    b.phi = wrap_2pi(0.5 * (std::arg(s[0]) - std::arg(s[1])));
    return b;
}

HermitianObservable spin_hamiltonian(double h, const PureState& pole) {
    if (!(h > 0)) throw std::invalid_argument("spin_hamiltonian: h must be positive");
    const Matrix pi_p = projector(pole);
    return HermitianObservable(h * (2.0 * pi_p - Matrix::Identity(pole.dim(), pole.dim())));
}

PureState bloch_trajectory(const BlochCoords& start, double h, double t) {
    BlochCoords b = start;
    b.phi = wrap_2pi(start.phi + h * t);
    return bloch_to_state(b);
}

TwoLevelSystem::TwoLevelSystem(double e0, double e1, PureState pole)
    : e0_(e0), e1_(e1), pole_(std::move(pole)), antipole_(pole_) {
    if (!(e1 > e0)) throw std::invalid_argument("TwoLevelSystem: levels must satisfy e1 > e0");
    if (pole_.dim() != 2) throw std::invalid_argument("TwoLevelSystem: pole must be a two-level state");
    Vector perp(2);
    perp << -std::conj(pole_[1]), std::conj(pole_[0]);
    antipole_ = PureState(std::move(perp));
}

TwoLevelSystem TwoLevelSystem::spin(double h, PureState pole) {
    if (!(h > 0)) throw std::invalid_argument("TwoLevelSystem::spin: h must be positive");
    return TwoLevelSystem(-h, h, std::move(pole));
}

HermitianObservable TwoLevelSystem::hamiltonian() const {
    const Matrix m = midpoint() * Matrix::Identity(2, 2) + spin_hamiltonian(h(), pole_).matrix();
    return HermitianObservable(m);
}

SpinThermo spin_gamma_closed_forms(double beta, double h, double k) {
    if (!(h > 0)) throw std::invalid_argument("spin_gamma_closed_forms: h must be positive");
    if (!(k > 0)) throw std::invalid_argument("spin_gamma_closed_forms: k must be positive");
    const double x = beta * h;
    const double x2 = x * x;
    SpinThermo out;
    out.z = std::abs(x) < kSeriesCut ? 4.0 * std::numbers::pi * (1.0 + x2 / 6.0)
                                     : 4.0 * std::numbers::pi * std::sinh(x) / x;
    if (std::abs(x) < kCancelCut) {
        // 1/beta - h coth(x) and 1 - x^2/sinh^2(x) both cancel near 0
        out.energy = -h * (x / 3.0) * (1.0 - x2 / 15.0 * (1.0 - 2.0 * x2 / 21.0 * (1.0 - x2 / 10.0)));
        out.heat_capacity = k * (x2 / 3.0) * (1.0 - x2 / 5.0 * (1.0 - 10.0 * x2 / 63.0 * (1.0 - 0.14 * x2)));
    } else {
        out.energy = 1.0 / beta - h / std::tanh(x);
        const double sx = std::sinh(x);
        out.heat_capacity = k * (1.0 - x2 / (sx * sx));
    }
    out.p_ground = gamma_ground_weight(beta, 2.0 * h);
    out.p_excited = 1.0 - out.p_ground;
    return out;
}

SpinThermo spin_conventional_closed_forms(double beta, double h, double k) {
    if (!(h > 0)) throw std::invalid_argument("spin_conventional_closed_forms: h must be positive");
    if (!(k > 0)) throw std::invalid_argument("spin_conventional_closed_forms: k must be positive");
    const double x = beta * h;
    SpinThermo out;
    out.z = 2.0 * std::cosh(x);
    out.energy = -h * std::tanh(x);
    const double cx = std::cosh(x);
    out.heat_capacity = k * x * x / (cx * cx);
    out.p_ground = gibbs_ground_weight(x);
    out.p_excited = 1.0 - out.p_ground;
    return out;
}

namespace {

DensityMatrix mix_pole_antipole(const TwoLevelSystem& sys, double p_ground) {
    const Matrix rho =
        p_ground * projector(sys.antipole()) + (1.0 - p_ground) * projector(sys.pole());
    return DensityMatrix::project(rho);
}

}  // namespace

DensityMatrix two_level_canonical_dm(const TwoLevelSystem& sys, double beta) {
    return mix_pole_antipole(sys, gamma_ground_weight(beta, sys.e1() - sys.e0()));
}

DensityMatrix two_level_gibbs_dm(const TwoLevelSystem& sys, double beta) {
    return mix_pole_antipole(sys, gibbs_ground_weight(beta * sys.h()));
}

double spin_energy_pdf(double beta, double h, double e) {
    if (!(h > 0)) throw std::invalid_argument("spin_energy_pdf: h must be positive");
    if (e < -h || e > h) return 0.0;
    const double x = beta * h;
    if (std::abs(x) < kSeriesCut) return std::exp(-beta * e) / (2.0 * h * (1.0 + x * x / 6.0));
    return beta * std::exp(-beta * e) / (2.0 * std::sinh(x));
}

EnergyDensity spin_energy_pdf_grid(double beta, double h, int points) {
    if (points < 3) throw std::invalid_argument("spin_energy_pdf_grid: need at least 3 points");
    EnergyDensity d;
    d.grid.setLinSpaced(points, -h, h);
    d.density.resize(points);
    for (int i = 0; i < points; ++i) d.density(i) = spin_energy_pdf(beta, h, d.grid(i));
    d.std_error = RealVector::Zero(points);
    return d;
}

}  // namespace qps
