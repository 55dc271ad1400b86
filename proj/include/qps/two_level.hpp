#pragma once

#include "qps/geometry.hpp"

namespace qps {

// Point on the two-level state sphere. theta is the colatitude measured from
// the pole (the upper eigenstate); phi is the half-azimuth phase parameter of
// the amplitude form below, so the chart azimuth advances as 2*phi.
struct BlochCoords {
    double theta = 0;   // [0, pi]
    double phi = 0;     // [0, 2*pi)
};

// state (cos(theta/2) e^{+i phi}, sin(theta/2) e^{-i phi}) in the pole basis
PureState bloch_to_state(const BlochCoords& b);
// inverse on bloch_to_state's representatives; away from the poles the
// round trip reproduces (theta, phi) exactly up to roundoff
BlochCoords state_to_bloch(const PureState& s);

// h * (2 |pole><pole| - I): eigenvalues exactly -h and +h, pole on top
HermitianObservable spin_hamiltonian(double h, const PureState& pole);

// phase-space flow line through (theta, phi): the colatitude is pinned and
// the phase advances linearly, Z(t) with phases e^{+-i(h t + phi)}
PureState bloch_trajectory(const BlochCoords& start, double h, double t);

// Two nondegenerate levels e0 < e1 with a chosen upper eigenstate. Every
// closed form below shifts trivially with the midpoint, which is kept
// separate from the splitting half-width h = (e1 - e0)/2.
class TwoLevelSystem {
  public:
    TwoLevelSystem(double e0, double e1, PureState pole);
    static TwoLevelSystem spin(double h, PureState pole);   // levels -h, +h

    double e0() const { return e0_; }
    double e1() const { return e1_; }
    double h() const { return 0.5 * (e1_ - e0_); }
    double midpoint() const { return 0.5 * (e0_ + e1_); }
    const PureState& pole() const { return pole_; }
    const PureState& antipole() const { return antipole_; }
    HermitianObservable hamiltonian() const;

  private:
    double e0_, e1_;
    PureState pole_, antipole_;
};

// Closed forms for the phase-space ensemble of a pure +-h splitting,
// Boltzmann constant k explicit, x = beta*h:
//   Z = 4 pi sinh(x)/x        E = 1/beta - h coth(x)
//   C = k (1 - x^2/sinh^2 x)  ground population = 1/(1 - e^{-2x}) - 1/(2x)
// Series continuations take over below |x| = 1e-6.
struct SpinThermo {
    double z = 0;
    double energy = 0;
    double heat_capacity = 0;
    double p_ground = 0;
    double p_excited = 0;
};
SpinThermo spin_gamma_closed_forms(double beta, double h, double k = 1.0);

// Conventional (eigenstate-mixture) counterparts:
//   Z = 2 cosh(x)   E = -h tanh(x)   C = k x^2 / cosh^2 x
//   populations (e^{x}, e^{-x}) / (2 cosh x), ground first
SpinThermo spin_conventional_closed_forms(double beta, double h, double k = 1.0);

// density matrices over (antipole, pole) projectors for the general two-level
// system; midpoint shifts leave them invariant
DensityMatrix two_level_canonical_dm(const TwoLevelSystem& sys, double beta);
DensityMatrix two_level_gibbs_dm(const TwoLevelSystem& sys, double beta);

// canonical energy distribution beta e^{-beta e} / (2 sinh(beta h)) on
// [-h, h]; zero outside; uniform 1/(2h) at beta = 0
double spin_energy_pdf(double beta, double h, double e);

struct EnergyDensity;   // defined in ensembles.hpp
EnergyDensity spin_energy_pdf_grid(double beta, double h, int points = 201);

}  // namespace qps
