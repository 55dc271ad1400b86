#pragma once

#include "qps/geometry.hpp"

#include <vector>

namespace qps {

// Time-ordered states along one flow line with their energy expectations.
struct Trajectory {
    std::vector<double> times;
    std::vector<PureState> states;
    std::vector<double> energies;

    std::size_t size() const { return times.size(); }
    int dim() const;
    double max_energy_drift() const;   // max |E(t) - E(0)|
};

// exact flow by spectral decomposition, amplitudes rotated by e^{+i E_k t};
// norm-preserving and time-additive to roundoff
PureState evolve_exact_state(const HermitianObservable& H, const PureState& x0, double t);
Trajectory evolve_exact(const HermitianObservable& H, const PureState& x0, const std::vector<double>& times);

// classical 4th-order integration of dz/dt = +i H z with per-step
// renormalization; records every step time from 0 to t (final short step
// lands exactly on t)
Trajectory evolve_numeric(const HermitianObservable& H, const PureState& x0, double t, double dt);

// geometric speed of the flow line through x: twice the energy uncertainty
double phase_speed(const HermitianObservable& H, const PureState& x);

// largest change of the separation of two flow lines over the given times;
// the flow moves states rigidly, so this is a pure roundoff figure
double isometry_drift(const HermitianObservable& H, const PureState& a, const PureState& b,
                      const std::vector<double>& times);

// Per-eigenstate overlap conservation along a trajectory.
struct OverlapDrift {
    RealVector initial;      // |<y_k|x(0)>|^2
    RealVector max_drift;    // max_t | |<y_k|x(t)>|^2 - initial_k |
    double worst() const { return max_drift.size() ? max_drift.maxCoeff() : 0.0; }
};
OverlapDrift overlap_invariants(const HermitianObservable& H, const Trajectory& traj);

// largest gap between neighbouring angles on the circle (wrap-around
// included); small gap = the set of angles covers the circle densely
double max_phase_gap(std::vector<double> angles);

// relative eigenphases arg<y_k|x> - arg<y_0|x> for k = 1..dim-1; the torus
// point that a flow line winds through
RealVector relative_phases(const HermitianObservable& H, const PureState& x);

// minimum pairwise toroidal distance (max-coordinate metric) among points;
// for a nonresonant winding this statistic decreases as more of the line is
// sampled
double min_pairwise_torus_gap(const std::vector<RealVector>& points);

}  // namespace qps
