#pragma once

#include "qps/geometry.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace qps {

// Raised when a numerical guard refuses to produce a number: weight ESS
// below the floor, empty energy shells, degenerate spectra where the closed
// form needs distinct levels, vanishing normalization denominators. Distinct
// from std::invalid_argument (malformed call) so callers can map the two to
// different exit codes.
struct NumericalGuard : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// total phase-space volume (4 pi)^n / n! for n = dim - 1; the normalization
// under which orthogonal states sit at distance pi and dim 2 gives 4 pi
double cpn_volume(int dim);

// Monte Carlo controls shared by the estimators. Shell width and kernel
// bandwidth default to fixed fractions of the spectral range when unset.
struct McParams {
    std::int64_t samples = 1'000'000;
    std::uint64_t seed = 1;
    int chunks = 1;
    std::optional<double> shell_width;   // default 0.01 * range
    std::optional<double> bandwidth;     // default 0.02 * range
    int workers = 1;                     // >1 runs chunks on threads; results identical

    void validate() const;   // samples >= 1000, chunks >= 1, set widths > 0
    double shell_or_default(double range) const;
    double bandwidth_or_default(double range) const;
};

struct ScalarEstimate {
    double value = 0;
    double std_error = 0;
    std::int64_t samples_used = 0;
    std::uint64_t seed = 0;
    int chunks = 1;
};

struct MatrixEstimate {
    Matrix value;
    RealMatrix std_error;   // per-entry, combined re/im
    std::int64_t samples_used = 0;
    std::uint64_t seed = 0;
    int chunks = 1;
};

struct DensityMatrixEstimate {
    DensityMatrix matrix;    // hermitized, clipped at 0, trace renormalized
    MatrixEstimate raw;      // plain weighted sample mean with std errors
    ScalarEstimate energy;   // tr(H rho) with propagated std error
    double ess = 0;          // effective sample size of the weights
};

// Density on an equally spaced energy grid. Estimated densities carry
// pointwise standard errors; exact ones leave them zero.
struct EnergyDensity {
    RealVector grid;
    RealVector density;
    RealVector std_error;

    int size() const { return static_cast<int>(grid.size()); }
    double spacing() const;
    double trapezoid() const;
    double value_at(double e) const;       // linear interpolation, 0 outside
    EnergyDensity normalized() const;      // unit trapezoid integral
    void validate() const;                 // spacing equal within 1e-9, density >= 0
};

// mean of exp(-beta * <levels, p>) over the uniform probability simplex:
//   n! * sum_k exp(-beta E_k) / prod_{j != k} (beta (E_j - E_k))
// shifted by the lowest level for overflow safety and continued by the
// quadratic series when |beta| * spread < 1e-8; rejects degenerate levels
double simplex_exp_moment(const RealVector& levels, double beta);

// Z = V * <exp(-beta H(x))> over the invariant measure
ScalarEstimate canonical_partition(const HermitianObservable& H, double beta, const McParams& mc);

// self-normalized importance estimate of <projector>_beta; refuses when the
// weight effective sample size drops below 100
DensityMatrixEstimate canonical_density_matrix(const HermitianObservable& H, double beta, const McParams& mc);

// eigenstate mixture exp(-beta E_k)/Z with the max-level shift; exact
DensityMatrix conventional_gibbs_dm(const HermitianObservable& H, double beta);

// Omega(E): kernel-density estimate of the invariant measure's energy
// density, Epanechnikov kernel; 0 with zero error outside the spectral range
ScalarEstimate state_density(const HermitianObservable& H, double energy, const McParams& mc);

// W(E) = V * P(H(x) <= E)
ScalarEstimate volume_below(const HermitianObservable& H, double energy, const McParams& mc);

// mean projector over the energy shell [E - w/2, E + w/2]; refuses shells
// that catch fewer than 100 samples
DensityMatrixEstimate microcanonical_dm(const HermitianObservable& H, double energy, const McParams& mc);

// Volume-derivative route to the same matrix: central differences of W(E)
// under Hermitian basis perturbations of H with common random numbers,
// normalized by the uniform-shift derivative. Step h_step on each direction.
DensityMatrixEstimate microcanonical_dm_via_volume(const HermitianObservable& H, double energy, double h_step,
                                                   const McParams& mc);

// weighted kernel density of the canonical energy distribution, normalized
// to unit trapezoid integral on a grid padded by one bandwidth
EnergyDensity canonical_energy_pdf(const HermitianObservable& H, double beta, const McParams& mc);

// convolution of two equal-spacing densities (trapezoid weights on the
// overlap), defined on the sum grid: the composite system's state density
EnergyDensity bath_composition(const EnergyDensity& omega1, const EnergyDensity& omega2);

// conditional distribution of the subsystem energy at fixed total energy,
// p(e2) proportional to omega1(e_total - e2) * omega2(e2), normalized on
// omega2's grid
EnergyDensity conditional_subsystem_pdf(const EnergyDensity& omega1, const EnergyDensity& omega2, double e_total);

// log-derivative d ln(omega)/dE at e by central differences on the grid
double log_density_slope(const EnergyDensity& omega, double e);

struct ThermoRow {
    double beta = 0;
    double z = 0;
    double energy = 0;          // -d ln Z / d beta
    double heat_capacity = 0;   // dE/dT with k = 1
    double entropy = 0;         // ln Z + beta E
    double beta_check = 0;      // dS/dE along the table; equals beta
};

// Thermodynamic table over beta_grid (ascending, spacing <= 0.1 * beta).
// ln Z comes from the simplex closed form for nondegenerate spectra and from
// a single common-seed sample set otherwise; E and C by central differences.
std::vector<ThermoRow> thermodynamics(const HermitianObservable& H, const std::vector<double>& beta_grid,
                                      const McParams& mc);

}  // namespace qps
