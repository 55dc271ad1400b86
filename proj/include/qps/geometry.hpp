#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <vector>

namespace qps {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

// tolerance hierarchy used across the library
constexpr double kConstructionTol = 1e-12;
constexpr double kSpectralTol = 1e-10;

// A point of the projective state space, stored as a normalized amplitude
// vector. The overall phase is redundant; it is kept as given, and callers
// that want a normal form ask for phase_canonical() explicitly.
class PureState {
  public:
    explicit PureState(Vector amplitudes);
    static PureState standard_basis(int dim, int k);

    int dim() const { return static_cast<int>(z_.size()); }
    const Vector& amplitudes() const { return z_; }
    Complex operator[](int k) const { return z_(k); }

    // representative whose first nonvanishing amplitude is real positive
    PureState phase_canonical() const;

  private:
    Vector z_;
};

// Eigensystem of a Hermitian matrix, eigenvalues ascending.
struct Spectrum {
    RealVector eigenvalues;
    Matrix eigenvectors;   // columns, orthonormal, same order as eigenvalues

    int dim() const { return static_cast<int>(eigenvalues.size()); }
    double min() const { return eigenvalues(0); }
    double max() const { return eigenvalues(eigenvalues.size() - 1); }
    double range() const { return max() - min(); }
    double mean() const { return eigenvalues.mean(); }
    PureState eigenstate(int k) const;
    bool degenerate(double tol = kConstructionTol) const;
};

// Hermitian matrix with its spectrum computed once at construction.
class HermitianObservable {
  public:
    explicit HermitianObservable(Matrix m);
    static HermitianObservable diagonal(const RealVector& levels);

    int dim() const { return static_cast<int>(m_.rows()); }
    const Matrix& matrix() const { return m_; }
    const Spectrum& spectrum() const { return spec_; }

  private:
    Matrix m_;
    Spectrum spec_;
};

// Unit-trace positive matrix. The checked constructor rejects anything that
// is not Hermitian / unit-trace / positive within tolerance; project() is the
// estimator-facing factory that repairs small Monte Carlo violations.
class DensityMatrix {
  public:
    explicit DensityMatrix(Matrix rho);
    static DensityMatrix project(const Matrix& raw);
    static DensityMatrix maximally_mixed(int dim);

    int dim() const { return static_cast<int>(rho_.rows()); }
    const Matrix& matrix() const { return rho_; }
    double population(int k) const { return rho_(k, k).real(); }
    // diagonal after transforming into the given eigenbasis
    RealVector populations_in(const Spectrum& basis) const;

  private:
    Matrix rho_;
};

// ---- projective geometry ----

// |<x|y>|^2, in [0, 1]
double transition_probability(const PureState& x, const PureState& y);

// geodesic separation 2*arccos(sqrt(kappa)), in [0, pi]; orthogonal states
// sit at distance pi. Evaluated so that nearby states keep full relative
// precision, and bitwise symmetric in its arguments.
double fs_angle(const PureState& x, const PureState& y);

// rank-one projector |x><x|
Matrix projector(const PureState& x);

// <x|H|x>, real; lies in [min eigenvalue, max eigenvalue]
double expectation(const HermitianObservable& H, const PureState& x);

// <x|H^2|x> - <x|H|x>^2, clamped at 0 against roundoff
double observable_variance(const HermitianObservable& H, const PureState& x);

// Eigensystem with ascending eigenvalues; exact ties are ordered by
// lexicographic comparison of the eigenvector entries' (re, im) parts so the
// output is deterministic. Throws on non-Hermitian input.
Spectrum eigendecompose(const Matrix& m);

}  // namespace qps
