#include "qps/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qps {

namespace {

// <x|y> with a fixed summation order, so that the swapped call yields the
// exact conjugate and fs_angle stays bitwise symmetric
Complex inner(const Vector& x, const Vector& y) {
    Complex s(0, 0);
    for (Eigen::Index i = 0; i < x.size(); ++i) s += std::conj(x(i)) * y(i);
    return s;
}

}  // namespace

PureState::PureState(Vector amplitudes) : z_(std::move(amplitudes)) {
    if (z_.size() < 2) throw std::invalid_argument("PureState: dimension must be at least 2");
    const double n = z_.norm();
    if (!(n > 0) || !std::isfinite(n)) throw std::invalid_argument("PureState: amplitudes must have nonzero finite norm");
    z_ /= n;
}

PureState PureState::standard_basis(int dim, int k) {
    if (dim < 2 || k < 0 || k >= dim) throw std::invalid_argument("PureState::standard_basis: bad index");
    Vector z = Vector::Zero(dim);
    z(k) = Complex(1, 0);
    return PureState(std::move(z));
}

PureState PureState::phase_canonical() const {
    for (Eigen::Index i = 0; i < z_.size(); ++i) {
        if (std::abs(z_(i)) > kConstructionTol) {
            Complex phase = std::conj(z_(i)) / std::abs(z_(i));
            return PureState(z_ * phase);
        }
    }
    return *this;
}

PureState Spectrum::eigenstate(int k) const {
    if (k < 0 || k >= dim()) throw std::out_of_range("Spectrum::eigenstate: index out of range");
    return PureState(eigenvectors.col(k));
}

bool Spectrum::degenerate(double tol) const {
    for (Eigen::Index i = 0; i + 1 < eigenvalues.size(); ++i)
        if (eigenvalues(i + 1) - eigenvalues(i) <= tol) return true;
    return false;
}

HermitianObservable::HermitianObservable(Matrix m) : m_(std::move(m)), spec_(eigendecompose(m_)) {}

HermitianObservable HermitianObservable::diagonal(const RealVector& levels) {
    if (levels.size() < 2) throw std::invalid_argument("HermitianObservable::diagonal: need at least 2 levels");
    Matrix m = Matrix::Zero(levels.size(), levels.size());
    for (Eigen::Index i = 0; i < levels.size(); ++i) m(i, i) = Complex(levels(i), 0);
    return HermitianObservable(std::move(m));
}

DensityMatrix::DensityMatrix(Matrix rho) : rho_(std::move(rho)) {
    if (rho_.rows() != rho_.cols() || rho_.rows() < 2)
        throw std::invalid_argument("DensityMatrix: need a square matrix of dimension >= 2");
    if ((rho_ - rho_.adjoint()).cwiseAbs().maxCoeff() > kConstructionTol)
        throw std::invalid_argument("DensityMatrix: not Hermitian within 1e-12");
    if (std::abs(rho_.trace().real() - 1.0) > 1e-10 || std::abs(rho_.trace().imag()) > 1e-10)
        throw std::invalid_argument("DensityMatrix: trace must be 1 within 1e-10");
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho_, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-10)
        throw std::invalid_argument("DensityMatrix: negative eigenvalue beyond tolerance");
}

DensityMatrix DensityMatrix::project(const Matrix& raw) {
    if (raw.rows() != raw.cols() || raw.rows() < 2)
        throw std::invalid_argument("DensityMatrix::project: need a square matrix of dimension >= 2");
    Matrix herm = 0.5 * (raw + raw.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(herm);
    RealVector vals = es.eigenvalues().cwiseMax(0.0);
    const double tr = vals.sum();
    if (!(tr > 0)) throw std::invalid_argument("DensityMatrix::project: matrix has no positive part");
    vals /= tr;
    Matrix rho = es.eigenvectors() * vals.asDiagonal() * es.eigenvectors().adjoint();
    // symmetrize once more; the triple product can leave ~1e-16 asymmetry
    rho = 0.5 * (rho + rho.adjoint());
    rho *= 1.0 / rho.trace().real();
    return DensityMatrix(std::move(rho));
}

DensityMatrix DensityMatrix::maximally_mixed(int dim) {
    if (dim < 2) throw std::invalid_argument("DensityMatrix::maximally_mixed: dimension must be >= 2");
    return DensityMatrix(Matrix::Identity(dim, dim) / static_cast<double>(dim));
}

RealVector DensityMatrix::populations_in(const Spectrum& basis) const {
    if (basis.dim() != dim()) throw std::invalid_argument("populations_in: dimension mismatch");
    RealVector p(dim());
    for (int k = 0; k < dim(); ++k) {
        Vector v = basis.eigenvectors.col(k);
        p(k) = (v.adjoint() * rho_ * v)(0, 0).real();
    }
    return p;
}

double transition_probability(const PureState& x, const PureState& y) {
    if (x.dim() != y.dim()) throw std::invalid_argument("transition_probability: dimension mismatch");
    const Complex c = inner(x.amplitudes(), y.amplitudes());
    return std::min(1.0, std::norm(c));
}

double fs_angle(const PureState& x, const PureState& y) {
    if (x.dim() != y.dim()) throw std::invalid_argument("fs_angle: dimension mismatch");
    const Vector& a = x.amplitudes();
    const Vector& b = y.amplitudes();
    const Complex c = inner(a, b);
    // sin(angle/2) from the residual component of each state against the
    // other; this keeps relative precision when the states nearly coincide,
    // where 1 - |c|^2 cancels catastrophically. The two residuals are equal
    // analytically; their mean makes the result symmetric bit for bit.
    const double r1 = (b - a * c).squaredNorm();
    const double r2 = (a - b * std::conj(c)).squaredNorm();
    const double s = std::sqrt(0.5 * (r1 + r2));
    return 2.0 * std::atan2(s, std::abs(c));
}

Matrix projector(const PureState& x) {
    const Vector& z = x.amplitudes();
    return z * z.adjoint();
}

double expectation(const HermitianObservable& H, const PureState& x) {
    if (H.dim() != x.dim()) throw std::invalid_argument("expectation: dimension mismatch");
    const Vector& z = x.amplitudes();
    return (z.adjoint() * H.matrix() * z)(0, 0).real();
}

double observable_variance(const HermitianObservable& H, const PureState& x) {
    if (H.dim() != x.dim()) throw std::invalid_argument("observable_variance: dimension mismatch");
    const Vector hz = H.matrix() * x.amplitudes();
    const double second = hz.squaredNorm();
    const double first = (x.amplitudes().adjoint() * hz)(0, 0).real();
    return std::max(0.0, second - first * first);
}

namespace {

// lexicographic (re, im) comparison of eigenvector columns, used only to
// order exactly tied eigenvalues deterministically
bool column_less(const Matrix& m, Eigen::Index a, Eigen::Index b) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        const Complex& u = m(i, a);
        const Complex& v = m(i, b);
        if (u.real() != v.real()) return u.real() < v.real();
        if (u.imag() != v.imag()) return u.imag() < v.imag();
    }
    return false;
}

}  // namespace

Spectrum eigendecompose(const Matrix& m) {
    if (m.rows() != m.cols() || m.rows() < 2)
        throw std::invalid_argument("eigendecompose: need a square matrix of dimension >= 2");
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() > kConstructionTol)
        throw std::invalid_argument("eigendecompose: matrix is not Hermitian within 1e-12");

    Eigen::SelfAdjointEigenSolver<Matrix> es(m);
    if (es.info() != Eigen::Success) throw std::runtime_error("eigendecompose: solver failed");

    std::vector<Eigen::Index> order(m.rows());
    std::iota(order.begin(), order.end(), 0);
    const RealVector& vals = es.eigenvalues();
    const Matrix& vecs = es.eigenvectors();
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        if (vals(a) != vals(b)) return vals(a) < vals(b);
        return column_less(vecs, a, b);
    });

    Spectrum s;
    s.eigenvalues.resize(m.rows());
    s.eigenvectors.resize(m.rows(), m.cols());
    for (Eigen::Index k = 0; k < m.rows(); ++k) {
        s.eigenvalues(k) = vals(order[k]);
        s.eigenvectors.col(k) = vecs.col(order[k]);
    }
    const double ortho = (s.eigenvectors.adjoint() * s.eigenvectors - Matrix::Identity(m.rows(), m.cols()))
                             .cwiseAbs()
                             .maxCoeff();
    if (ortho > kSpectralTol) throw std::runtime_error("eigendecompose: eigenvectors not orthonormal within 1e-10");
    return s;
}

}  // namespace qps
