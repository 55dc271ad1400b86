#include "qps/flow.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qps {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Vector rotate_eigenphases(const Spectrum& s, const Vector& coeffs, double t) {
    Vector c = coeffs;
    for (Eigen::Index k = 0; k < c.size(); ++k)
        c(k) *= std::polar(1.0, s.eigenvalues(k) * t);
    return s.eigenvectors * c;
}

}  // namespace

int Trajectory::dim() const {
    if (states.empty()) throw std::logic_error("Trajectory::dim: empty trajectory");
    return states.front().dim();
}

double Trajectory::max_energy_drift() const {
    if (energies.empty()) return 0.0;
    double worst = 0.0;
    for (double e : energies) worst = std::max(worst, std::abs(e - energies.front()));
    return worst;
}

PureState evolve_exact_state(const HermitianObservable& H, const PureState& x0, double t) {
    if (H.dim() != x0.dim()) throw std::invalid_argument("evolve_exact_state: dimension mismatch");
    const Spectrum& s = H.spectrum();
    const Vector coeffs = s.eigenvectors.adjoint() * x0.amplitudes();
    return PureState(rotate_eigenphases(s, coeffs, t));
}

Trajectory evolve_exact(const HermitianObservable& H, const PureState& x0, const std::vector<double>& times) {
    if (H.dim() != x0.dim()) throw std::invalid_argument("evolve_exact: dimension mismatch");
    if (times.empty()) throw std::invalid_argument("evolve_exact: need at least one sample time");
    const Spectrum& s = H.spectrum();
    const Vector coeffs = s.eigenvectors.adjoint() * x0.amplitudes();
    Trajectory traj;
    traj.times = times;
    traj.states.reserve(times.size());
    traj.energies.reserve(times.size());
    for (double t : times) {
        PureState x(rotate_eigenphases(s, coeffs, t));
        traj.energies.push_back(expectation(H, x));
        traj.states.push_back(std::move(x));
    }
    return traj;
}

Trajectory evolve_numeric(const HermitianObservable& H, const PureState& x0, double t, double dt) {
    if (H.dim() != x0.dim()) throw std::invalid_argument("evolve_numeric: dimension mismatch");
    if (!(dt > 0)) throw std::invalid_argument("evolve_numeric: step must be positive");
    if (!(t > 0)) throw std::invalid_argument("evolve_numeric: horizon must be positive");

    const Matrix iH = Complex(0, 1) * H.matrix();
    Vector z = x0.amplitudes();

    Trajectory traj;
    const auto steps = static_cast<std::size_t>(std::ceil(t / dt - 1e-12));
    traj.times.reserve(steps + 1);
    traj.states.reserve(steps + 1);
    traj.energies.reserve(steps + 1);

    auto record = [&](double time, const Vector& amp) {
        PureState x(amp);
        traj.times.push_back(time);
        traj.energies.push_back(expectation(H, x));
        traj.states.push_back(std::move(x));
    };
    record(0.0, z);

    double now = 0.0;
    Vector k1(z.size()), k2(z.size()), k3(z.size()), k4(z.size());
    for (std::size_t i = 1; i <= steps; ++i) {
        const double target = (i == steps) ? t : dt * static_cast<double>(i);
        const double step = target - now;
        k1 = iH * z;
        k2 = iH * (z + 0.5 * step * k1);
        k3 = iH * (z + 0.5 * step * k2);
        k4 = iH * (z + step * k3);
        z += (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        z /= z.norm();
        now = target;
        record(now, z);
    }
    return traj;
}

double phase_speed(const HermitianObservable& H, const PureState& x) {
    return 2.0 * std::sqrt(observable_variance(H, x));
}

double isometry_drift(const HermitianObservable& H, const PureState& a, const PureState& b,
                      const std::vector<double>& times) {
    const double d0 = fs_angle(a, b);
    double worst = 0.0;
    for (double t : times) {
        const double d = fs_angle(evolve_exact_state(H, a, t), evolve_exact_state(H, b, t));
        worst = std::max(worst, std::abs(d - d0));
    }
    return worst;
}

OverlapDrift overlap_invariants(const HermitianObservable& H, const Trajectory& traj) {
    if (traj.states.empty()) throw std::invalid_argument("overlap_invariants: empty trajectory");
    if (H.dim() != traj.dim()) throw std::invalid_argument("overlap_invariants: dimension mismatch");
    const int d = H.dim();
    OverlapDrift out;
    out.initial.resize(d);
    out.max_drift = RealVector::Zero(d);
    for (int k = 0; k < d; ++k) {
        const PureState yk = H.spectrum().eigenstate(k);
        out.initial(k) = transition_probability(yk, traj.states.front());
        for (const PureState& x : traj.states)
            out.max_drift(k) = std::max(out.max_drift(k), std::abs(transition_probability(yk, x) - out.initial(k)));
    }
    return out;
}

double max_phase_gap(std::vector<double> angles) {
    if (angles.size() < 2) throw std::invalid_argument("max_phase_gap: need at least two angles");
    for (double& a : angles) {
        a = std::fmod(a, kTwoPi);
        if (a < 0) a += kTwoPi;
    }
    std::sort(angles.begin(), angles.end());
    double gap = angles.front() + kTwoPi - angles.back();
    for (std::size_t i = 1; i < angles.size(); ++i) gap = std::max(gap, angles[i] - angles[i - 1]);
    return gap;
}

RealVector relative_phases(const HermitianObservable& H, const PureState& x) {
    const Vector coeffs = H.spectrum().eigenvectors.adjoint() * x.amplitudes();
    for (Eigen::Index k = 0; k < coeffs.size(); ++k)
        if (std::abs(coeffs(k)) < 1e-12)
            throw std::invalid_argument("relative_phases: state has (numerically) no support on eigenstate " +
                                        std::to_string(k));
    RealVector ph(coeffs.size() - 1);
    const double base = std::arg(coeffs(0));
    for (Eigen::Index k = 1; k < coeffs.size(); ++k) {
        double a = std::arg(coeffs(k)) - base;
        a = std::fmod(a, kTwoPi);
        if (a < 0) a += kTwoPi;
        ph(k - 1) = a;
    }
    return ph;
}

double min_pairwise_torus_gap(const std::vector<RealVector>& points) {
    if (points.size() < 2) throw std::invalid_argument("min_pairwise_torus_gap: need at least two points");
    double best = kTwoPi;
    for (std::size_t i = 0; i < points.size(); ++i) {
        for (std::size_t j = i + 1; j < points.size(); ++j) {
            double d = 0.0;
            for (Eigen::Index k = 0; k < points[i].size(); ++k) {
                double a = std::abs(points[i](k) - points[j](k));
                a = std::fmod(a, kTwoPi);
                d = std::max(d, std::min(a, kTwoPi - a));
                if (d >= best) break;
            }
            best = std::min(best, d);
        }
    }
    return best;
}

}  // namespace qps
