#include "qps/ensembles.hpp"

#include "qps/sampling.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>

namespace qps {

namespace {

constexpr double kEssFloor = 100.0;
constexpr std::int64_t kShellFloor = 100;

double energy_of(const Matrix& m, const Vector& z, Vector& work) {
    work.noalias() = m * z;
    Complex acc(0, 0);
    for (Eigen::Index i = 0; i < z.size(); ++i) acc += std::conj(z(i)) * work(i);
    return acc.real();
}

// exponent shift that keeps canonical weights in (0, 1]
double weight_shift(const Spectrum& s, double beta) { return beta >= 0 ? s.min() : s.max(); }

void check_shift(double beta, double shift) {
    if (std::abs(beta * shift) > 700.0)
        throw NumericalGuard("canonical weights overflow double range; rescale the spectrum");
}

}  // namespace

double cpn_volume(int dim) {
    if (dim < 2) throw std::invalid_argument("cpn_volume: dimension must be >= 2");
    double v = 1.0;
    for (int k = 1; k <= dim - 1; ++k) v *= 4.0 * std::numbers::pi / k;
    return v;
}

void McParams::validate() const {
    if (samples < 1000) throw std::invalid_argument("McParams: need at least 1000 samples");
    if (chunks < 1) throw std::invalid_argument("McParams: chunks must be >= 1");
    if (workers < 1) throw std::invalid_argument("McParams: workers must be >= 1");
    if (shell_width && !(*shell_width > 0)) throw std::invalid_argument("McParams: shell width must be positive");
    if (bandwidth && !(*bandwidth > 0)) throw std::invalid_argument("McParams: bandwidth must be positive");
}

double McParams::shell_or_default(double range) const {
    if (shell_width) return *shell_width;
    if (!(range > 0)) throw std::invalid_argument("McParams: cannot derive a shell width from a flat spectrum");
    return 0.01 * range;
}

double McParams::bandwidth_or_default(double range) const {
    if (bandwidth) return *bandwidth;
    if (!(range > 0)) throw std::invalid_argument("McParams: cannot derive a bandwidth from a flat spectrum");
    return 0.02 * range;
}

double EnergyDensity::spacing() const {
    if (grid.size() < 2) throw std::invalid_argument("EnergyDensity: need at least two grid points");
    return grid(1) - grid(0);
}

void EnergyDensity::validate() const {
    if (grid.size() < 2 || grid.size() != density.size())
        throw std::invalid_argument("EnergyDensity: grid and density sizes must match (>= 2)");
    if (std_error.size() != 0 && std_error.size() != grid.size())
        throw std::invalid_argument("EnergyDensity: std_error must be empty or match the grid");
    const double d = spacing();
    if (!(d > 0)) throw std::invalid_argument("EnergyDensity: grid must be ascending");
    for (Eigen::Index i = 1; i < grid.size(); ++i)
        if (std::abs(grid(i) - grid(i - 1) - d) > 1e-9 * std::max(1.0, std::abs(d)))
            throw std::invalid_argument("EnergyDensity: grid spacing must be uniform");
    if (density.minCoeff() < 0) throw std::invalid_argument("EnergyDensity: density must be nonnegative");
}

double EnergyDensity::trapezoid() const {
    const double d = spacing();
    double acc = 0.5 * (density(0) + density(density.size() - 1));
    for (Eigen::Index i = 1; i + 1 < density.size(); ++i) acc += density(i);
    return acc * d;
}

double EnergyDensity::value_at(double e) const {
    const double d = spacing();
    if (e < grid(0) || e > grid(grid.size() - 1)) return 0.0;
    const double pos = (e - grid(0)) / d;
    const auto i = std::min<Eigen::Index>(static_cast<Eigen::Index>(pos), grid.size() - 2);
    const double t = pos - static_cast<double>(i);
    return (1.0 - t) * density(i) + t * density(i + 1);
}

EnergyDensity EnergyDensity::normalized() const {
    const double total = trapezoid();
    if (!(total > 0)) throw NumericalGuard("EnergyDensity::normalized: vanishing integral");
    EnergyDensity out = *this;
    out.density /= total;
    if (out.std_error.size()) out.std_error /= total;
    return out;
}

double simplex_exp_moment(const RealVector& levels, double beta) {
    const int n1 = static_cast<int>(levels.size());
    if (n1 < 2) throw std::invalid_argument("simplex_exp_moment: need at least two levels");
    std::vector<double> e(levels.data(), levels.data() + n1);
    std::sort(e.begin(), e.end());
    const double spread = e.back() - e.front();
    const double scale = std::max({1.0, std::abs(e.front()), std::abs(e.back())});
    for (int i = 0; i + 1 < n1; ++i)
        if (e[i + 1] - e[i] <= 1e-12 * scale)
            throw NumericalGuard("simplex_exp_moment: levels must be nondegenerate");

    if (std::abs(beta) * spread <= 1.0) {
        // the partial-fraction form below cancels like (beta * gap)^(1 - n)
        // near beta = 0, so expand instead: the m-th moment of the energy
        // over the uniform simplex is (n-1)! h_m / (n-1+m)! with h_m the
        // complete homogeneous symmetric polynomial of the shifted levels
        const double base = e.front();
        check_shift(beta, base);
        constexpr int kMaxTerms = 60;
        std::array<double, kMaxTerms + 1> p{}, h{};
        for (double v : e) {
            double cur = 1.0;
            for (int i = 1; i <= kMaxTerms; ++i) {
                cur *= v - base;
                p[static_cast<std::size_t>(i)] += cur;
            }
        }
        h[0] = 1.0;
        for (int m = 1; m <= kMaxTerms; ++m) {
            double s = 0.0;
            for (int i = 1; i <= m; ++i) s += p[static_cast<std::size_t>(i)] * h[static_cast<std::size_t>(m - i)];
            h[static_cast<std::size_t>(m)] = s / m;
        }
        double acc = 1.0, coef = 1.0;
        for (int m = 1; m <= kMaxTerms; ++m) {
            coef *= -beta / (n1 - 1 + m);
            const double term = coef * h[static_cast<std::size_t>(m)];
            acc += term;
            if (std::abs(term) <= 1e-18 * std::abs(acc)) break;
        }
        return std::exp(-beta * base) * acc;
    }

    const double shift = beta >= 0 ? e.front() : e.back();
    check_shift(beta, shift);
    double total = 0.0;
    for (int k = 0; k < n1; ++k) {
        double denom = 1.0;
        for (int j = 0; j < n1; ++j)
            if (j != k) denom *= beta * (e[j] - e[k]);
        total += std::exp(-beta * (e[k] - shift)) / denom;
    }
    double fact = 1.0;
    for (int k = 2; k <= n1 - 1; ++k) fact *= k;
    return fact * total * std::exp(-beta * shift);
}

// ---- chunked sweeps ----

namespace {

// one pass over the sample stream; Acc must be default-constructible with
// resize(dim) and fold(other), and fill(acc, z, h) consumes one state
template <class Acc, class Fill>
Acc sweep(const HermitianObservable& H, const McParams& mc, Fill&& fill) {
    std::vector<Acc> parts(static_cast<std::size_t>(mc.chunks));
    const Matrix& m = H.matrix();
    const int dim = H.dim();
    run_chunks(mc.chunks, mc.workers, [&](int c) {
        Acc& acc = parts[static_cast<std::size_t>(c)];
        acc.resize(dim);
        NormalStream rng(chunk_seed(mc.seed, c));
        const std::int64_t n = chunk_count(mc.samples, mc.chunks, c);
        Vector z(dim), work(dim);
        for (std::int64_t i = 0; i < n; ++i) {
            rng.fill_state(z);
            fill(acc, z, energy_of(m, z, work));
        }
    });
    Acc total;
    total.resize(dim);
    for (const Acc& p : parts) total.fold(p);
    return total;
}

struct ScalarAcc {
    double sum = 0, sum2 = 0;
    void resize(int) {}
    void fold(const ScalarAcc& o) {
        sum += o.sum;
        sum2 += o.sum2;
    }
    void add(double u) {
        sum += u;
        sum2 += u * u;
    }
};

// weighted projector moments; carries everything the self-normalized ratio
// estimator needs for values and per-entry standard errors
struct ProjectorAcc {
    double w = 0, w2 = 0;
    double wh = 0, w2h = 0, w2h2 = 0;
    Matrix wp, w2p;
    RealMatrix w2re2, w2im2;

    void resize(int d) {
        wp = Matrix::Zero(d, d);
        w2p = Matrix::Zero(d, d);
        w2re2 = RealMatrix::Zero(d, d);
        w2im2 = RealMatrix::Zero(d, d);
    }
    void fold(const ProjectorAcc& o) {
        w += o.w;
        w2 += o.w2;
        wh += o.wh;
        w2h += o.w2h;
        w2h2 += o.w2h2;
        wp += o.wp;
        w2p += o.w2p;
        w2re2 += o.w2re2;
        w2im2 += o.w2im2;
    }
    void add(double weight, const Vector& z, double h) {
        const double weight2 = weight * weight;
        w += weight;
        w2 += weight2;
        wh += weight * h;
        w2h += weight2 * h;
        w2h2 += weight2 * h * h;
        for (Eigen::Index r = 0; r < z.size(); ++r)
            for (Eigen::Index c = 0; c < z.size(); ++c) {
                const Complex p = z(r) * std::conj(z(c));
                wp(r, c) += weight * p;
                w2p(r, c) += weight2 * p;
                w2re2(r, c) += weight2 * p.real() * p.real();
                w2im2(r, c) += weight2 * p.imag() * p.imag();
            }
    }
};

// linearized variance of the ratio estimator sum(w a)/sum(w):
//   sum w^2 (a - mu)^2 / W^2, assembled from the raw moments
double ratio_se(double mean, double m_w2a2, double m_w2a, double w, double w2) {
    const double var = std::max(0.0, m_w2a2 - 2.0 * mean * m_w2a + mean * mean * w2);
    return std::sqrt(var) / w;
}

DensityMatrixEstimate assemble(const HermitianObservable& H, const ProjectorAcc& acc, std::int64_t used,
                               const McParams& mc) {
    if (!(acc.w > 0)) throw NumericalGuard("density estimator: total weight vanished");
    const int d = H.dim();
    MatrixEstimate raw;
    raw.value = acc.wp / acc.w;
    raw.std_error.resize(d, d);
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) {
            const Complex mu = raw.value(r, c);
            const double se_re = ratio_se(mu.real(), acc.w2re2(r, c), acc.w2p(r, c).real(), acc.w, acc.w2);
            const double se_im = ratio_se(mu.imag(), acc.w2im2(r, c), acc.w2p(r, c).imag(), acc.w, acc.w2);
            raw.std_error(r, c) = std::hypot(se_re, se_im);
        }
    raw.samples_used = used;
    raw.seed = mc.seed;
    raw.chunks = mc.chunks;

    DensityMatrixEstimate out{DensityMatrix::project(raw.value), std::move(raw), {}, 0.0};
    out.ess = acc.w * acc.w / acc.w2;
    out.energy.value = acc.wh / acc.w;
    out.energy.std_error = ratio_se(out.energy.value, acc.w2h2, acc.w2h, acc.w, acc.w2);
    out.energy.samples_used = used;
    out.energy.seed = mc.seed;
    out.energy.chunks = mc.chunks;
    return out;
}

}  // namespace

ScalarEstimate canonical_partition(const HermitianObservable& H, double beta, const McParams& mc) {
    mc.validate();
    const double shift = weight_shift(H.spectrum(), beta);
    check_shift(beta, shift);
    const auto acc = sweep<ScalarAcc>(H, mc, [&](ScalarAcc& a, const Vector&, double h) {
        a.add(std::exp(-beta * (h - shift)));
    });
    const double n = static_cast<double>(mc.samples);
    const double mean = acc.sum / n;
    const double var = std::max(0.0, acc.sum2 / n - mean * mean);
    const double factor = cpn_volume(H.dim()) * std::exp(-beta * shift);
    return {factor * mean, factor * std::sqrt(var / n), mc.samples, mc.seed, mc.chunks};
}

DensityMatrixEstimate canonical_density_matrix(const HermitianObservable& H, double beta, const McParams& mc) {
    mc.validate();
    const double shift = weight_shift(H.spectrum(), beta);
    check_shift(beta, shift);
    const auto acc = sweep<ProjectorAcc>(H, mc, [&](ProjectorAcc& a, const Vector& z, double h) {
        a.add(std::exp(-beta * (h - shift)), z, h);
    });
    auto out = assemble(H, acc, mc.samples, mc);
    if (out.ess < kEssFloor)
        throw NumericalGuard("canonical_density_matrix: weight ESS " + std::to_string(out.ess) +
                             " below floor 100; reduce |beta| or add samples");
    return out;
}

DensityMatrix conventional_gibbs_dm(const HermitianObservable& H, double beta) {
    const Spectrum& s = H.spectrum();
    const double shift = beta >= 0 ? s.min() : s.max();
    check_shift(beta, shift);
    RealVector p(s.dim());
    for (int k = 0; k < s.dim(); ++k) p(k) = std::exp(-beta * (s.eigenvalues(k) - shift));
    p /= p.sum();
    Matrix rho = Matrix::Zero(s.dim(), s.dim());
    for (int k = 0; k < s.dim(); ++k)
        rho += p(k) * (s.eigenvectors.col(k) * s.eigenvectors.col(k).adjoint());
    return DensityMatrix::project(rho);
}

ScalarEstimate state_density(const HermitianObservable& H, double energy, const McParams& mc) {
    mc.validate();
    const Spectrum& s = H.spectrum();
    if (energy < s.min() || energy > s.max()) return {0.0, 0.0, 0, mc.seed, mc.chunks};
    const double bw = mc.bandwidth_or_default(s.range());
    const double inv = 1.0 / bw;
    const auto acc = sweep<ScalarAcc>(H, mc, [&](ScalarAcc& a, const Vector&, double h) {
        const double u = (h - energy) * inv;
        if (u > -1.0 && u < 1.0) a.add(0.75 * (1.0 - u * u) * inv);
    });
    const double n = static_cast<double>(mc.samples);
    const double mean = acc.sum / n;
    const double var = std::max(0.0, acc.sum2 / n - mean * mean);
    const double v = cpn_volume(H.dim());
    return {v * mean, v * std::sqrt(var / n), mc.samples, mc.seed, mc.chunks};
}

ScalarEstimate volume_below(const HermitianObservable& H, double energy, const McParams& mc) {
    mc.validate();
    const auto acc = sweep<ScalarAcc>(H, mc, [&](ScalarAcc& a, const Vector&, double h) {
        if (h <= energy) a.add(1.0);
    });
    const double n = static_cast<double>(mc.samples);
    const double frac = acc.sum / n;
    const double v = cpn_volume(H.dim());
    return {v * frac, v * std::sqrt(std::max(0.0, frac * (1.0 - frac)) / n), mc.samples, mc.seed, mc.chunks};
}

DensityMatrixEstimate microcanonical_dm(const HermitianObservable& H, double energy, const McParams& mc) {
    mc.validate();
    const Spectrum& s = H.spectrum();
    const double w = mc.shell_or_default(s.range());
    const double lo = energy - 0.5 * w;
    const double hi = energy + 0.5 * w;
    const auto acc = sweep<ProjectorAcc>(H, mc, [&](ProjectorAcc& a, const Vector& z, double h) {
        if (h >= lo && h <= hi) a.add(1.0, z, h);
    });
    const auto used = static_cast<std::int64_t>(acc.w + 0.5);
    if (used < kShellFloor)
        throw NumericalGuard("microcanonical_dm: shell caught " + std::to_string(used) +
                             " samples (< 100); widen the shell or add samples");
    return assemble(H, acc, used, mc);
}

DensityMatrixEstimate microcanonical_dm_via_volume(const HermitianObservable& H, double energy, double h_step,
                                                   const McParams& mc) {
    mc.validate();
    if (!(h_step > 0)) throw std::invalid_argument("microcanonical_dm_via_volume: step must be positive");
    const Spectrum& s = H.spectrum();
    if (energy <= s.min() || energy >= s.max())
        throw NumericalGuard("microcanonical_dm_via_volume: energy must lie inside the spectral range");

    const int d = H.dim();
    // Hermitian perturbation directions: diagonal units, then for each pair
    // (r, c) the real and imaginary symmetric units; plus the uniform shift
    // as the normalizing direction. A sample's directional energy change is
    // the corresponding projector entry combination.
    const int ndir = d * d + 1;

    struct CountAcc {
        std::vector<std::int64_t> diff, flips;
        void resize(int dd) {
            diff.assign(static_cast<std::size_t>(dd * dd + 1), 0);
            flips.assign(static_cast<std::size_t>(dd * dd + 1), 0);
        }
        void fold(const CountAcc& o) {
            for (std::size_t i = 0; i < diff.size(); ++i) {
                diff[i] += o.diff[i];
                flips[i] += o.flips[i];
            }
        }
    };

    const double step = h_step;
    const auto acc = sweep<CountAcc>(H, mc, [&](CountAcc& a, const Vector& z, double h) {
        int idx = 0;
        auto tally = [&](double dval) {
            const bool up = h + step * dval <= energy;
            const bool down = h - step * dval <= energy;
            if (up != down) {
                a.diff[static_cast<std::size_t>(idx)] += up ? 1 : -1;
                ++a.flips[static_cast<std::size_t>(idx)];
            }
            ++idx;
        };
        for (int k = 0; k < d; ++k) tally(std::norm(z(k)));
        for (int r = 0; r < d; ++r)
            for (int c = r + 1; c < d; ++c) {
                const Complex p = z(r) * std::conj(z(c));
                tally(2.0 * p.real());
                tally(2.0 * p.imag());
            }
        tally(1.0);
    });

    const double n = static_cast<double>(mc.samples);
    const double v = cpn_volume(d);
    std::vector<double> grad(static_cast<std::size_t>(ndir)), gse(static_cast<std::size_t>(ndir));
    for (int i = 0; i < ndir; ++i) {
        const double diff = static_cast<double>(acc.diff[static_cast<std::size_t>(i)]);
        // each flipped sample contributes +-1; the flip count bounds the variance
        const double flips = static_cast<double>(acc.flips[static_cast<std::size_t>(i)]) + 1.0;
        grad[static_cast<std::size_t>(i)] = v * diff / (n * 2.0 * step);
        gse[static_cast<std::size_t>(i)] = v * std::sqrt(flips) / (n * 2.0 * step);
    }

    const double denom = grad[static_cast<std::size_t>(ndir - 1)];
    const double denom_se = gse[static_cast<std::size_t>(ndir - 1)];
    if (std::abs(denom) < 10.0 * denom_se || denom == 0.0)
        throw NumericalGuard("microcanonical_dm_via_volume: shift derivative indistinguishable from zero");

    Matrix g = Matrix::Zero(d, d);
    RealMatrix gse_m = RealMatrix::Zero(d, d);
    int idx = 0;
    for (int k = 0; k < d; ++k) {
        g(k, k) = grad[static_cast<std::size_t>(idx)];
        gse_m(k, k) = gse[static_cast<std::size_t>(idx)];
        ++idx;
    }
    for (int r = 0; r < d; ++r)
        for (int c = r + 1; c < d; ++c) {
            const double re = 0.5 * grad[static_cast<std::size_t>(idx)];
            const double se_re = 0.5 * gse[static_cast<std::size_t>(idx)];
            ++idx;
            const double im = 0.5 * grad[static_cast<std::size_t>(idx)];
            const double se_im = 0.5 * gse[static_cast<std::size_t>(idx)];
            ++idx;
            g(r, c) = Complex(re, im);
            g(c, r) = Complex(re, -im);
            gse_m(r, c) = gse_m(c, r) = std::hypot(se_re, se_im);
        }

    MatrixEstimate raw;
    raw.value = g / denom;
    raw.std_error.resize(d, d);
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) {
            const double a = gse_m(r, c) / std::abs(denom);
            const double b = std::abs(raw.value(r, c)) * denom_se / std::abs(denom);
            raw.std_error(r, c) = std::hypot(a, b);
        }
    raw.samples_used = mc.samples;
    raw.seed = mc.seed;
    raw.chunks = mc.chunks;

    DensityMatrixEstimate out{DensityMatrix::project(raw.value), std::move(raw), {}, 0.0};
    out.ess = static_cast<double>(mc.samples);
    const Matrix& hm = H.matrix();
    out.energy.value = (hm * out.matrix.matrix()).trace().real();
    double acc_se = 0.0;
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) acc_se += std::norm(hm(r, c)) * out.raw.std_error(c, r) * out.raw.std_error(c, r);
    out.energy.std_error = std::sqrt(acc_se);
    out.energy.samples_used = mc.samples;
    out.energy.seed = mc.seed;
    out.energy.chunks = mc.chunks;
    return out;
}

EnergyDensity canonical_energy_pdf(const HermitianObservable& H, double beta, const McParams& mc) {
    mc.validate();
    const Spectrum& s = H.spectrum();
    const double bw = mc.bandwidth_or_default(s.range());
    const double shift = weight_shift(s, beta);
    check_shift(beta, shift);

    const int points = 201;
    const double lo = s.min() - bw;
    const double hi = s.max() + bw;
    const double dg = (hi - lo) / (points - 1);
    const double inv = 1.0 / bw;

    struct KdeAcc {
        RealVector wk, w2k, w2k2;
        double w = 0, w2 = 0;
        void init(int pts) {
            wk = RealVector::Zero(pts);
            w2k = RealVector::Zero(pts);
            w2k2 = RealVector::Zero(pts);
        }
        void fold(const KdeAcc& o) {
            wk += o.wk;
            w2k += o.w2k;
            w2k2 += o.w2k2;
            w += o.w;
            w2 += o.w2;
        }
    };

    std::vector<KdeAcc> parts(static_cast<std::size_t>(mc.chunks));
    const Matrix& m = H.matrix();
    run_chunks(mc.chunks, mc.workers, [&](int c) {
        KdeAcc& acc = parts[static_cast<std::size_t>(c)];
        acc.init(points);
        NormalStream rng(chunk_seed(mc.seed, c));
        const std::int64_t n = chunk_count(mc.samples, mc.chunks, c);
        Vector z(H.dim()), work(H.dim());
        for (std::int64_t i = 0; i < n; ++i) {
            rng.fill_state(z);
            const double h = energy_of(m, z, work);
            const double weight = std::exp(-beta * (h - shift));
            acc.w += weight;
            acc.w2 += weight * weight;
            const auto jlo = std::max<Eigen::Index>(0, static_cast<Eigen::Index>(std::ceil((h - bw - lo) / dg)));
            const auto jhi =
                std::min<Eigen::Index>(points - 1, static_cast<Eigen::Index>(std::floor((h + bw - lo) / dg)));
            for (Eigen::Index j = jlo; j <= jhi; ++j) {
                const double u = (h - (lo + dg * static_cast<double>(j))) * inv;
                const double k = 0.75 * (1.0 - u * u) * inv;
                if (k <= 0) continue;
                acc.wk(j) += weight * k;
                acc.w2k(j) += weight * weight * k;
                acc.w2k2(j) += weight * weight * k * k;
            }
        }
    });
    KdeAcc total;
    total.init(points);
    for (const KdeAcc& p : parts) total.fold(p);
    if (!(total.w > 0)) throw NumericalGuard("canonical_energy_pdf: total weight vanished");

    EnergyDensity out;
    out.grid.setLinSpaced(points, lo, hi);
    out.density = total.wk / total.w;
    out.std_error.resize(points);
    for (int j = 0; j < points; ++j) {
        const double p = out.density(j);
        // linearized variance of the self-normalized ratio (sum w*k) / (sum w)
        const double var = std::max(0.0, total.w2k2(j) - 2.0 * p * total.w2k(j) + p * p * total.w2);
        out.std_error(j) = std::sqrt(var) / total.w;
    }
    return out.normalized();
}

EnergyDensity bath_composition(const EnergyDensity& omega1, const EnergyDensity& omega2) {
    omega1.validate();
    omega2.validate();
    const double d1 = omega1.spacing();
    const double d2 = omega2.spacing();
    if (std::abs(d1 - d2) > 1e-9 * std::max(d1, d2))
        throw std::invalid_argument("bath_composition: grids must share one spacing");
    const double d = d1;
    const Eigen::Index n1 = omega1.grid.size();
    const Eigen::Index n2 = omega2.grid.size();
    const bool carry_se = omega1.std_error.size() && omega2.std_error.size();

    EnergyDensity out;
    out.grid.setLinSpaced(n1 + n2 - 1, omega1.grid(0) + omega2.grid(0),
                          omega1.grid(n1 - 1) + omega2.grid(n2 - 1));
    out.density = RealVector::Zero(n1 + n2 - 1);
    out.std_error = RealVector::Zero(n1 + n2 - 1);
    for (Eigen::Index k = 0; k < out.grid.size(); ++k) {
        const Eigen::Index jlo = std::max<Eigen::Index>(0, k - (n1 - 1));
        const Eigen::Index jhi = std::min<Eigen::Index>(n2 - 1, k);
        if (jhi <= jlo) continue;   // zero-length overlap integrates to zero
        double acc = 0.0, accse = 0.0;
        for (Eigen::Index j = jlo; j <= jhi; ++j) {
            const double f1 = omega1.density(k - j);
            const double f2 = omega2.density(j);
            acc += f1 * f2;
            if (carry_se) {
                const double s1 = omega1.std_error(k - j);
                const double s2 = omega2.std_error(j);
                accse += f1 * f1 * s2 * s2 + s1 * s1 * f2 * f2;
            }
        }
        // trapezoid: half weight at the overlap ends
        acc -= 0.5 * (omega1.density(k - jlo) * omega2.density(jlo) + omega1.density(k - jhi) * omega2.density(jhi));
        out.density(k) = std::max(0.0, d * acc);
        if (carry_se) out.std_error(k) = d * std::sqrt(accse);
    }
    return out;
}

EnergyDensity conditional_subsystem_pdf(const EnergyDensity& omega1, const EnergyDensity& omega2, double e_total) {
    omega1.validate();
    omega2.validate();
    EnergyDensity out;
    out.grid = omega2.grid;
    out.density.resize(omega2.grid.size());
    out.std_error = RealVector::Zero(omega2.grid.size());
    for (Eigen::Index j = 0; j < omega2.grid.size(); ++j)
        out.density(j) = omega1.value_at(e_total - omega2.grid(j)) * omega2.density(j);
    if (!(out.density.maxCoeff() > 0))
        throw NumericalGuard("conditional_subsystem_pdf: total energy outside the composite support");
    return out.normalized();
}

double log_density_slope(const EnergyDensity& omega, double e) {
    omega.validate();
    const double d = omega.spacing();
    const auto i = static_cast<Eigen::Index>(std::llround((e - omega.grid(0)) / d));
    if (i < 1 || i + 1 >= omega.grid.size())
        throw std::invalid_argument("log_density_slope: point too close to the grid edge");
    const double lo = omega.density(i - 1);
    const double hi = omega.density(i + 1);
    if (!(lo > 0) || !(hi > 0)) throw NumericalGuard("log_density_slope: density vanishes near the point");
    return (std::log(hi) - std::log(lo)) / (2.0 * d);
}

std::vector<ThermoRow> thermodynamics(const HermitianObservable& H, const std::vector<double>& beta_grid,
                                      const McParams& mc) {
    if (beta_grid.size() < 3) throw std::invalid_argument("thermodynamics: need at least three grid points");
    for (std::size_t i = 0; i < beta_grid.size(); ++i) {
        if (!(beta_grid[i] > 0)) throw std::invalid_argument("thermodynamics: beta grid must be positive");
        if (i && !(beta_grid[i] > beta_grid[i - 1]))
            throw std::invalid_argument("thermodynamics: beta grid must be ascending");
        if (i && beta_grid[i] - beta_grid[i - 1] > 0.1 * beta_grid[i - 1])
            throw std::invalid_argument("thermodynamics: grid too coarse for stable differences (spacing > 0.1 beta)");
    }

    const double lnv = std::log(cpn_volume(H.dim()));
    std::function<double(double)> lnz;
    std::vector<double> energies;   // common-seed sample energies, degenerate path
    if (!H.spectrum().degenerate()) {
        const RealVector levels = H.spectrum().eigenvalues;
        lnz = [levels, lnv](double b) { return lnv + std::log(simplex_exp_moment(levels, b)); };
    } else {
        mc.validate();
        energies.reserve(static_cast<std::size_t>(mc.samples));
        const Matrix& m = H.matrix();
        Vector z(H.dim()), work(H.dim());
        for (int c = 0; c < mc.chunks; ++c) {
            NormalStream rng(chunk_seed(mc.seed, c));
            const std::int64_t n = chunk_count(mc.samples, mc.chunks, c);
            for (std::int64_t i = 0; i < n; ++i) {
                rng.fill_state(z);
                energies.push_back(energy_of(m, z, work));
            }
        }
        const double shift = H.spectrum().min();
        lnz = [&energies, shift, lnv](double b) {
            double acc = 0.0;
            for (double h : energies) acc += std::exp(-b * (h - shift));
            return lnv - b * shift + std::log(acc / static_cast<double>(energies.size()));
        };
    }

    std::vector<ThermoRow> table(beta_grid.size());
    for (std::size_t i = 0; i < beta_grid.size(); ++i) {
        const double b = beta_grid[i];
        const double d1 = 1e-4 * b;
        const double d2 = 1e-3 * b;
        ThermoRow& row = table[i];
        row.beta = b;
        const double l0 = lnz(b);
        row.z = std::exp(l0);
        row.energy = -(lnz(b + d1) - lnz(b - d1)) / (2.0 * d1);
        row.heat_capacity = b * b * (lnz(b + d2) - 2.0 * l0 + lnz(b - d2)) / (d2 * d2);
        row.entropy = l0 + b * row.energy;
    }
    for (std::size_t i = 0; i < table.size(); ++i) {
        const std::size_t a = i ? i - 1 : 0;
        const std::size_t z2 = i + 1 < table.size() ? i + 1 : i;
        const double de = table[z2].energy - table[a].energy;
        if (de == 0.0) throw NumericalGuard("thermodynamics: energy column is flat; cannot form dS/dE");
        table[i].beta_check = (table[z2].entropy - table[a].entropy) / de;
    }
    return table;
}

}  // namespace qps
