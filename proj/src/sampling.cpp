#include "qps/sampling.hpp"

#include <atomic>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace qps {

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

std::uint64_t chunk_seed(std::uint64_t seed, int chunk) {
    return mix64(seed + 0x9e3779b97f4a7c15ull * static_cast<std::uint64_t>(chunk + 1));
}

std::int64_t chunk_count(std::int64_t count, int chunks, int c) {
    if (chunks < 1 || c < 0 || c >= chunks) throw std::invalid_argument("chunk_count: bad chunk index");
    const std::int64_t base = count / chunks;
    return base + (c < count % chunks ? 1 : 0);
}

double NormalStream::uniform01() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
}

double NormalStream::next() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();   // log(0) guard; probability 2^-53
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
}

void NormalStream::fill_state(Vector& out) {
    double norm2 = 0.0;
    for (Eigen::Index i = 0; i < out.size(); ++i) {
        const double re = next();
        const double im = next();
        out(i) = Complex(re, im);
        norm2 += re * re + im * im;
    }
    if (norm2 <= 0.0) {   // astronomically unlikely; resample
        fill_state(out);
        return;
    }
    out /= std::sqrt(norm2);
}

std::vector<PureState> sample_fs_uniform(int dim, std::int64_t count, std::uint64_t seed, int chunks) {
    if (dim < 2) throw std::invalid_argument("sample_fs_uniform: dimension must be >= 2");
    if (count < 1) throw std::invalid_argument("sample_fs_uniform: count must be positive");
    if (chunks < 1) throw std::invalid_argument("sample_fs_uniform: chunks must be >= 1");
    std::vector<PureState> out;
    out.reserve(static_cast<std::size_t>(count));
    Vector z(dim);
    for (int c = 0; c < chunks; ++c) {
        NormalStream rng(chunk_seed(seed, c));
        const std::int64_t n = chunk_count(count, chunks, c);
        for (std::int64_t i = 0; i < n; ++i) {
            rng.fill_state(z);
            out.emplace_back(z);
        }
    }
    return out;
}

void run_chunks(int chunks, int workers, const std::function<void(int)>& body) {
    if (chunks < 1) throw std::invalid_argument("run_chunks: chunks must be >= 1");
    if (workers <= 1 || chunks == 1) {
        for (int c = 0; c < chunks; ++c) body(c);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    const int n = std::min(workers, chunks);
    pool.reserve(n);
    for (int w = 0; w < n; ++w)
        pool.emplace_back([&] {
            for (int c = next.fetch_add(1); c < chunks; c = next.fetch_add(1)) body(c);
        });
    for (auto& t : pool) t.join();
}

}  // namespace qps
