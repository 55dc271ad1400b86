#pragma once

#include "qps/geometry.hpp"

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace qps {

// one SplitMix64 round; used to turn (seed, chunk) into stream seeds
std::uint64_t mix64(std::uint64_t x);
std::uint64_t chunk_seed(std::uint64_t seed, int chunk);

// samples assigned to chunk c out of `chunks`: count/chunks plus one of the
// remainder; sizes depend only on (count, chunks), never on thread timing
std::int64_t chunk_count(std::int64_t count, int chunks, int c);

// Standard normal stream over mt19937_64 via Box-Muller on 53-bit uniforms.
// std::normal_distribution's algorithm is implementation-defined, and the
// reproducibility contract (same seed -> same bits) should not hang on
// library internals, so the transform is spelled out here.
class NormalStream {
  public:
    explicit NormalStream(std::uint64_t seed) : eng_(seed) {}

    double next();

    // fills out (already sized to the state dimension) with 2*dim standard
    // normals as re/im parts and normalizes; this lands uniformly on the
    // unit sphere and hence projects to the isometry-invariant measure
    void fill_state(Vector& out);

  private:
    double uniform01();   // [0, 1), 53-bit
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// `count` states of dimension `dim`, drawn from the isometry-invariant
// measure, split into `chunks` independent streams keyed by (seed, chunk) and
// concatenated in chunk order: the output is a pure function of
// (dim, count, seed, chunks)
std::vector<PureState> sample_fs_uniform(int dim, std::int64_t count, std::uint64_t seed, int chunks);

// Runs body(c) for every chunk index; with workers > 1 the chunks run on a
// small thread pool. Results must be written to per-chunk slots and folded in
// chunk order by the caller, which keeps parallel and serial runs identical.
void run_chunks(int chunks, int workers, const std::function<void(int)>& body);

}  // namespace qps
