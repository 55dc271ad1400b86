#pragma once

#include "qps/ensembles.hpp"
#include "qps/flow.hpp"
#include "qps/geometry.hpp"

#include <iosfwd>
#include <optional>
#include <string>

namespace qps {

// Reads a Hermitian matrix from a plain-text file (LF newlines). Two layouts:
//
//   dense      line 1: the dimension n
//              lines 2..n+1: n entries per line, each written "re,im" and
//              separated by spaces
//
//   spectral   line 1: the word "spectrum"
//              line 2: space-separated eigenvalues, placed on the diagonal
//              in the standard basis
//
// Malformed input throws std::invalid_argument naming the offending line.
HermitianObservable read_hamiltonian(const std::string& path);
HermitianObservable parse_hamiltonian(std::istream& in, const std::string& source);

// value rendered at 9 significant digits
std::string format_sig(double x);

// "t,re0,im0,...,energy" rows, LF newlines
std::string trajectory_csv(const Trajectory& traj);

// "energy,density,std_error" rows, LF newlines
std::string density_csv(const EnergyDensity& d);

// One bag for everything an estimation run may want to report; fields that do
// not apply to the chosen ensemble stay unset and are omitted from the JSON.
struct EstimateReport {
    std::string ensemble;
    int dim = 0;
    std::optional<double> beta;
    std::optional<double> target_energy;
    std::optional<ScalarEstimate> partition;
    std::optional<DensityMatrixEstimate> estimate;
    std::optional<DensityMatrix> exact;
    std::optional<double> exact_energy;
    std::optional<McParams> mc;
};

// UTF-8, two-space indent, keys in fixed order, trailing newline. Complex
// matrices appear as row-major arrays of [re, im] pairs.
std::string estimate_json(const EstimateReport& report);

// creates or overwrites; throws std::invalid_argument when the path cannot
// be opened or the write fails
void write_text_file(const std::string& path, const std::string& content);

}  // namespace qps
