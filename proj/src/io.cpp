#include "qps/io.hpp"

#include "json.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qps {

namespace {

using OrderedJson = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& source, int line, const std::string& what) {
    throw std::invalid_argument(source + ":" + std::to_string(line) + ": " + what);
}

bool next_line(std::istream& in, std::string& line) {
    if (!std::getline(in, line)) return false;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
}

std::vector<std::string> split_ws(const std::string& line) {
    std::istringstream ss(line);
    std::vector<std::string> out;
    for (std::string tok; ss >> tok;) out.push_back(tok);
    return out;
}

double parse_real(const std::string& tok, const std::string& source, int line) {
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(tok, &used);
    } catch (const std::exception&) {
        fail(source, line, "not a number: '" + tok + "'");
    }
    if (used != tok.size()) fail(source, line, "trailing characters in number '" + tok + "'");
    return v;
}

Complex parse_entry(const std::string& tok, const std::string& source, int line) {
    const std::size_t comma = tok.find(',');
    if (comma == std::string::npos || tok.find(',', comma + 1) != std::string::npos)
        fail(source, line, "matrix entries are written re,im; got '" + tok + "'");
    return {parse_real(tok.substr(0, comma), source, line), parse_real(tok.substr(comma + 1), source, line)};
}

void reject_trailing(std::istream& in, const std::string& source, int line) {
    for (std::string extra; next_line(in, extra); ++line)
        if (!split_ws(extra).empty()) fail(source, line, "unexpected content after the matrix");
}

OrderedJson complex_matrix_json(const Matrix& m) {
    OrderedJson rows = OrderedJson::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        OrderedJson row = OrderedJson::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
        rows.push_back(std::move(row));
    }
    return rows;
}

OrderedJson real_matrix_json(const RealMatrix& m) {
    OrderedJson rows = OrderedJson::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        OrderedJson row = OrderedJson::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

OrderedJson populations_json(const Matrix& rho) {
    OrderedJson out = OrderedJson::array();
    for (Eigen::Index k = 0; k < rho.rows(); ++k) out.push_back(rho(k, k).real());
    return out;
}

}  // namespace

HermitianObservable parse_hamiltonian(std::istream& in, const std::string& source) {
    std::string line;
    if (!next_line(in, line)) fail(source, 1, "empty file");
    const std::vector<std::string> head = split_ws(line);
    if (head.size() != 1) fail(source, 1, "expected a dimension or the word 'spectrum'");

    if (head[0] == "spectrum") {
        if (!next_line(in, line)) fail(source, 2, "missing eigenvalue line");
        const std::vector<std::string> toks = split_ws(line);
        if (toks.size() < 2) fail(source, 2, "need at least two eigenvalues");
        RealVector levels(static_cast<Eigen::Index>(toks.size()));
        for (std::size_t k = 0; k < toks.size(); ++k)
            levels(static_cast<Eigen::Index>(k)) = parse_real(toks[k], source, 2);
        reject_trailing(in, source, 3);
        return HermitianObservable::diagonal(levels);
    }

    int n = 0;
    try {
        std::size_t used = 0;
        n = std::stoi(head[0], &used);
        if (used != head[0].size()) n = 0;
    } catch (const std::exception&) {
        n = 0;
    }
    if (n < 2) fail(source, 1, "dimension must be an integer >= 2; got '" + head[0] + "'");

    Matrix m(n, n);
    for (int r = 0; r < n; ++r) {
        const int lineno = r + 2;
        if (!next_line(in, line)) fail(source, lineno, "missing matrix row " + std::to_string(r + 1));
        const std::vector<std::string> toks = split_ws(line);
        if (static_cast<int>(toks.size()) != n)
            fail(source, lineno,
                 "expected " + std::to_string(n) + " entries, got " + std::to_string(toks.size()));
        for (int c = 0; c < n; ++c) m(r, c) = parse_entry(toks[static_cast<std::size_t>(c)], source, lineno);
    }
    reject_trailing(in, source, n + 2);

    try {
        return HermitianObservable(std::move(m));
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(source + ": " + e.what());
    }
}

HermitianObservable read_hamiltonian(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open '" + path + "'");
    return parse_hamiltonian(in, path);
}

std::string format_sig(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", x);
    return buf;
}

std::string trajectory_csv(const Trajectory& traj) {
    const int n = traj.dim();
    std::string out = "t";
    for (int k = 0; k < n; ++k) {
        out += ",re" + std::to_string(k);
        out += ",im" + std::to_string(k);
    }
    out += ",energy\n";
    for (std::size_t i = 0; i < traj.size(); ++i) {
        out += format_sig(traj.times[i]);
        const Vector& z = traj.states[i].amplitudes();
        for (int k = 0; k < n; ++k) {
            out += ',';
            out += format_sig(z(k).real());
            out += ',';
            out += format_sig(z(k).imag());
        }
        out += ',';
        out += format_sig(traj.energies[i]);
        out += '\n';
    }
    return out;
}

std::string density_csv(const EnergyDensity& d) {
    std::string out = "energy,density,std_error\n";
    for (int j = 0; j < d.size(); ++j) {
        out += format_sig(d.grid(j));
        out += ',';
        out += format_sig(d.density(j));
        out += ',';
        out += format_sig(d.std_error(j));
        out += '\n';
    }
    return out;
}

std::string estimate_json(const EstimateReport& r) {
    OrderedJson j;
    j["ensemble"] = r.ensemble;
    j["dim"] = r.dim;
    if (r.beta) j["beta"] = *r.beta;
    if (r.target_energy) j["target_energy"] = *r.target_energy;
    if (r.partition) {
        j["partition"] = {{"value", r.partition->value}, {"std_error", r.partition->std_error}};
    }
    if (r.estimate) {
        j["density_matrix"] = complex_matrix_json(r.estimate->matrix.matrix());
        j["density_matrix_std_error"] = real_matrix_json(r.estimate->raw.std_error);
        j["populations"] = populations_json(r.estimate->matrix.matrix());
        j["energy"] = {{"value", r.estimate->energy.value}, {"std_error", r.estimate->energy.std_error}};
        j["ess"] = r.estimate->ess;
    }
    if (r.exact) {
        j["density_matrix"] = complex_matrix_json(r.exact->matrix());
        j["populations"] = populations_json(r.exact->matrix());
        if (r.exact_energy) j["energy"] = *r.exact_energy;
    }
    if (r.mc) {
        j["mc"] = {{"samples", r.mc->samples}, {"seed", r.mc->seed}, {"chunks", r.mc->chunks}};
    }
    return j.dump(2) + "\n";
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot open '" + path + "' for writing");
    out << content;
    out.flush();
    if (!out) throw std::invalid_argument("write to '" + path + "' failed");
}

}  // namespace qps
