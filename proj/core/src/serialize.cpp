#include "wnlab/serialize.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace wnlab {

namespace {

std::string fmt(double x) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

const json& require(const json& j, const char* key, const std::string& pointer) {
    if (!j.is_object()) throw ConfigError(pointer.empty() ? "/" : pointer, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) throw ConfigError(pointer + "/" + key, "missing");
    return *it;
}

std::size_t dim_from(const json& j, const char* key, const std::string& pointer) {
    const json& d = require(j, key, pointer);
    if (!d.is_number_unsigned() || d.get<std::size_t>() == 0)
        throw ConfigError(pointer + "/" + key, "expected a positive integer");
    return d.get<std::size_t>();
}

double number_at(const json& j, const std::string& pointer) {
    if (!j.is_number()) throw ConfigError(pointer, "expected a number");
    const double x = j.get<double>();
    if (!std::isfinite(x)) throw ConfigError(pointer, "expected a finite number");
    return x;
}

void expect_array(const json& j, std::size_t n, const std::string& pointer) {
    if (!j.is_array() || j.size() != n)
        throw ConfigError(pointer, "expected an array of length " + std::to_string(n));
}

}  // namespace

json tensor_to_json(const Tensor3& t) {
    json out = json::array();
    for (std::size_t i = 0; i < t.dim(); ++i) {
        json mi = json::array();
        for (std::size_t j = 0; j < t.dim(); ++j) {
            json row = json::array();
            for (std::size_t k = 0; k < t.dim(); ++k) row.push_back(t(i, j, k));
            mi.push_back(std::move(row));
        }
        out.push_back(std::move(mi));
    }
    return out;
}

Tensor3 tensor_from_json(const json& j, std::size_t n, const std::string& pointer) {
    Tensor3 t(n);
    expect_array(j, n, pointer);
    for (std::size_t a = 0; a < n; ++a) {
        const std::string pa = pointer + "/" + std::to_string(a);
        expect_array(j[a], n, pa);
        for (std::size_t b = 0; b < n; ++b) {
            const std::string pb = pa + "/" + std::to_string(b);
            expect_array(j[a][b], n, pb);
            for (std::size_t c = 0; c < n; ++c) t(a, b, c) = number_at(j[a][b][c], pb + "/" + std::to_string(c));
        }
    }
    return t;
}

json matrix_to_json(const Matrix& m) {
    json out = json::array();
    for (std::size_t i = 0; i < m.dim(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < m.dim(); ++j) row.push_back(m(i, j));
        out.push_back(std::move(row));
    }
    return out;
}

Matrix matrix_from_json(const json& j, std::size_t n, const std::string& pointer) {
    Matrix m(n);
    expect_array(j, n, pointer);
    for (std::size_t a = 0; a < n; ++a) {
        const std::string pa = pointer + "/" + std::to_string(a);
        expect_array(j[a], n, pa);
        for (std::size_t b = 0; b < n; ++b) m(a, b) = number_at(j[a][b], pa + "/" + std::to_string(b));
    }
    return m;
}

json to_json(const LieAlgebra& alg) {
    json j;
    j["dim"] = alg.dim();
    j["structure"] = tensor_to_json(alg.structure());
    if (!alg.label().empty()) j["label"] = alg.label();
    return j;
}

LieAlgebra lie_algebra_from_json(const json& j, const std::string& pointer) {
    const std::size_t n = dim_from(j, "dim", pointer);
    Tensor3 c = tensor_from_json(require(j, "structure", pointer), n, pointer + "/structure");
    std::string label;
    if (auto it = j.find("label"); it != j.end()) {
        if (!it->is_string()) throw ConfigError(pointer + "/label", "expected a string");
        label = it->get<std::string>();
    }
    return LieAlgebra(std::move(c), std::move(label));
}

json to_json(const QuadraticHamiltonian& ham) {
    json j;
    j["dim"] = ham.dim();
    j["hamiltonian"] = matrix_to_json(ham.form());
    return j;
}

QuadraticHamiltonian hamiltonian_from_json(const json& j, const std::string& pointer) {
    const std::size_t n = dim_from(j, "dim", pointer);
    Matrix m = matrix_from_json(require(j, "hamiltonian", pointer), n, pointer + "/hamiltonian");
    try {
        return QuadraticHamiltonian(std::move(m));
    } catch (const std::exception& e) {
        throw ConfigError(pointer + "/hamiltonian", e.what());
    }
}

json to_json(const WaveSystemSpec& spec) {
    json j;
    j["n_fields"] = spec.n_fields();
    j["bad_coeffs"] = tensor_to_json(spec.bad_coeffs());
    j["nullform_coeffs"] = tensor_to_json(spec.nullform_coeffs());
    j["label"] = spec.label();
    if (const auto& st = spec.structure()) {
        json s = to_json(st->algebra);
        s["hamiltonian"] = matrix_to_json(st->hamiltonian.form());
        j["structure"] = std::move(s);
    }
    return j;
}

WaveSystemSpec wave_system_from_json(const json& j, const std::string& pointer) {
    const std::size_t n = dim_from(j, "n_fields", pointer);
    Tensor3 bad = tensor_from_json(require(j, "bad_coeffs", pointer), n, pointer + "/bad_coeffs");
    Tensor3 null = j.contains("nullform_coeffs")
                       ? tensor_from_json(j["nullform_coeffs"], n, pointer + "/nullform_coeffs")
                       : Tensor3(n);
    std::string label = "inline";
    if (auto it = j.find("label"); it != j.end()) {
        if (!it->is_string()) throw ConfigError(pointer + "/label", "expected a string");
        label = it->get<std::string>();
    }
    std::optional<HamiltonianStructure> structure;
    if (auto it = j.find("structure"); it != j.end()) {
        const std::string ps = pointer + "/structure";
        LieAlgebra alg = lie_algebra_from_json(*it, ps);
        if (alg.dim() != n) throw ConfigError(ps + "/dim", "differs from n_fields");
        structure = HamiltonianStructure{std::move(alg), hamiltonian_from_json(*it, ps)};
    }
    try {
        return WaveSystemSpec(n, std::move(bad), std::move(null), std::move(label), std::move(structure));
    } catch (const std::exception& e) {
        throw ConfigError(pointer.empty() ? "/" : pointer, e.what());
    }
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    os << 's';
    for (std::size_t a = 0; a < traj.n_fields(); ++a) os << ",phi_" << a;
    os << '\n';
    for (std::size_t i = 0; i < traj.size(); ++i) {
        os << fmt(traj.s(i));
        for (double x : traj.phi(i)) os << ',' << fmt(x);
        os << '\n';
    }
}

void write_grid_csv(std::ostream& os, const CharacteristicGrid& grid) {
    os << "u,v,field,psi\n";
    for (std::size_t i : grid.stored_rows()) {
        const std::string u = fmt(grid.u(i));
        for (std::size_t j = 0; j < grid.extent(i); ++j) {
            const std::string v = fmt(grid.v(j));
            for (std::size_t a = 0; a < grid.n_fields(); ++a)
                os << u << ',' << v << ',' << a << ',' << fmt(grid.psi(a, i, j)) << '\n';
        }
    }
}

json grid_metadata(const CharacteristicGrid& grid) {
    json j;
    j["n_fields"] = grid.n_fields();
    j["u_range"] = {grid.u_min(), grid.u_max()};
    j["v_range"] = {grid.v_min(), grid.v_max()};
    j["h"] = grid.h();
    j["rows"] = grid.rows();
    j["cols"] = grid.cols();
    j["stored_rows"] = grid.stored_rows().size();
    j["status"] = to_string(grid.status());
    if (grid.status() == GridStatus::blowup) {
        j["blowup_u"] = grid.blowup_u();
        j["blowup_v"] = grid.blowup_v();
    }
    return j;
}

void write_trace_csv(std::ostream& os, const RadiationTrace& trace) {
    os << 's';
    for (std::size_t a = 0; a < trace.n_fields; ++a) os << ",phi_" << a;
    os << '\n';
    for (std::size_t i = 0; i < trace.size(); ++i) {
        os << fmt(trace.s[i]);
        for (double x : trace.at(i)) os << ',' << fmt(x);
        os << '\n';
    }
}

CsvSeries read_series_csv(std::istream& is) {
    CsvSeries out;
    std::string line;
    if (!std::getline(is, line) || line.rfind("s", 0) != 0) throw std::invalid_argument("csv: missing header");
    out.n_fields = static_cast<std::size_t>(std::count(line.begin(), line.end(), ','));
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::size_t col = 0;
        const char* p = line.data();
        const char* end = p + line.size();
        while (p <= end) {
            double x = 0.0;
            const auto res = std::from_chars(p, end, x);
            if (res.ec != std::errc{}) throw std::invalid_argument("csv: bad number on line " + std::to_string(lineno));
            (col == 0 ? out.s : out.phi).push_back(x);
            ++col;
            p = res.ptr;
            if (p == end) break;
            if (*p != ',') throw std::invalid_argument("csv: bad separator on line " + std::to_string(lineno));
            ++p;
        }
        if (col != out.n_fields + 1) throw std::invalid_argument("csv: wrong column count on line " + std::to_string(lineno));
    }
    return out;
}

}  // namespace wnlab
