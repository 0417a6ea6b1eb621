#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "wnlab/algebra.hpp"
#include "wnlab/conditions.hpp"
#include "wnlab/ode.hpp"
#include "wnlab/system.hpp"
#include "wnlab/wave1d.hpp"

namespace wnlab {

using json = nlohmann::ordered_json;

/// Malformed JSON input. pointer() is the JSON pointer of the offending value.
class ConfigError : public std::invalid_argument {
public:
    ConfigError(std::string pointer, const std::string& message)
        : std::invalid_argument(pointer + ": " + message), pointer_(std::move(pointer)) {}
    const std::string& pointer() const noexcept { return pointer_; }

private:
    std::string pointer_;
};

// Nested arrays: tensors as [i][j][k], matrices as [i][j].
json tensor_to_json(const Tensor3& t);
Tensor3 tensor_from_json(const json& j, std::size_t n, const std::string& pointer);
json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const json& j, std::size_t n, const std::string& pointer);

/// {"dim", "structure": [c][b][a], "label"?}
json to_json(const LieAlgebra& alg);
LieAlgebra lie_algebra_from_json(const json& j, const std::string& pointer = "");

/// {"dim", "hamiltonian": [a][b]}
json to_json(const QuadraticHamiltonian& ham);
QuadraticHamiltonian hamiltonian_from_json(const json& j, const std::string& pointer = "");

/// {"n_fields", "bad_coeffs", "nullform_coeffs", "label", "structure"?} where
/// structure = {"dim", "structure", "hamiltonian"}.
json to_json(const WaveSystemSpec& spec);
WaveSystemSpec wave_system_from_json(const json& j, const std::string& pointer = "");

// CSV exports; doubles carry 17 significant digits.

/// Header `s,phi_0,...,phi_{N-1}`.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);
/// Long form `u,v,field,psi` over the stored rows.
void write_grid_csv(std::ostream& os, const CharacteristicGrid& grid);
json grid_metadata(const CharacteristicGrid& grid);
/// Header `s,phi_0,...`.
void write_trace_csv(std::ostream& os, const RadiationTrace& trace);

/// Reads back the `s,phi_0,...` format (trajectories and traces).
struct CsvSeries {
    std::size_t n_fields = 0;
    std::vector<double> s;
    std::vector<double> phi;
};
CsvSeries read_series_csv(std::istream& is);

}  // namespace wnlab
