#pragma once

// Single-cell density matrix (parties sigma_i, S_a, S_b, sigma_{i+1}).
//
// Unit conventions: CorrelatorSet holds spin-value expectations (Ising spins
// +-1/2). The operator expansion uses Pauli sigma^z (eigenvalues +-1) on the
// Ising parties and spin matrices on the Heisenberg parties, so every Ising
// factor contributes a factor 2 to its coefficient.

#include <filesystem>
#include <optional>

#include "atih/model.hpp"
#include "atih/thermo.hpp"

namespace atih {

enum class StateMode { correlator_assembled, ground_state_oracle };

std::string_view to_string(StateMode m);
std::optional<StateMode> state_mode_from_string(std::string_view s);

struct CellState {
    ComplexMatrix rho;
    SubsystemShape shape;
    StateMode mode = StateMode::correlator_assembled;
    double min_eigenvalue = 0.0;
    ModelParams source_params;
    std::optional<double> beta;  // empty means zero temperature
};

/// One operator string of the expansion: per-party operator index
/// 0 = identity, 1 = x, 2 = y, 3 = z (Pauli on Ising parties, spin matrix on
/// Heisenberg parties), and the coefficient Tr(rho B) it carries.
struct ExpansionTerm {
    std::array<int, 4> ops{};
    double coefficient = 0.0;
};

/// The 24 operator strings (17 groups with their partners) and
/// their coefficients in the Pauli/spin-matrix convention.
std::vector<ExpansionTerm> expansion_terms(const CorrelatorSet& c);

/// The full Kronecker operator for one term.
ComplexMatrix expansion_operator(const std::array<int, 4>& ops, SpinCase spin_case);

/// rho = sum_B coef_B B / Tr(B^dagger B).
CellState assemble_density_matrix(const CorrelatorSet& c, SpinCase spin_case);

/// Thermal correlators at the given beta, assembled.
CellState assembled_state(const ModelParams& p, double beta = kGroundStateBeta);

/// Zero-temperature projector mixture from cell_ground_state.
CellState ground_state_oracle(const ModelParams& p);

struct StateDiagnostics {
    double hermiticity_defect = 0.0;
    double trace_defect = 0.0;
    double min_eigenvalue = 0.0;
    bool psd = true;  // min eigenvalue >= -1e-8
};

StateDiagnostics validate_state(const CellState& s);

/// Clamps negative eigenvalues to zero and renormalizes. Sets *warning when
/// the input had an eigenvalue below -tol; throws NotPsdError below -1e-3.
CellState psd_project(const CellState& s, double tol = kTol.psd_clamp, bool* warning = nullptr);

/// Uhlmann fidelity (Tr sqrt(sqrt(a) b sqrt(a)))^2 of two PSD matrices.
double fidelity(const ComplexMatrix& a, const ComplexMatrix& b);

/// Raw dump: row-major, little-endian, real/imag interleaved float64.
void write_rho_binary(const ComplexMatrix& rho, const std::filesystem::path& path);
ComplexMatrix read_rho_binary(const std::filesystem::path& path, std::size_t dim);

}  // namespace atih
