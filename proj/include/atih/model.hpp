#pragma once

// Single-cell Hamiltonian of the tetrahedral Ising-Heisenberg chain, its
// closed-form spectrum, and the exact ground-state enumeration.
//
// Conventions:
//   * Ising spins take the values +1/2 (index 0) and -1/2 (index 1).
//   * Heisenberg spins use the standard spin matrices with S^z eigenvalues
//     {+s, ..., -s} in that index order.
//   * A cell is ordered (sigma_i, S_a, S_b, sigma_{i+1}).

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "atih/numerics.hpp"

namespace atih {

enum class SpinCase { half_half, half_one };

std::string_view to_string(SpinCase c);
std::optional<SpinCase> spin_case_from_string(std::string_view s);

/// Heisenberg spin dimension: 2 for spin-1/2, 3 for spin-1.
std::size_t heisenberg_dim(SpinCase c) noexcept;
/// {2, d, d, 2}.
SubsystemShape cell_shape(SpinCase c);

struct ModelParams {
    SpinCase spin_case = SpinCase::half_half;
    double J = 0.0;   // Ising-Heisenberg and Ising-Ising coupling
    double Jx = 0.0;
    double Jy = 0.0;
    double Jz = 0.0;
    double h = 0.0;   // field on Heisenberg spins
    double h0 = 0.0;  // field on Ising spins

    double j_plus() const noexcept { return Jx + Jy; }
    double j_minus() const noexcept { return Jx - Jy; }
    /// Largest coupling or field magnitude, at least 1.
    double energy_scale() const noexcept;
    bool operator==(const ModelParams&) const = default;
};

struct SpinOperators {
    ComplexMatrix x, y, z;
};

/// Spin matrices for a d-dimensional (spin (d-1)/2) representation.
SpinOperators spin_operators(std::size_t d);

/// Parametrized couplings used for the phase diagrams. Fields are zero.
///   half_half: J = -sin x, Jz = -sin y, Jx = Jy = 2 cos y
///   half_one : J = Jz = sin x, Jx = Jy = 2 sin y
ModelParams params_from_xy(SpinCase c, double x, double y);

/// Hamiltonian of the Heisenberg pair with the two Ising neighbours frozen,
/// including the Ising-Ising bond and both field terms.
ComplexMatrix edge_hamiltonian(const ModelParams& p, double sigma_i, double sigma_i1);

/// Which closed-form eigenstate a level is.
enum class EdgeLevel {
    // spin-1/2, ordered as in the diagonalized Hamiltonian
    phi1,  // eps^1_+, e1|++> + |-->
    phi2,  // eps^2_+, (|+-> + |-+>)/sqrt2
    phi3,  // eps^2_-, (-|+-> + |-+>)/sqrt2
    phi4,  // eps^1_-, e2|++> + |-->
    // spin-1
    plus1, minus1, plus2, minus2, plus3, minus3, plus4, minus4, five,
};

std::string_view to_string(EdgeLevel l);

struct Level {
    double energy = 0.0;
    std::vector<cplx> state;  // amplitudes over the d*d pair basis
    EdgeLevel tag{};
};

struct EdgeAux {
    double gamma = 0.0;
    double alpha = 0.0;
    // spin-1/2 amplitude ratios; infinite when J_- = 0
    double e1 = 0.0;
    double e2 = 0.0;
    // spin-1 amplitude ratios; infinite when Jx = 0
    double f1 = 0.0;
    double f2 = 0.0;
    bool singular = false;  // closed-form ratios replaced by their limits
};

struct EdgeSpectrum {
    double sigma_i = 0.5;
    double sigma_i1 = 0.5;
    std::vector<Level> levels;
    EdgeAux aux;
};

/// Closed-form spectrum and eigenstates. The spin-1 forms assume Jx = Jy and
/// throw std::invalid_argument otherwise.
EdgeSpectrum edge_spectrum(const ModelParams& p, double sigma_i, double sigma_i1);

enum class Phase {
    FM, FRI,
    QFO_I, QFO_II, QFO_III, QFO_IV,
    QFI_I, QFI_II,
    FRU, FRU_I, FRU_II, FRU_III, FRU_IV,
    DEGENERATE,
};

std::string_view to_string(Phase p);
std::optional<Phase> phase_from_string(std::string_view s);

struct PhaseLabel {
    Phase name = Phase::DEGENERATE;
    double cell_energy = 0.0;
    std::size_t degeneracy = 0;
};

/// One (Ising pair, edge level) combination in the ground manifold.
struct GroundMember {
    double sigma_i = 0.5;
    double sigma_i1 = 0.5;
    EdgeLevel level{};
    Phase phase{};
};

struct GroundState {
    ComplexMatrix rho;  // uniform mixture over members, cell ordering
    PhaseLabel label;
    std::vector<GroundMember> members;
};

/// Enumerates period-1 (++, --) and period-2 (+-/-+) Ising patterns with all
/// edge levels and returns the uniform mixture over the minimal-energy set.
GroundState cell_ground_state(const ModelParams& p);

/// Phase labels on a grid, row-major with x fastest: result[iy * xs.size() + ix].
std::vector<PhaseLabel> phase_label_grid(SpinCase c, std::span<const double> xs, std::span<const double> ys);

}  // namespace atih
