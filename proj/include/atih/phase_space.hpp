#pragma once

// SU(2)-kernel Wigner functions of the cell state.
//
// Single-party kernel:  Delta(theta, phi) = (1/d) U Pi U^dagger,
//   U = exp(i Jz phi) exp(i Jy 2 theta),  Pi = I - N(d) zeta,
//   theta in [0, pi/2], phi in [0, 2 pi).
// Per-party measure (d / 2 pi) sin(2 theta) dtheta dphi, so that the
// integral of Delta is the identity. Composite kernels are plain tensor
// products. The equal-angle slice shares one (theta, phi) between all
// parties and uses the measure (1/pi) sin(2 theta) dtheta dphi.

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "atih/cell_state.hpp"
#include "atih/numerics.hpp"

namespace atih {

struct KernelBundle {
    std::size_t d = 2;
    ComplexMatrix zeta;    // diag(1, ..., 1, -(d-1)) sqrt(2 / (d(d-1)))
    ComplexMatrix parity;  // I - N(d) zeta
    ComplexMatrix jy, jz;
    std::vector<double> parity_diag;
    std::vector<double> m;  // S^z eigenvalue per basis index
    double norm = 0.0;      // N(d) = sqrt(d (d+1) (d-1) / 2)
};

/// Cached, read-only bundle for dimension d >= 2.
const KernelBundle& kernel_bundle(std::size_t d);

struct AngleSet {
    std::vector<double> theta;
    std::vector<double> phi;
    bool equal_angle = false;

    static AngleSet equal(double theta, double phi, std::size_t parties);
};

/// Closed-form kernel for d in {2, 3}.
ComplexMatrix kernel_single(std::size_t d, double theta, double phi);

/// Tensor product of single-party kernels.
ComplexMatrix kernel_composite(const SubsystemShape& shape, const AngleSet& angles);

/// Tr(rho Delta). Throws NotHermitianError if the imaginary residue is >= 1e-8.
double wigner_value(const ComplexMatrix& rho, const SubsystemShape& shape, const AngleSet& angles);
double wigner_value(const CellState& s, const AngleSet& angles);

namespace reference {
/// Kernel from dense matrix exponentials with an optional third Euler angle,
/// U = exp(i Jz phi) exp(i Jy 2 theta) exp(i Jz psi). Any d >= 2.
ComplexMatrix kernel_single(std::size_t d, double theta, double phi, double psi = 0.0);
}  // namespace reference

/// Real part of the single-party kernel at phi = 0 together with the phase
/// powers exp(i k phi), k = -2..2. Delta_ab = K_ab exp(i (m_a - m_b) phi).
struct PartyKernel {
    std::size_t d = 2;
    std::array<double, 9> k{};
    std::array<cplx, 5> phase{};  // index k + 2
};

/// u = cos(2 theta), v = sin(2 theta) >= 0.
PartyKernel party_kernel(std::size_t d, double u, double v, double phi);

/// Sparse evaluator of W = Tr(rho Delta) over the nonzero entries of rho.
class WignerEvaluator {
public:
    WignerEvaluator(const ComplexMatrix& rho, const SubsystemShape& shape);

    const SubsystemShape& shape() const noexcept { return shape_; }
    std::size_t nonzeros() const noexcept { return entries_.size(); }
    /// True when rho commutes with total S^z, so the equal-angle W is phi-independent.
    bool phi_independent() const noexcept { return max_charge_ == 0; }
    int max_charge() const noexcept { return max_charge_; }

    /// Independent angles per party.
    double operator()(std::span<const PartyKernel> parties) const;

    /// Equal-angle Fourier coefficients B_q(theta), q = -Q..Q stored at q + Q:
    /// W(theta, phi) = sum_q Re(exp(i q phi) B_q), Q = max_charge().
    void equal_angle_coefficients(double u, double v, std::vector<cplx>& out) const;
    /// Same, from precomputed kernels (one per distinct party dimension).
    void equal_angle_coefficients(const PartyKernel& k2, const PartyKernel& k3, std::vector<cplx>& out) const;
    static double equal_angle_value(std::span<const cplx> coeffs, double phi);

private:
    struct Entry {
        cplx weight;  // rho_rc, doubled for r < c
        std::array<std::uint8_t, 4> row{}, col{};
        std::array<std::int8_t, 4> dm{};
        int charge = 0;
        bool diagonal = false;
    };
    SubsystemShape shape_;
    std::vector<Entry> entries_;
    int max_charge_ = 0;
};

struct EqualAngleMap {
    std::size_t n_theta = 0;
    std::size_t n_phi = 0;
    std::vector<double> values;  // row-major [i_theta][i_phi], cell centres in theta, phi_j = 2 pi j / n_phi
    double average = 0.0;        // int W dOmega / int dOmega, dOmega = (1/pi) sin 2theta dtheta dphi
};

EqualAngleMap equal_angle_map(const CellState& s, std::size_t n_theta, std::size_t n_phi);
EqualAngleMap equal_angle_map(const ComplexMatrix& rho, const SubsystemShape& shape, std::size_t n_theta,
                              std::size_t n_phi);

/// Normalized equal-angle average of W, exact for the polynomial theta dependence.
double wigner_average_equal_angle(const ComplexMatrix& rho, const SubsystemShape& shape);

enum class NegativityMethod { quadrature_2d, monte_carlo_full, monte_carlo_equal_angle };

struct NegativityEstimate {
    double value = 0.0;
    double stderr_ = 0.0;
    NegativityMethod method = NegativityMethod::quadrature_2d;
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
};

/// Equal-angle negativity int max(0, -W) dOmega. The theta axis is split into
/// n_theta panels; sign changes are located by root finding and each smooth
/// piece is integrated with 3-point Gauss-Legendre. The phi axis is split into
/// n_phi panels, each integrated by adaptive Gauss-Kronrod; a phi-independent W
/// needs a single slice.
NegativityEstimate negativity_equal_angle(const ComplexMatrix& rho, const SubsystemShape& shape,
                                          std::size_t n_theta = 128, std::size_t n_phi = 128);
NegativityEstimate negativity_equal_angle(const CellState& s, std::size_t n_theta = 128, std::size_t n_phi = 128);

/// Monte Carlo sample streams: every block of kMcBlock samples owns an
/// mt19937_64 seeded from (seed, point, block, tag); partial sums are combined
/// in block order, so results do not depend on thread count.
inline constexpr std::size_t kMcBlock = 1024;

enum class McTag : std::uint64_t { negativity_full = 1, integral_full = 2, negativity_equal = 3, average_box = 4 };

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t point, std::uint64_t block, McTag tag);

/// Uniform double in [0, 1) from the top 53 bits.
inline double uniform53(std::uint64_t x) { return static_cast<double>(x >> 11) * 0x1.0p-53; }

struct McOptions {
    std::uint64_t samples = 200000;
    std::uint64_t seed = 0;
    std::uint64_t point = 0;
    bool parallel = true;  // OpenMP over blocks; false gives the serial reference
};

/// (prod d) * mean((|W| - W)/2) with per-party (cos 2theta, phi) uniform.
NegativityEstimate negativity_full_mc(const ComplexMatrix& rho, const SubsystemShape& shape, const McOptions& opt);
NegativityEstimate negativity_full_mc(const CellState& s, const McOptions& opt);

/// (prod d) * mean(W): the full-space integral of W, which is 1 for unit trace.
NegativityEstimate integral_full_mc(const ComplexMatrix& rho, const SubsystemShape& shape, const McOptions& opt);

/// 2 * mean((|W| - W)/2) on the equal-angle slice.
NegativityEstimate negativity_equal_angle_mc(const ComplexMatrix& rho, const SubsystemShape& shape,
                                             const McOptions& opt);

/// Mean of W with every theta_i uniform on [0, pi/2] and phi_i uniform. The
/// measure-weighted full-space mean is 1/prod(d) for every state, so the box
/// average is the state-dependent full-space counterpart of the equal-angle
/// average.
NegativityEstimate wigner_avg_full_mc(const ComplexMatrix& rho, const SubsystemShape& shape, const McOptions& opt);

}  // namespace atih
