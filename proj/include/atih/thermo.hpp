#pragma once

// Transfer-matrix thermodynamics of the chain after tracing out the
// Heisenberg edges. Ising spins are in spin-value units (+-1/2).
//
// All weights are handled in log form. TransferData keeps the unscaled
// log-weights and a scaled 2x2 matrix T/exp(log_scale) whose largest entry is 1.

#include <array>
#include <stdexcept>

#include "atih/model.hpp"

namespace atih {

/// Closed-form log w(sigma, sigma') = log Tr_edge exp(-beta H_edge).
double log_boltzmann_weight(const ModelParams& p, double beta, double sigma, double sigma1);

/// exp(log_boltzmann_weight); may overflow to inf for very cold inputs.
double boltzmann_weight(const ModelParams& p, double beta, double sigma, double sigma1);

/// Tr(O exp(-beta H_edge - shift)) from the closed-form eigenbasis.
double operator_weight(const ModelParams& p, double beta, double sigma, double sigma1, const ComplexMatrix& op,
                       double shift = 0.0);

struct TransferData {
    double beta = 1.0;
    // unscaled log weights
    double log_w_pp = 0.0;
    double log_w_mm = 0.0;
    double log_w_pm = 0.0;
    double log_scale = 0.0;  // max of the three
    // scaled matrix [[a, c], [c, b]], index 0 = +1/2
    double a = 0.0, b = 0.0, c = 0.0;
    double lambda_plus = 0.0;   // scaled
    double lambda_minus = 0.0;  // scaled
    std::array<double, 2> v_plus{};
    std::array<double, 2> v_minus{};
    double mixing_angle = 0.0;  // v_plus = (cos, sin)
    double cos2 = 0.0;          // cos(2 angle) = (a - b)/gap
    double sin2 = 0.0;          // sin(2 angle) = 2c/gap

    // closed-form quantities, unscaled
    double B = 0.0;
    double w_bar_0 = 0.0;
    bool w_bar_singular = false;  // |w++ - w--| < 1e-12 max(w++, w--)
    double log_f_eff = 0.0;
    double J_eff = 0.0;
    double h_eff = 0.0;

    double free_energy() const noexcept;
    /// lambda-/lambda+.
    double ratio() const noexcept { return lambda_minus / lambda_plus; }
};

TransferData transfer_data(const ModelParams& p, double beta);

/// F = -ln(lambda+)/beta per cell.
double free_energy(const ModelParams& p, double beta);

enum class Correlator {
    sigma_z,       // <sigma_i>
    sigma_sigma,   // <sigma_i sigma_{i+r}>
    Sz,            // <S^z_a>
    SxSx,          // <S^x_a S^x_b>
    SySy,          // <S^y_a S^y_b>
    SzSz,          // <S^z_a S^z_b>
    Sz_sigma,      // <S^z_{a,i} sigma_{i+r}>, r = 0 is the left Ising spin of the cell
    three_body,    // <sigma_i sigma_{i+1} sigma_{i+r}>, r may be negative
};

/// Spectral transfer-matrix evaluation. r is a site offset where relevant.
double correlator_exact(const ModelParams& p, double beta, Correlator which, int r = 0);

/// Raised when a closed form is singular (w++ == w--, or lambda- <= 0 in a log).
class SingularFormError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Closed-form expressions, kept as a cross-check of the exact engine:
///   sigma_z      : magnetization from w++, w--, w+-
///   sigma_sigma  : <sigma> + (w0/B)^2 (lambda-/lambda+)^r
///   Sz, SzSz, SxSx, SySy : free-energy derivatives (central difference,
///                  step 1e-5, one Richardson level); Sz is halved because the
///                  field couples to Sz_a + Sz_b
///   Sz_sigma     : q-coefficient expansion with q0, q10, q11 from ln f_eff,
///                  h_eff, J_eff derivatives
///   three_body   : <s>^3 + <s>(1-<s>^2)(e^{-r/xi} + e^{-1/xi}(1 + e^{r/xi})),
///                  xi = ln(lambda+/lambda-)
/// Throws SingularFormError where a form is undefined.
double correlator_closed_form(const ModelParams& p, double beta, Correlator which, int r = 0);

/// Free-energy derivative along one coupling, central difference + Richardson.
enum class Coupling { J, Jx, Jy, Jz, h, h0, Jxy };
double free_energy_derivative(const ModelParams& p, double beta, Coupling which, double step = 1e-5);

struct CorrelatorSet {
    double sigma_z = 0.0;       // <sigma>, spin-value units
    double sigma_sigma = 0.0;   // nearest-neighbour <sigma sigma>
    double Sz = 0.0;            // <S^z_a> = <S^z_b>
    double SxSx = 0.0;
    double SzSz = 0.0;
    double Sz_sigma = 0.0;      // <S^z_a sigma_i> = <S^z_b sigma_{i+1}> = ...
    double xi = 0.0;            // 1/ln(lambda+/|lambda-|), 0 if lambda- = 0
    double beta = 0.0;
};

CorrelatorSet correlator_set(const ModelParams& p, double beta);

/// Default inverse temperature used to approximate the ground state.
inline constexpr double kGroundStateBeta = 50.0;

}  // namespace atih
