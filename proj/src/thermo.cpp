#include "atih/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace atih {

namespace {

double log_sum_exp(std::span<const double> xs) {
    const double m = *std::max_element(xs.begin(), xs.end());
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (double x : xs) s += std::exp(x - m);
    return m + std::log(s);
}

using Vec2 = std::array<double, 2>;

double dot(const Vec2& u, const Vec2& v) { return u[0] * v[0] + u[1] * v[1]; }

Vec2 apply_sigma(const Vec2& v) { return {0.5 * v[0], -0.5 * v[1]}; }

// Symmetric 2x2 [[pp, pm], [pm, mm]] applied to v.
struct Sym2 {
    double pp = 0.0, mm = 0.0, pm = 0.0;
    Vec2 apply(const Vec2& v) const { return {pp * v[0] + pm * v[1], pm * v[0] + mm * v[1]}; }
};

// (T/lambda+)^n v via the spectral decomposition.
Vec2 apply_power(const TransferData& td, int n, const Vec2& v) {
    const double cp = dot(td.v_plus, v);
    const double cm = n == 0 ? dot(td.v_minus, v) : dot(td.v_minus, v) * std::pow(td.ratio(), n);
    return {cp * td.v_plus[0] + cm * td.v_minus[0], cp * td.v_plus[1] + cm * td.v_minus[1]};
}

double expectation(const Level& l, const ComplexMatrix& op) {
    const std::size_t n = l.state.size();
    cplx acc{};
    for (std::size_t r = 0; r < n; ++r) {
        if (l.state[r] == cplx{}) continue;
        cplx row{};
        for (std::size_t c = 0; c < n; ++c) row += op(r, c) * l.state[c];
        acc += std::conj(l.state[r]) * row;
    }
    return acc.real();
}

// Scaled bond weights Tr(O e^{-beta H(s,s')}) / exp(log_scale) for several operators at once.
std::vector<Sym2> operator_bonds(const ModelParams& p, double beta, double log_scale,
                                 std::initializer_list<const ComplexMatrix*> ops) {
    std::vector<Sym2> out(ops.size());
    const std::array<std::pair<double, double>, 3> pairs{{{0.5, 0.5}, {-0.5, -0.5}, {0.5, -0.5}}};
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        const auto spec = edge_spectrum(p, pairs[k].first, pairs[k].second);
        std::size_t j = 0;
        for (const ComplexMatrix* op : ops) {
            double acc = 0.0;
            for (const auto& l : spec.levels) acc += expectation(l, *op) * std::exp(-beta * l.energy - log_scale);
            double& slot = k == 0 ? out[j].pp : (k == 1 ? out[j].mm : out[j].pm);
            slot = acc;
            ++j;
        }
    }
    return out;
}

struct EdgeOps {
    ComplexMatrix sz_a, sxsx, sysy, szsz;
};

const EdgeOps& edge_ops(SpinCase c) {
    static const auto build = [](std::size_t d) {
        const auto s = spin_operators(d);
        const auto id = ComplexMatrix::identity(d);
        return EdgeOps{tensor_product(s.z, id), tensor_product(s.x, s.x), tensor_product(s.y, s.y),
                       tensor_product(s.z, s.z)};
    };
    static const EdgeOps half = build(2);
    static const EdgeOps one = build(3);
    return c == SpinCase::half_half ? half : one;
}

double bond_expectation(const TransferData& td, const Sym2& t) {
    return dot(td.v_plus, t.apply(td.v_plus)) / td.lambda_plus;
}

// <O_bond sigma_{i+r}>; r = 0 is the left end of the bond, r = 1 the right end.
double bond_sigma(const TransferData& td, const Sym2& t, int r) {
    const Vec2 sv = apply_sigma(td.v_plus);
    if (r <= 0) {
        // sigma_{i+r} to the left: v^T sigma (T/l)^{-r} (T_O/l) v
        const Vec2 right = t.apply(td.v_plus);
        const Vec2 mid = apply_power(td, -r, {right[0] / td.lambda_plus, right[1] / td.lambda_plus});
        return dot(sv, mid);
    }
    const Vec2 tail = apply_power(td, r - 1, sv);
    const Vec2 left = t.apply(td.v_plus);
    return dot(left, tail) / td.lambda_plus;
}

double exact_sigma(const TransferData& td) { return 0.5 * td.cos2; }

double exact_sigma_sigma(const TransferData& td, int r) {
    const int n = std::abs(r);
    const double m = exact_sigma(td);
    const double s2 = td.sin2;
    return m * m + 0.25 * s2 * s2 * (n == 0 ? 1.0 : std::pow(td.ratio(), n));
}

double exact_three_body(const TransferData& td, int r) {
    const Vec2 sv = apply_sigma(td.v_plus);
    if (r <= 0) {
        // sigma_j ... sigma_i sigma_{i+1}
        Vec2 right = apply_sigma(apply_power(td, 1, sv));
        right = apply_sigma(apply_power(td, -r, right));
        return dot(td.v_plus, right);
    }
    // sigma_i sigma_{i+1} ... sigma_j
    Vec2 right = apply_sigma(apply_power(td, r - 1, sv));
    right = apply_power(td, 1, right);
    return dot(sv, right);
}

ModelParams shifted(ModelParams p, Coupling which, double dx) {
    switch (which) {
        case Coupling::J: p.J += dx; break;
        case Coupling::Jx: p.Jx += dx; break;
        case Coupling::Jy: p.Jy += dx; break;
        case Coupling::Jz: p.Jz += dx; break;
        case Coupling::h: p.h += dx; break;
        case Coupling::h0: p.h0 += dx; break;
        case Coupling::Jxy:
            p.Jx += dx;
            p.Jy += dx;
            break;
    }
    return p;
}

template <class F>
double richardson(F&& f, const ModelParams& p, Coupling which, double step) {
    const auto central = [&](double hstep) {
        return (f(shifted(p, which, hstep)) - f(shifted(p, which, -hstep))) / (2.0 * hstep);
    };
    const double d1 = central(step);
    const double d2 = central(0.5 * step);
    return (4.0 * d2 - d1) / 3.0;
}

double closed_sigma(const TransferData& td) {
    if (td.w_bar_singular) throw SingularFormError("magnetization closed form: w(+,+) == w(-,-)");
    const double sign = td.a > td.b ? 1.0 : -1.0;
    return 0.5 * sign / std::sqrt(1.0 + 4.0 * td.w_bar_0 * td.w_bar_0);
}

double closed_sigma_sigma(const TransferData& td, int r) {
    const double q = td.w_bar_0 / td.B;
    return closed_sigma(td) + q * q * std::pow(td.ratio(), std::abs(r));
}

double closed_three_body(const TransferData& td, int r) {
    if (td.lambda_minus <= 0.0) throw SingularFormError("three-body closed form: lambda- <= 0 in log");
    const double m = closed_sigma(td);
    const double xi = std::log(td.lambda_plus / td.lambda_minus);
    const double rr = static_cast<double>(r);
    return m * m * m + m * (1.0 - m * m) * (std::exp(-rr / xi) + std::exp(-1.0 / xi) * (1.0 + std::exp(rr / xi)));
}

}  // namespace

double log_boltzmann_weight(const ModelParams& p, double beta, double s, double s1) {
    if (!(beta > 0.0)) throw std::invalid_argument("boltzmann_weight: beta must be positive");
    const double gamma = p.J * s * s1 + 0.5 * p.h0 * (s + s1);
    const double alpha = p.J * (s + s1) + p.h;
    const double jp = p.j_plus();
    const double jz = p.Jz;
    if (p.spin_case == SpinCase::half_half) {
        // 2e^{-b(g+Jz/4)}cosh(b/4 sqrt(16a^2+J-^2)) + 2e^{-b(g-Jz/4)}cosh(b J+/4)
        const double jm = p.j_minus();
        const double root = std::sqrt(16.0 * alpha * alpha + jm * jm);
        const std::array<double, 4> x{
            -beta * (gamma + jz / 4.0) + beta * root / 4.0,
            -beta * (gamma + jz / 4.0) - beta * root / 4.0,
            -beta * (gamma - jz / 4.0) + beta * jp / 4.0,
            -beta * (gamma - jz / 4.0) - beta * jp / 4.0,
        };
        return log_sum_exp(x);
    }
    if (std::abs(p.j_minus()) > 1e-12 * p.energy_scale())
        throw std::invalid_argument("boltzmann_weight: spin-1 closed form requires Jx == Jy");
    // e^{-b(g+Jz)} 2cosh(2ba) + 4e^{-bg}cosh(ba)cosh(bJ+/2) + e^{-b(g-Jz)}
    //   + 2e^{-bg}e^{bJz/2}cosh(b/2 sqrt(Jz^2 + 2J+^2))
    const double root = std::sqrt(jz * jz + 2.0 * jp * jp);
    const double g = -beta * gamma;
    const std::array<double, 9> x{
        g - beta * jz + 2.0 * beta * alpha,
        g - beta * jz - 2.0 * beta * alpha,
        g + beta * alpha + 0.5 * beta * jp,
        g + beta * alpha - 0.5 * beta * jp,
        g - beta * alpha + 0.5 * beta * jp,
        g - beta * alpha - 0.5 * beta * jp,
        g + beta * jz,
        g + 0.5 * beta * jz + 0.5 * beta * root,
        g + 0.5 * beta * jz - 0.5 * beta * root,
    };
    return log_sum_exp(x);
}

double boltzmann_weight(const ModelParams& p, double beta, double s, double s1) {
    return std::exp(log_boltzmann_weight(p, beta, s, s1));
}

double operator_weight(const ModelParams& p, double beta, double s, double s1, const ComplexMatrix& op, double shift) {
    if (!(beta > 0.0)) throw std::invalid_argument("operator_weight: beta must be positive");
    const auto spec = edge_spectrum(p, s, s1);
    const std::size_t n = spec.levels.front().state.size();
    if (op.rows() != n || op.cols() != n) throw std::invalid_argument("operator_weight: operator dimension mismatch");
    double acc = 0.0;
    for (const auto& l : spec.levels) acc += expectation(l, op) * std::exp(-beta * l.energy - shift);
    return acc;
}

double TransferData::free_energy() const noexcept { return -(log_scale + std::log(lambda_plus)) / beta; }

TransferData transfer_data(const ModelParams& p, double beta) {
    TransferData td;
    td.beta = beta;
    td.log_w_pp = log_boltzmann_weight(p, beta, 0.5, 0.5);
    td.log_w_mm = log_boltzmann_weight(p, beta, -0.5, -0.5);
    td.log_w_pm = log_boltzmann_weight(p, beta, 0.5, -0.5);
    td.log_scale = std::max({td.log_w_pp, td.log_w_mm, td.log_w_pm});
    td.a = std::exp(td.log_w_pp - td.log_scale);
    td.b = std::exp(td.log_w_mm - td.log_scale);
    td.c = std::exp(td.log_w_pm - td.log_scale);

    const double diff = td.a - td.b;
    const double gap = std::hypot(diff, 2.0 * td.c);
    td.lambda_plus = 0.5 * (td.a + td.b + gap);
    td.lambda_minus = (td.a * td.b - td.c * td.c) / td.lambda_plus;
    if (gap == 0.0) {
        // a == b and c == 0: take the symmetric combination
        td.mixing_angle = 0.25 * std::numbers::pi;
        td.cos2 = 0.0;
        td.sin2 = 1.0;
    } else {
        td.mixing_angle = 0.5 * std::atan2(2.0 * td.c, diff);
        td.cos2 = diff / gap;
        td.sin2 = 2.0 * td.c / gap;
    }
    td.v_plus = {std::cos(td.mixing_angle), std::sin(td.mixing_angle)};
    td.v_minus = {-td.v_plus[1], td.v_plus[0]};

    const double scale = std::exp(td.log_scale);
    td.B = gap * scale;
    td.w_bar_singular = std::abs(diff) < 1e-12 * std::max(td.a, td.b);
    td.w_bar_0 = td.w_bar_singular ? std::numeric_limits<double>::infinity() : td.c / std::abs(diff);
    td.log_f_eff = 0.5 * td.log_w_pm + 0.25 * (td.log_w_pp + td.log_w_mm);
    td.J_eff = 4.0 / beta * (td.log_w_pp + td.log_w_mm - 2.0 * td.log_w_pm);
    td.h_eff = 1.0 / (2.0 * beta) * (td.log_w_pp - td.log_w_mm);
    return td;
}

double free_energy(const ModelParams& p, double beta) { return transfer_data(p, beta).free_energy(); }

double correlator_exact(const ModelParams& p, double beta, Correlator which, int r) {
    const auto td = transfer_data(p, beta);
    const auto& ops = edge_ops(p.spin_case);
    switch (which) {
        case Correlator::sigma_z: return exact_sigma(td);
        case Correlator::sigma_sigma: return exact_sigma_sigma(td, r);
        case Correlator::three_body: return exact_three_body(td, r);
        case Correlator::Sz: return bond_expectation(td, operator_bonds(p, beta, td.log_scale, {&ops.sz_a})[0]);
        case Correlator::SxSx: return bond_expectation(td, operator_bonds(p, beta, td.log_scale, {&ops.sxsx})[0]);
        case Correlator::SySy: return bond_expectation(td, operator_bonds(p, beta, td.log_scale, {&ops.sysy})[0]);
        case Correlator::SzSz: return bond_expectation(td, operator_bonds(p, beta, td.log_scale, {&ops.szsz})[0]);
        case Correlator::Sz_sigma: return bond_sigma(td, operator_bonds(p, beta, td.log_scale, {&ops.sz_a})[0], r);
    }
    throw std::invalid_argument("correlator_exact: unknown correlator");
}

double free_energy_derivative(const ModelParams& p, double beta, Coupling which, double step) {
    return richardson([&](const ModelParams& q) { return free_energy(q, beta); }, p, which, step);
}

double correlator_closed_form(const ModelParams& p, double beta, Correlator which, int r) {
    const auto td = transfer_data(p, beta);
    const bool spin_one = p.spin_case == SpinCase::half_one;
    switch (which) {
        case Correlator::sigma_z: return closed_sigma(td);
        case Correlator::sigma_sigma: return closed_sigma_sigma(td, r);
        case Correlator::three_body: return closed_three_body(td, r);
        case Correlator::Sz: return 0.5 * free_energy_derivative(p, beta, Coupling::h);
        case Correlator::SzSz: return free_energy_derivative(p, beta, Coupling::Jz);
        case Correlator::SxSx:
            return spin_one ? 0.5 * free_energy_derivative(p, beta, Coupling::Jxy)
                            : free_energy_derivative(p, beta, Coupling::Jx);
        case Correlator::SySy:
            return spin_one ? 0.5 * free_energy_derivative(p, beta, Coupling::Jxy)
                            : free_energy_derivative(p, beta, Coupling::Jy);
        case Correlator::Sz_sigma: {
            const auto log_f = [&](const ModelParams& q) { return transfer_data(q, beta).log_f_eff; };
            const auto h_eff = [&](const ModelParams& q) { return transfer_data(q, beta).h_eff; };
            const auto j_eff = [&](const ModelParams& q) { return transfer_data(q, beta).J_eff; };
            const double q0 = -1.0 / (2.0 * beta) * richardson(log_f, p, Coupling::h, 1e-5);
            const double q10 = 0.5 * richardson(h_eff, p, Coupling::h, 1e-5);
            const double q11 = 0.125 * richardson(j_eff, p, Coupling::h, 1e-5);
            return q0 * closed_sigma(td) + q10 * closed_sigma_sigma(td, r) + q10 * closed_sigma_sigma(td, r - 1) +
                   q11 * closed_three_body(td, r);
        }
    }
    throw std::invalid_argument("correlator_closed_form: unknown correlator");
}

CorrelatorSet correlator_set(const ModelParams& p, double beta) {
    const auto td = transfer_data(p, beta);
    const auto& ops = edge_ops(p.spin_case);
    const auto bonds = operator_bonds(p, beta, td.log_scale, {&ops.sz_a, &ops.sxsx, &ops.szsz});
    CorrelatorSet c;
    c.beta = beta;
    c.sigma_z = exact_sigma(td);
    c.sigma_sigma = exact_sigma_sigma(td, 1);
    c.Sz = bond_expectation(td, bonds[0]);
    c.SxSx = bond_expectation(td, bonds[1]);
    c.SzSz = bond_expectation(td, bonds[2]);
    c.Sz_sigma = bond_sigma(td, bonds[0], 0);
    c.xi = td.lambda_minus == 0.0 ? 0.0 : 1.0 / std::log(td.lambda_plus / std::abs(td.lambda_minus));
    return c;
}

}  // namespace atih
