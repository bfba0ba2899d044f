#include "atih/model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace atih {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

// (e, 1) / sqrt(1 + e^2) without overflow for large |e|.
std::pair<double, double> normalized_ratio(double e) {
    if (std::isinf(e)) return {e > 0 ? 1.0 : -1.0, 0.0};
    if (std::abs(e) <= 1.0) {
        const double n = std::sqrt(1.0 + e * e);
        return {e / n, 1.0 / n};
    }
    const double inv = 1.0 / e;
    const double n = std::sqrt(1.0 + inv * inv);
    return {(e > 0 ? 1.0 : -1.0) / n, std::abs(inv) / n};
}

// (1, 1, f) / sqrt(2 + f^2) as (pair amplitude, |00> amplitude).
std::pair<double, double> normalized_m0(double f) {
    if (std::isinf(f)) return {0.0, 1.0};
    if (std::abs(f) <= 1.0) {
        const double n = std::sqrt(2.0 + f * f);
        return {1.0 / n, f / n};
    }
    const double inv = 1.0 / f;
    const double n = std::sqrt(2.0 * inv * inv + 1.0);
    return {std::abs(inv) / n, (f > 0 ? 1.0 : -1.0) / n};
}

Level make_level(double energy, std::size_t dim, std::initializer_list<std::pair<std::size_t, double>> amps,
                 EdgeLevel tag) {
    Level l;
    l.energy = energy;
    l.tag = tag;
    l.state.assign(dim, cplx{});
    for (auto [i, a] : amps) l.state[i] = a;
    return l;
}

EdgeSpectrum spectrum_half(const ModelParams& p, double s, double s1) {
    EdgeSpectrum out;
    out.sigma_i = s;
    out.sigma_i1 = s1;
    const double gamma = p.J * s * s1 + 0.5 * p.h0 * (s + s1);
    const double alpha = p.J * (s + s1) + p.h;
    const double jm = p.j_minus();
    const double jp = p.j_plus();
    const double root = std::sqrt(16.0 * alpha * alpha + jm * jm);
    out.aux.gamma = gamma;
    out.aux.alpha = alpha;

    // Basis |++>, |+->, |-+>, |--> -> 0..3.
    double e1 = kInf;
    double e2 = kInf;
    std::pair<double, double> v1;
    std::pair<double, double> v4;
    if (jm == 0.0) {
        out.aux.singular = true;
        // eps^1_+ is |++> for alpha >= 0, |--> otherwise.
        if (alpha >= 0.0) {
            e1 = kInf;
            e2 = 0.0;
            v1 = {1.0, 0.0};
            v4 = {0.0, 1.0};
        } else {
            e1 = 0.0;
            e2 = -kInf;
            v1 = {0.0, 1.0};
            v4 = {1.0, 0.0};
        }
    } else {
        const double t = 4.0 * alpha;
        if (alpha >= 0.0) {
            e1 = (root + t) / jm;
            e2 = -1.0 / e1;
        } else {
            e2 = (t - root) / jm;
            e1 = -1.0 / e2;
        }
        v1 = normalized_ratio(e1);
        v4 = normalized_ratio(e2);
    }
    out.aux.e1 = e1;
    out.aux.e2 = e2;

    out.levels.push_back(make_level(gamma + p.Jz / 4.0 + root / 4.0, 4, {{0, v1.first}, {3, v1.second}}, EdgeLevel::phi1));
    out.levels.push_back(make_level(gamma - p.Jz / 4.0 + jp / 4.0, 4, {{1, kInvSqrt2}, {2, kInvSqrt2}}, EdgeLevel::phi2));
    out.levels.push_back(make_level(gamma - p.Jz / 4.0 - jp / 4.0, 4, {{1, -kInvSqrt2}, {2, kInvSqrt2}}, EdgeLevel::phi3));
    out.levels.push_back(make_level(gamma + p.Jz / 4.0 - root / 4.0, 4, {{0, v4.first}, {3, v4.second}}, EdgeLevel::phi4));
    return out;
}

EdgeSpectrum spectrum_one(const ModelParams& p, double s, double s1) {
    if (std::abs(p.j_minus()) > 1e-12 * p.energy_scale()) {
        throw std::invalid_argument("edge_spectrum: spin-1 closed form requires Jx == Jy");
    }
    EdgeSpectrum out;
    out.sigma_i = s;
    out.sigma_i1 = s1;
    const double gamma = p.J * s * s1 + 0.5 * p.h0 * (s + s1);
    const double alpha = p.J * (s + s1) + p.h;
    const double jp = p.j_plus();
    const double jz = p.Jz;
    const double jx = 0.5 * jp;
    out.aux.gamma = gamma;
    out.aux.alpha = alpha;

    // Pair index ia*3 + ib with m index 0:+1, 1:0, 2:-1.
    constexpr std::size_t k11 = 0, k10 = 1, k1m = 2, k01 = 3, k00 = 4, k0m = 5, km1 = 6, km0 = 7, kmm = 8;

    double f1 = kInf;
    double f2 = 0.0;
    std::pair<double, double> v_plus4;
    std::pair<double, double> v_minus4;
    if (jx == 0.0) {
        out.aux.singular = true;
        if (jz >= 0.0) {
            f1 = kInf;  // eps^4_+ -> |00>
            f2 = 0.0;   // eps^4_- -> symmetric pair
        } else {
            f1 = 0.0;
            f2 = -kInf;
        }
        v_plus4 = normalized_m0(f1);
        v_minus4 = normalized_m0(f2);
    } else {
        const double root8 = std::sqrt(jz * jz + 8.0 * jx * jx);
        if (jz >= 0.0) {
            f1 = (jz + root8) / (2.0 * jx);
            f2 = -2.0 / f1;
        } else {
            f2 = (jz - root8) / (2.0 * jx);
            f1 = -2.0 / f2;
        }
        v_plus4 = normalized_m0(f1);
        v_minus4 = normalized_m0(f2);
    }
    out.aux.f1 = f1;
    out.aux.f2 = f2;

    const double root4 = std::sqrt(jz * jz + 2.0 * jp * jp);
    auto& L = out.levels;
    L.push_back(make_level(2.0 * alpha + gamma + jz, 9, {{k11, 1.0}}, EdgeLevel::plus1));
    L.push_back(make_level(-2.0 * alpha + gamma + jz, 9, {{kmm, 1.0}}, EdgeLevel::minus1));
    L.push_back(make_level(alpha + gamma + 0.5 * jp, 9, {{k10, kInvSqrt2}, {k01, kInvSqrt2}}, EdgeLevel::plus2));
    L.push_back(make_level(-alpha + gamma + 0.5 * jp, 9, {{k0m, kInvSqrt2}, {km0, kInvSqrt2}}, EdgeLevel::minus2));
    L.push_back(make_level(alpha + gamma - 0.5 * jp, 9, {{k10, -kInvSqrt2}, {k01, kInvSqrt2}}, EdgeLevel::plus3));
    L.push_back(make_level(-alpha + gamma - 0.5 * jp, 9, {{k0m, -kInvSqrt2}, {km0, kInvSqrt2}}, EdgeLevel::minus3));
    L.push_back(make_level(gamma - 0.5 * jz + 0.5 * root4, 9,
                           {{k1m, v_plus4.first}, {km1, v_plus4.first}, {k00, v_plus4.second}}, EdgeLevel::plus4));
    L.push_back(make_level(gamma - 0.5 * jz - 0.5 * root4, 9,
                           {{k1m, v_minus4.first}, {km1, v_minus4.first}, {k00, v_minus4.second}}, EdgeLevel::minus4));
    L.push_back(make_level(gamma - jz, 9, {{k1m, -kInvSqrt2}, {km1, kInvSqrt2}}, EdgeLevel::five));
    return out;
}

// Heisenberg magnetization sign of a spin-1 level (M = m_a + m_b).
int spin_one_m(EdgeLevel l) {
    switch (l) {
        case EdgeLevel::plus1: return 2;
        case EdgeLevel::minus1: return -2;
        case EdgeLevel::plus2:
        case EdgeLevel::plus3: return 1;
        case EdgeLevel::minus2:
        case EdgeLevel::minus3: return -1;
        default: return 0;
    }
}

Phase member_phase(const ModelParams& p, double s, double s1, const Level& level, bool singular) {
    const bool ferro = (s == s1);
    if (p.spin_case == SpinCase::half_half) {
        switch (level.tag) {
            case EdgeLevel::phi2: return ferro ? Phase::QFO_III : Phase::FRU_III;
            case EdgeLevel::phi3: return ferro ? Phase::QFO_IV : Phase::FRU_IV;
            default: break;
        }
        if (!ferro) return Phase::FRU_I;
        if (!singular) return level.tag == EdgeLevel::phi1 ? Phase::QFO_I : Phase::QFO_II;
        const bool heis_up = std::abs(level.state[0]) > 0.5;
        return heis_up == (s > 0) ? Phase::FM : Phase::FRI;
    }
    if (!ferro) return Phase::FRU;
    const int m = spin_one_m(level.tag);
    if (m == 0) return Phase::QFO_III;
    const bool aligned = (m > 0) == (s > 0);
    if (std::abs(m) == 2) return aligned ? Phase::FM : Phase::FRI;
    const bool family2 = level.tag == EdgeLevel::plus2 || level.tag == EdgeLevel::minus2;
    if (aligned) return family2 ? Phase::QFO_I : Phase::QFO_II;
    return family2 ? Phase::QFI_I : Phase::QFI_II;
}

}  // namespace

std::string_view to_string(SpinCase c) {
    return c == SpinCase::half_half ? "half_half" : "half_one";
}

std::optional<SpinCase> spin_case_from_string(std::string_view s) {
    if (s == "half_half") return SpinCase::half_half;
    if (s == "half_one") return SpinCase::half_one;
    return std::nullopt;
}

std::size_t heisenberg_dim(SpinCase c) noexcept { return c == SpinCase::half_half ? 2 : 3; }

SubsystemShape cell_shape(SpinCase c) {
    const std::size_t d = heisenberg_dim(c);
    return SubsystemShape{{2, d, d, 2}};
}

double ModelParams::energy_scale() const noexcept {
    return std::max({1.0, std::abs(J), std::abs(Jx), std::abs(Jy), std::abs(Jz), std::abs(h), std::abs(h0)});
}

SpinOperators spin_operators(std::size_t d) {
    const double j = 0.5 * static_cast<double>(d - 1);
    SpinOperators ops{ComplexMatrix(d, d), ComplexMatrix(d, d), ComplexMatrix(d, d)};
    for (std::size_t k = 0; k < d; ++k) ops.z(k, k) = j - static_cast<double>(k);
    // S+ |m> = sqrt(j(j+1) - m(m+1)) |m+1>; index k-1 has m+1.
    for (std::size_t k = 1; k < d; ++k) {
        const double m = j - static_cast<double>(k);
        const double amp = std::sqrt(j * (j + 1.0) - m * (m + 1.0));
        ops.x(k - 1, k) = 0.5 * amp;
        ops.x(k, k - 1) = 0.5 * amp;
        ops.y(k - 1, k) = cplx(0.0, -0.5 * amp);
        ops.y(k, k - 1) = cplx(0.0, 0.5 * amp);
    }
    return ops;
}

ModelParams params_from_xy(SpinCase c, double x, double y) {
    ModelParams p;
    p.spin_case = c;
    if (c == SpinCase::half_half) {
        p.J = -std::sin(x);
        p.Jz = -std::sin(y);
        p.Jx = 2.0 * std::cos(y);
        p.Jy = p.Jx;
    } else {
        p.J = std::sin(x);
        p.Jz = p.J;
        p.Jx = 2.0 * std::sin(y);
        p.Jy = p.Jx;
    }
    return p;
}

ComplexMatrix edge_hamiltonian(const ModelParams& p, double s, double s1) {
    const std::size_t d = heisenberg_dim(p.spin_case);
    const auto ops = spin_operators(d);
    const auto id = ComplexMatrix::identity(d);
    const auto id2 = ComplexMatrix::identity(d * d);
    const auto sz_sum = tensor_product(ops.z, id) + tensor_product(id, ops.z);

    ComplexMatrix h = sz_sum * cplx(p.J * (s + s1) + p.h);
    h += id2 * cplx(p.J * s * s1 + 0.5 * p.h0 * (s + s1));
    h += tensor_product(ops.x, ops.x) * cplx(p.Jx);
    h += tensor_product(ops.y, ops.y) * cplx(p.Jy);
    h += tensor_product(ops.z, ops.z) * cplx(p.Jz);
    return h;
}

std::string_view to_string(EdgeLevel l) {
    switch (l) {
        case EdgeLevel::phi1: return "phi1";
        case EdgeLevel::phi2: return "phi2";
        case EdgeLevel::phi3: return "phi3";
        case EdgeLevel::phi4: return "phi4";
        case EdgeLevel::plus1: return "phi1+";
        case EdgeLevel::minus1: return "phi1-";
        case EdgeLevel::plus2: return "phi2+";
        case EdgeLevel::minus2: return "phi2-";
        case EdgeLevel::plus3: return "phi3+";
        case EdgeLevel::minus3: return "phi3-";
        case EdgeLevel::plus4: return "phi4+";
        case EdgeLevel::minus4: return "phi4-";
        case EdgeLevel::five: return "phi5";
    }
    return "?";
}

EdgeSpectrum edge_spectrum(const ModelParams& p, double sigma_i, double sigma_i1) {
    return p.spin_case == SpinCase::half_half ? spectrum_half(p, sigma_i, sigma_i1)
                                              : spectrum_one(p, sigma_i, sigma_i1);
}

namespace {
constexpr std::array<std::pair<Phase, std::string_view>, 14> kPhaseNames{{
    {Phase::FM, "FM"},
    {Phase::FRI, "FRI"},
    {Phase::QFO_I, "QFO_I"},
    {Phase::QFO_II, "QFO_II"},
    {Phase::QFO_III, "QFO_III"},
    {Phase::QFO_IV, "QFO_IV"},
    {Phase::QFI_I, "QFI_I"},
    {Phase::QFI_II, "QFI_II"},
    {Phase::FRU, "FRU"},
    {Phase::FRU_I, "FRU_I"},
    {Phase::FRU_II, "FRU_II"},
    {Phase::FRU_III, "FRU_III"},
    {Phase::FRU_IV, "FRU_IV"},
    {Phase::DEGENERATE, "DEGENERATE"},
}};
}  // namespace

std::string_view to_string(Phase p) {
    for (auto [ph, name] : kPhaseNames)
        if (ph == p) return name;
    return "?";
}

std::optional<Phase> phase_from_string(std::string_view s) {
    for (auto [ph, name] : kPhaseNames)
        if (name == s) return ph;
    return std::nullopt;
}

GroundState cell_ground_state(const ModelParams& p) {
    constexpr std::array<std::pair<double, double>, 4> kPairs{{{0.5, 0.5}, {-0.5, -0.5}, {0.5, -0.5}, {-0.5, 0.5}}};
    std::array<EdgeSpectrum, 4> spectra;
    double emin = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < kPairs.size(); ++k) {
        spectra[k] = edge_spectrum(p, kPairs[k].first, kPairs[k].second);
        for (const auto& l : spectra[k].levels) emin = std::min(emin, l.energy);
    }
    const double tol = kTol.degeneracy * p.energy_scale();

    GroundState gs;
    const std::size_t d = heisenberg_dim(p.spin_case);
    const std::size_t dim = 4 * d * d;
    gs.rho = ComplexMatrix(dim, dim);
    for (std::size_t k = 0; k < kPairs.size(); ++k) {
        const auto [s, s1] = kPairs[k];
        for (const auto& l : spectra[k].levels) {
            if (l.energy > emin + tol) continue;
            gs.members.push_back({s, s1, l.tag, member_phase(p, s, s1, l, spectra[k].aux.singular)});
            // |sigma_i> (x) |edge> (x) |sigma_{i+1}>
            const std::size_t si = s > 0 ? 0 : 1;
            const std::size_t sj = s1 > 0 ? 0 : 1;
            std::vector<cplx> psi(dim, cplx{});
            for (std::size_t e = 0; e < d * d; ++e) psi[(si * d * d + e) * 2 + sj] = l.state[e];
            for (std::size_t r = 0; r < dim; ++r) {
                if (psi[r] == cplx{}) continue;
                for (std::size_t c = 0; c < dim; ++c) gs.rho(r, c) += psi[r] * std::conj(psi[c]);
            }
        }
    }
    gs.rho *= cplx(1.0 / static_cast<double>(gs.members.size()));

    gs.label.cell_energy = emin;
    gs.label.degeneracy = gs.members.size();
    gs.label.name = gs.members.front().phase;
    for (const auto& m : gs.members) {
        if (m.phase != gs.label.name) {
            gs.label.name = Phase::DEGENERATE;
            break;
        }
    }
    return gs;
}

std::vector<PhaseLabel> phase_label_grid(SpinCase c, std::span<const double> xs, std::span<const double> ys) {
    std::vector<PhaseLabel> out;
    out.reserve(xs.size() * ys.size());
    for (double y : ys)
        for (double x : xs) out.push_back(cell_ground_state(params_from_xy(c, x, y)).label);
    return out;
}

}  // namespace atih
