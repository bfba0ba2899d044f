#include "atih/cell_state.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace atih {

namespace {

const ComplexMatrix& party_operator(int party, int op, SpinCase c) {
    static const std::array<ComplexMatrix, 4> pauli{
        ComplexMatrix::identity(2),
        ComplexMatrix{{0, 1}, {1, 0}},
        ComplexMatrix{{0, cplx(0, -1)}, {cplx(0, 1), 0}},
        ComplexMatrix{{1, 0}, {0, -1}},
    };
    static const auto spin_set = [](std::size_t d) {
        const auto s = spin_operators(d);
        return std::array<ComplexMatrix, 4>{ComplexMatrix::identity(d), s.x, s.y, s.z};
    };
    static const auto half = spin_set(2);
    static const auto one = spin_set(3);
    if (party == 0 || party == 3) return pauli[op];
    return c == SpinCase::half_half ? half[op] : one[op];
}

}  // namespace

std::string_view to_string(StateMode m) {
    return m == StateMode::correlator_assembled ? "correlator_assembled" : "ground_state_oracle";
}

std::optional<StateMode> state_mode_from_string(std::string_view s) {
    if (s == "correlator_assembled") return StateMode::correlator_assembled;
    if (s == "ground_state_oracle") return StateMode::ground_state_oracle;
    return std::nullopt;
}

std::vector<ExpansionTerm> expansion_terms(const CorrelatorSet& c) {
    // Pauli expectations of the Ising parties
    const double z = 2.0 * c.sigma_z;
    const double zz = 4.0 * c.sigma_sigma;
    const double sz_z = 2.0 * c.Sz_sigma;
    constexpr int I = 0, X = 1, Y = 2, Z = 3;
    return {
        {{I, I, I, I}, 1.0},
        {{Z, I, I, I}, z},
        {{I, I, I, Z}, z},
        {{I, Z, I, I}, c.Sz},
        {{I, I, Z, I}, c.Sz},
        {{Z, I, I, Z}, zz},
        {{I, Z, Z, I}, c.SzSz},
        {{I, X, X, I}, c.SxSx},
        {{I, Y, Y, I}, c.SxSx},
        {{I, I, Z, Z}, sz_z},
        {{I, Z, I, Z}, sz_z},
        {{Z, Z, I, I}, sz_z},
        {{Z, I, Z, I}, sz_z},
        {{I, X, X, Z}, c.SxSx * z},
        {{I, Y, Y, Z}, c.SxSx * z},
        {{I, Z, Z, Z}, c.SzSz * z},
        {{Z, X, X, I}, c.SxSx * z},
        {{Z, Y, Y, I}, c.SxSx * z},
        {{Z, Z, Z, I}, c.SzSz * z},
        {{Z, Z, I, Z}, zz * c.Sz},
        {{Z, I, Z, Z}, zz * c.Sz},
        {{Z, X, X, Z}, zz * c.SxSx},
        {{Z, Y, Y, Z}, zz * c.SxSx},
        {{Z, Z, Z, Z}, zz * c.SzSz},
    };
}

ComplexMatrix expansion_operator(const std::array<int, 4>& ops, SpinCase spin_case) {
    ComplexMatrix out = party_operator(0, ops[0], spin_case);
    for (int k = 1; k < 4; ++k) out = tensor_product(out, party_operator(k, ops[k], spin_case));
    return out;
}

CellState assemble_density_matrix(const CorrelatorSet& c, SpinCase spin_case) {
    const auto shape = cell_shape(spin_case);
    const std::size_t n = shape.total();
    ComplexMatrix rho(n, n);
    for (const auto& t : expansion_terms(c)) {
        if (t.coefficient == 0.0) continue;
        double norm = 1.0;
        for (int k = 0; k < 4; ++k) {
            const auto& op = party_operator(k, t.ops[k], spin_case);
            norm *= (op * op).trace().real();
        }
        rho += expansion_operator(t.ops, spin_case) * cplx(t.coefficient / norm);
    }
    CellState s;
    s.rho = std::move(rho);
    s.shape = shape;
    s.mode = StateMode::correlator_assembled;
    s.beta = c.beta;
    s.min_eigenvalue = hermitian_eigenvalues(s.rho).front();
    return s;
}

CellState assembled_state(const ModelParams& p, double beta) {
    auto s = assemble_density_matrix(correlator_set(p, beta), p.spin_case);
    s.source_params = p;
    return s;
}

CellState ground_state_oracle(const ModelParams& p) {
    auto gs = cell_ground_state(p);
    CellState s;
    s.rho = std::move(gs.rho);
    s.shape = cell_shape(p.spin_case);
    s.mode = StateMode::ground_state_oracle;
    s.source_params = p;
    s.min_eigenvalue = hermitian_eigenvalues(s.rho).front();
    return s;
}

StateDiagnostics validate_state(const CellState& s) {
    StateDiagnostics d;
    s.shape.check_matches(s.rho.rows());
    d.hermiticity_defect = s.rho.hermiticity_defect();
    d.trace_defect = std::abs(s.rho.trace() - cplx(1.0));
    const auto herm = (s.rho + s.rho.adjoint()) * cplx(0.5);
    d.min_eigenvalue = hermitian_eigenvalues(herm).front();
    d.psd = d.min_eigenvalue >= -kTol.psd_clamp;
    return d;
}

CellState psd_project(const CellState& s, double tol, bool* warning) {
    const auto herm = (s.rho + s.rho.adjoint()) * cplx(0.5);
    auto eig = hermitian_eig(herm);
    const double lo = eig.values.front();
    if (lo < -kTol.psd_hard) throw NotPsdError(lo, "psd_project");
    if (warning) *warning = lo < -tol;
    CellState out = s;
    if (lo >= 0.0) {
        out.min_eigenvalue = lo;
        return out;
    }
    double total = 0.0;
    for (double& v : eig.values) {
        v = std::max(v, 0.0);
        total += v;
    }
    const std::size_t n = herm.rows();
    ComplexMatrix r(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        const double w = eig.values[k] / total;
        if (w == 0.0) continue;
        for (std::size_t i = 0; i < n; ++i) {
            const cplx vi = eig.vectors(i, k) * w;
            for (std::size_t j = 0; j < n; ++j) r(i, j) += vi * std::conj(eig.vectors(j, k));
        }
    }
    // exact unit trace
    double tr = 0.0;
    for (std::size_t i = 0; i < n; ++i) tr += r(i, i).real();
    r *= cplx(1.0 / tr);
    out.rho = std::move(r);
    out.min_eigenvalue = 0.0;
    return out;
}

double fidelity(const ComplexMatrix& a, const ComplexMatrix& b) {
    const auto sa = psd_sqrt((a + a.adjoint()) * cplx(0.5));
    auto m = sa * b * sa;
    m = (m + m.adjoint()) * cplx(0.5);
    double tr = 0.0;
    for (double v : hermitian_eigenvalues(m)) tr += std::sqrt(std::max(v, 0.0));
    return tr * tr;
}

namespace {

void put_le(std::ostream& os, double v) {
    std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
    char buf[8];
    for (int k = 0; k < 8; ++k) buf[k] = static_cast<char>((bits >> (8 * k)) & 0xffu);
    os.write(buf, 8);
}

double get_le(std::istream& is) {
    unsigned char buf[8];
    is.read(reinterpret_cast<char*>(buf), 8);
    if (!is) throw std::runtime_error("read_rho_binary: truncated file");
    std::uint64_t bits = 0;
    for (int k = 0; k < 8; ++k) bits |= static_cast<std::uint64_t>(buf[k]) << (8 * k);
    return std::bit_cast<double>(bits);
}

}  // namespace

void write_rho_binary(const ComplexMatrix& rho, const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("write_rho_binary: cannot open " + path.string());
    for (const auto& z : rho.data()) {
        put_le(os, z.real());
        put_le(os, z.imag());
    }
}

ComplexMatrix read_rho_binary(const std::filesystem::path& path, std::size_t dim) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("read_rho_binary: cannot open " + path.string());
    ComplexMatrix rho(dim, dim);
    for (auto& z : rho.data()) {
        const double re = get_le(is);
        const double im = get_le(is);
        z = cplx(re, im);
    }
    return rho;
}

}  // namespace atih
