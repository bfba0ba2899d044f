#include "atih/phase_space.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <random>

#include "atih/model.hpp"

namespace atih {

namespace {

constexpr double kPi = std::numbers::pi;

void check_dim(std::size_t d) {
    if (d != 2 && d != 3) throw std::invalid_argument("phase space: dimension must be 2 or 3");
}

KernelBundle make_bundle(std::size_t d) {
    KernelBundle b;
    b.d = d;
    const double dd = static_cast<double>(d);
    b.norm = std::sqrt(dd * (dd + 1.0) * (dd - 1.0) / 2.0);
    std::vector<double> zeta(d, 1.0);
    zeta.back() = -(dd - 1.0);
    const double scale = std::sqrt(2.0 / (dd * (dd - 1.0)));
    for (double& z : zeta) z *= scale;
    b.parity_diag.resize(d);
    for (std::size_t k = 0; k < d; ++k) b.parity_diag[k] = 1.0 - b.norm * zeta[k];
    b.zeta = ComplexMatrix::diagonal(zeta);
    b.parity = ComplexMatrix::diagonal(b.parity_diag);
    const auto s = spin_operators(d);
    b.jy = s.y;
    b.jz = s.z;
    b.m.resize(d);
    for (std::size_t k = 0; k < d; ++k) b.m[k] = s.z(k, k).real();
    return b;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// exp(i t A) for Hermitian A
ComplexMatrix hermitian_exp_i(const ComplexMatrix& a, double t) {
    const auto eig = hermitian_eig(a);
    const std::size_t n = a.rows();
    ComplexMatrix out(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        const cplx ph = std::polar(1.0, t * eig.values[k]);
        for (std::size_t i = 0; i < n; ++i) {
            const cplx vi = eig.vectors(i, k) * ph;
            for (std::size_t j = 0; j < n; ++j) out(i, j) += vi * std::conj(eig.vectors(j, k));
        }
    }
    return out;
}

}  // namespace

const KernelBundle& kernel_bundle(std::size_t d) {
    if (d < 2) throw std::invalid_argument("kernel_bundle: d must be >= 2");
    static std::mutex mu;
    static std::map<std::size_t, std::unique_ptr<KernelBundle>> cache;
    std::lock_guard lock(mu);
    auto& slot = cache[d];
    if (!slot) slot = std::make_unique<KernelBundle>(make_bundle(d));
    return *slot;
}

AngleSet AngleSet::equal(double theta, double phi, std::size_t parties) {
    AngleSet a;
    a.theta.assign(parties, theta);
    a.phi.assign(parties, phi);
    a.equal_angle = true;
    return a;
}

PartyKernel party_kernel(std::size_t d, double u, double v, double phi) {
    check_dim(d);
    PartyKernel pk;
    pk.d = d;
    const auto& b = kernel_bundle(d);
    // R = exp(i Jy 2 theta) in terms of u = cos 2theta, v = sin 2theta
    std::array<double, 9> r{};
    if (d == 2) {
        const double c = std::sqrt(std::max(0.0, 0.5 * (1.0 + u)));
        const double s = std::sqrt(std::max(0.0, 0.5 * (1.0 - u)));
        r = {c, s, 0, -s, c, 0, 0, 0, 0};
    } else {
        const double w = v / std::numbers::sqrt2;
        r = {0.5 * (1.0 + u), w, 0.5 * (1.0 - u), -w, u, w, 0.5 * (1.0 - u), -w, 0.5 * (1.0 + u)};
    }
    const double inv_d = 1.0 / static_cast<double>(d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i; j < d; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < d; ++k) acc += r[i * 3 + k] * b.parity_diag[k] * r[j * 3 + k];
            pk.k[i * d + j] = pk.k[j * d + i] = acc * inv_d;
        }
    for (int q = -2; q <= 2; ++q) pk.phase[q + 2] = std::polar(1.0, q * phi);
    return pk;
}

ComplexMatrix kernel_single(std::size_t d, double theta, double phi) {
    const auto pk = party_kernel(d, std::cos(2.0 * theta), std::sin(2.0 * theta), phi);
    ComplexMatrix out(d, d);
    for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = 0; b < d; ++b) {
            // m_a - m_b = b - a in the descending-m basis
            const int dm = static_cast<int>(b) - static_cast<int>(a);
            out(a, b) = pk.k[a * d + b] * pk.phase[dm + 2];
        }
    return out;
}

namespace reference {

ComplexMatrix kernel_single(std::size_t d, double theta, double phi, double psi) {
    const auto& b = kernel_bundle(d);
    const auto u = hermitian_exp_i(b.jz, phi) * hermitian_exp_i(b.jy, 2.0 * theta) * hermitian_exp_i(b.jz, psi);
    return u * b.parity * u.adjoint() * cplx(1.0 / static_cast<double>(d));
}

}  // namespace reference

ComplexMatrix kernel_composite(const SubsystemShape& shape, const AngleSet& angles) {
    const std::size_t n = shape.parties();
    if (n == 0) throw std::invalid_argument("kernel_composite: empty shape");
    const bool shared = angles.equal_angle && !angles.theta.empty() && !angles.phi.empty();
    if (!shared && (angles.theta.size() != n || angles.phi.size() != n))
        throw std::invalid_argument("kernel_composite: angle count does not match party count");
    auto angle = [&](std::size_t k) {
        return shared ? std::pair{angles.theta[0], angles.phi[0]} : std::pair{angles.theta[k], angles.phi[k]};
    };
    auto [t0, p0] = angle(0);
    ComplexMatrix out = kernel_single(shape.dims[0], t0, p0);
    for (std::size_t k = 1; k < n; ++k) {
        auto [t, p] = angle(k);
        out = tensor_product(out, kernel_single(shape.dims[k], t, p));
    }
    return out;
}

double wigner_value(const ComplexMatrix& rho, const SubsystemShape& shape, const AngleSet& angles) {
    shape.check_matches(rho.rows());
    const auto delta = kernel_composite(shape, angles);
    const std::size_t n = rho.rows();
    cplx w = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) w += rho(i, j) * delta(j, i);
    if (std::abs(w.imag()) >= kTol.imag_residue) throw NotHermitianError(std::abs(w.imag()));
    return w.real();
}

double wigner_value(const CellState& s, const AngleSet& angles) { return wigner_value(s.rho, s.shape, angles); }

// ---------------------------------------------------------------------------
// Sparse evaluator

WignerEvaluator::WignerEvaluator(const ComplexMatrix& rho, const SubsystemShape& shape) : shape_(shape) {
    shape_.check_matches(rho.rows());
    if (shape_.parties() == 0 || shape_.parties() > 4)
        throw std::invalid_argument("WignerEvaluator: between 1 and 4 parties supported");
    for (auto d : shape_.dims) check_dim(d);
    const double defect = rho.hermiticity_defect();
    if (defect >= kTol.imag_residue) throw NotHermitianError(defect);

    const std::size_t n = rho.rows();
    const std::size_t np = shape_.parties();
    auto split = [&](std::size_t idx) {
        std::array<std::uint8_t, 4> out{};
        for (std::size_t k = np; k-- > 0;) {
            out[k] = static_cast<std::uint8_t>(idx % shape_.dims[k]);
            idx /= shape_.dims[k];
        }
        return out;
    };
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = r; c < n; ++c) {
            const cplx v = rho(r, c);
            if (v == cplx(0.0)) continue;
            Entry e;
            e.diagonal = r == c;
            e.weight = e.diagonal ? cplx(v.real()) : 2.0 * v;
            e.row = split(r);
            e.col = split(c);
            for (std::size_t k = 0; k < np; ++k) {
                e.dm[k] = static_cast<std::int8_t>(static_cast<int>(e.row[k]) - static_cast<int>(e.col[k]));
                e.charge += e.dm[k];
            }
            max_charge_ = std::max(max_charge_, std::abs(e.charge));
            entries_.push_back(e);
        }
}

double WignerEvaluator::operator()(std::span<const PartyKernel> parties) const {
    const std::size_t np = shape_.parties();
    double w = 0.0;
    for (const auto& e : entries_) {
        double amp = 1.0;
        cplx ph = 1.0;
        for (std::size_t k = 0; k < np; ++k) {
            const auto& pk = parties[k];
            amp *= pk.k[e.col[k] * pk.d + e.row[k]];
            if (e.dm[k] != 0) ph *= pk.phase[e.dm[k] + 2];
        }
        w += amp * (e.weight * ph).real();
    }
    return w;
}

void WignerEvaluator::equal_angle_coefficients(const PartyKernel& k2, const PartyKernel& k3,
                                               std::vector<cplx>& out) const {
    const std::size_t np = shape_.parties();
    out.assign(2 * static_cast<std::size_t>(max_charge_) + 1, cplx(0.0));
    for (const auto& e : entries_) {
        double amp = 1.0;
        for (std::size_t k = 0; k < np; ++k) {
            const auto& pk = shape_.dims[k] == 2 ? k2 : k3;
            amp *= pk.k[e.col[k] * pk.d + e.row[k]];
        }
        out[static_cast<std::size_t>(e.charge + max_charge_)] += amp * e.weight;
    }
}

void WignerEvaluator::equal_angle_coefficients(double u, double v, std::vector<cplx>& out) const {
    equal_angle_coefficients(party_kernel(2, u, v, 0.0), party_kernel(3, u, v, 0.0), out);
}

double WignerEvaluator::equal_angle_value(std::span<const cplx> coeffs, double phi) {
    const int q_max = static_cast<int>(coeffs.size() / 2);
    double w = coeffs[static_cast<std::size_t>(q_max)].real();
    for (int q = 1; q <= q_max; ++q) {
        w += (std::polar(1.0, q * phi) * coeffs[static_cast<std::size_t>(q_max + q)]).real();
        w += (std::polar(1.0, -q * phi) * coeffs[static_cast<std::size_t>(q_max - q)]).real();
    }
    return w;
}

// ---------------------------------------------------------------------------
// Equal-angle slice

double wigner_average_equal_angle(const ComplexMatrix& rho, const SubsystemShape& shape) {
    const WignerEvaluator ev(rho, shape);
    // only q = 0 survives the phi integral; B_0 is a polynomial in u = cos 2theta
    const auto& rule = gauss_legendre_rule(24);
    std::vector<cplx> coeffs;
    double acc = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
        const double u = rule.nodes[k];
        ev.equal_angle_coefficients(u, std::sqrt(1.0 - u * u), coeffs);
        acc += rule.weights[k] * coeffs[static_cast<std::size_t>(ev.max_charge())].real();
    }
    return 0.5 * acc;
}

EqualAngleMap equal_angle_map(const ComplexMatrix& rho, const SubsystemShape& shape, std::size_t n_theta,
                              std::size_t n_phi) {
    if (n_theta < 2 || n_phi < 2) throw std::invalid_argument("equal_angle_map: resolution must be at least 2x2");
    const WignerEvaluator ev(rho, shape);
    EqualAngleMap m;
    m.n_theta = n_theta;
    m.n_phi = n_phi;
    m.values.resize(n_theta * n_phi);
    std::vector<cplx> coeffs;
    for (std::size_t i = 0; i < n_theta; ++i) {
        const double theta = (static_cast<double>(i) + 0.5) * (kPi / 2.0) / static_cast<double>(n_theta);
        ev.equal_angle_coefficients(std::cos(2.0 * theta), std::sin(2.0 * theta), coeffs);
        for (std::size_t j = 0; j < n_phi; ++j) {
            const double phi = 2.0 * kPi * static_cast<double>(j) / static_cast<double>(n_phi);
            m.values[i * n_phi + j] = WignerEvaluator::equal_angle_value(coeffs, phi);
        }
    }
    m.average = wigner_average_equal_angle(rho, shape);
    return m;
}

EqualAngleMap equal_angle_map(const CellState& s, std::size_t n_theta, std::size_t n_phi) {
    return equal_angle_map(s.rho, s.shape, n_theta, n_phi);
}

namespace {

// Panel edges and 3-point Gauss-Legendre nodes on [0, pi/2], with the
// single-party kernels at phi = 0. Cached per panel count.
struct ThetaGrid {
    std::size_t panels = 0;
    std::vector<double> edges;         // panels + 1
    std::vector<double> nodes;         // 3 per panel
    std::vector<double> node_weights;  // GL weight * sin(2 theta) / pi
    std::vector<PartyKernel> edge_k2, edge_k3, node_k2, node_k3;
};

const ThetaGrid& theta_grid(std::size_t panels) {
    static std::mutex mu;
    static std::map<std::size_t, std::unique_ptr<ThetaGrid>> cache;
    std::lock_guard lock(mu);
    auto& slot = cache[panels];
    if (slot) return *slot;
    auto g = std::make_unique<ThetaGrid>();
    g->panels = panels;
    const double h = (kPi / 2.0) / static_cast<double>(panels);
    for (std::size_t p = 0; p <= panels; ++p) {
        const double t = p == panels ? kPi / 2.0 : h * static_cast<double>(p);
        g->edges.push_back(t);
        g->edge_k2.push_back(party_kernel(2, std::cos(2 * t), std::sin(2 * t), 0.0));
        g->edge_k3.push_back(party_kernel(3, std::cos(2 * t), std::sin(2 * t), 0.0));
    }
    for (std::size_t p = 0; p < panels; ++p) {
        const auto rule = gauss_legendre_rule(3, g->edges[p], g->edges[p + 1]);
        for (std::size_t k = 0; k < 3; ++k) {
            const double t = rule.nodes[k];
            g->nodes.push_back(t);
            g->node_weights.push_back(rule.weights[k] * std::sin(2 * t) / kPi);
            g->node_k2.push_back(party_kernel(2, std::cos(2 * t), std::sin(2 * t), 0.0));
            g->node_k3.push_back(party_kernel(3, std::cos(2 * t), std::sin(2 * t), 0.0));
        }
    }
    slot = std::move(g);
    return *slot;
}

// Regula falsi with the Illinois modification on a bracketing interval.
double bracketed_root(const std::function<double(double)>& f, double a, double fa, double b, double fb) {
    int side = 0;
    for (int it = 0; it < 100; ++it) {
        const double c = (a * fb - b * fa) / (fb - fa);
        const double fc = f(c);
        if (fc == 0.0 || std::abs(b - a) < 1e-15) return c;
        if ((fc > 0) == (fb > 0)) {
            b = c;
            fb = fc;
            if (side == -1) fa *= 0.5;
            side = -1;
        } else {
            a = c;
            fa = fc;
            if (side == 1) fb *= 0.5;
            side = 1;
        }
    }
    return 0.5 * (a + b);
}

// Adaptive 7/15-point Gauss-Kronrod.
double adaptive_kronrod(const std::function<double(double)>& f, double a, double b, double tol, int depth) {
    static constexpr std::array<double, 8> xgk{
        0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
        0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
        0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
        0.207784955007898467600689403773245, 0.0};
    static constexpr std::array<double, 8> wgk{
        0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
        0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
        0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
        0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
    static constexpr std::array<double, 4> wg{0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                              0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    const double fc = f(c);
    double kron = wgk[7] * fc, gauss = wg[3] * fc;
    for (std::size_t k = 0; k < 7; ++k) {
        const double s = f(c - h * xgk[k]) + f(c + h * xgk[k]);
        kron += wgk[k] * s;
        if (k % 2 == 1) gauss += wg[k / 2] * s;
    }
    kron *= h;
    gauss *= h;
    if (std::abs(kron - gauss) <= tol || depth >= 40) return kron;
    return adaptive_kronrod(f, a, c, 0.5 * tol, depth + 1) + adaptive_kronrod(f, c, b, 0.5 * tol, depth + 1);
}

}  // namespace

NegativityEstimate negativity_equal_angle(const ComplexMatrix& rho, const SubsystemShape& shape, std::size_t n_theta,
                                          std::size_t n_phi) {
    if (n_theta < 32 || n_phi < 32)
        throw std::invalid_argument("negativity_equal_angle: resolution must be at least 32x32");
    const WignerEvaluator ev(rho, shape);
    const auto& g = theta_grid(n_theta);

    std::vector<std::vector<cplx>> edge_c(g.edges.size()), node_c(g.nodes.size());
    for (std::size_t p = 0; p < g.edges.size(); ++p) ev.equal_angle_coefficients(g.edge_k2[p], g.edge_k3[p], edge_c[p]);
    for (std::size_t p = 0; p < g.nodes.size(); ++p) ev.equal_angle_coefficients(g.node_k2[p], g.node_k3[p], node_c[p]);

    std::vector<cplx> scratch;
    // theta integral of max(0, -W) at fixed phi
    auto slice = [&](double phi) {
        auto w_at = [&](double t) {
            ev.equal_angle_coefficients(std::cos(2 * t), std::sin(2 * t), scratch);
            return WignerEvaluator::equal_angle_value(scratch, phi);
        };
        auto negative_part = [&](double a, double b) {
            const auto rule = gauss_legendre_rule(3, a, b);
            double acc = 0.0;
            for (std::size_t k = 0; k < 3; ++k)
                acc += rule.weights[k] * std::max(0.0, -w_at(rule.nodes[k])) * std::sin(2 * rule.nodes[k]) / kPi;
            return acc;
        };
        double acc = 0.0;
        double w_lo = WignerEvaluator::equal_angle_value(edge_c[0], phi);
        for (std::size_t p = 0; p < g.panels; ++p) {
            const double w_hi = WignerEvaluator::equal_angle_value(edge_c[p + 1], phi);
            const double a = g.edges[p], b = g.edges[p + 1];
            if ((w_lo < 0.0 && w_hi > 0.0) || (w_lo > 0.0 && w_hi < 0.0)) {
                const double root = bracketed_root(w_at, a, w_lo, b, w_hi);
                acc += negative_part(a, root) + negative_part(root, b);
            } else {
                for (std::size_t k = 3 * p; k < 3 * p + 3; ++k)
                    acc += g.node_weights[k] * std::max(0.0, -WignerEvaluator::equal_angle_value(node_c[k], phi));
            }
            w_lo = w_hi;
        }
        return acc;
    };

    double total = 0.0;
    if (ev.phi_independent()) {
        total = 2.0 * kPi * slice(0.0);
    } else {
        // the slice integral has square-root edges where the negative region
        // ends in phi, so each phi panel is refined adaptively
        const double h = 2.0 * kPi / static_cast<double>(n_phi);
        for (std::size_t j = 0; j < n_phi; ++j)
            total += adaptive_kronrod(slice, h * static_cast<double>(j), h * static_cast<double>(j + 1), 1e-12, 0);
    }
    NegativityEstimate out;
    out.value = total;
    out.method = NegativityMethod::quadrature_2d;
    return out;
}

NegativityEstimate negativity_equal_angle(const CellState& s, std::size_t n_theta, std::size_t n_phi) {
    return negativity_equal_angle(s.rho, s.shape, n_theta, n_phi);
}

// ---------------------------------------------------------------------------
// Monte Carlo

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t point, std::uint64_t block, McTag tag) {
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ point);
    h = splitmix64(h ^ block);
    return splitmix64(h ^ static_cast<std::uint64_t>(tag));
}

namespace {

enum class Sampling { sphere_full, sphere_equal, box_full };
enum class Integrand { negative_part, value };

struct BlockStats {
    std::uint64_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;
};

BlockStats merge(const BlockStats& a, const BlockStats& b) {
    if (a.n == 0) return b;
    if (b.n == 0) return a;
    BlockStats out;
    out.n = a.n + b.n;
    const double delta = b.mean - a.mean;
    const double na = static_cast<double>(a.n), nb = static_cast<double>(b.n), n = static_cast<double>(out.n);
    out.mean = a.mean + delta * nb / n;
    out.m2 = a.m2 + b.m2 + delta * delta * na * nb / n;
    return out;
}

NegativityEstimate run_mc(const ComplexMatrix& rho, const SubsystemShape& shape, const McOptions& opt, McTag tag,
                          Sampling sampling, Integrand integrand, double weight, NegativityMethod method) {
    if (opt.samples < 100) throw std::invalid_argument("Monte Carlo: at least 100 samples required");
    const WignerEvaluator ev(rho, shape);
    const std::size_t np = shape.parties();
    const std::uint64_t blocks = (opt.samples + kMcBlock - 1) / kMcBlock;
    std::vector<BlockStats> stats(blocks);

    auto run_block = [&](std::uint64_t blk) {
        std::mt19937_64 rng(stream_seed(opt.seed, opt.point, blk, tag));
        const std::uint64_t begin = blk * kMcBlock;
        const std::uint64_t end = std::min<std::uint64_t>(opt.samples, begin + kMcBlock);
        std::array<PartyKernel, 4> ks;
        BlockStats s;
        auto draw = [&](std::size_t d) {
            double u, v;
            if (sampling == Sampling::box_full) {
                const double theta = 0.5 * kPi * uniform53(rng());
                u = std::cos(2 * theta);
                v = std::sin(2 * theta);
            } else {
                u = 2.0 * uniform53(rng()) - 1.0;
                v = std::sqrt(std::max(0.0, 1.0 - u * u));
            }
            const double phi = 2.0 * kPi * uniform53(rng());
            return party_kernel(d, u, v, phi);
        };
        for (std::uint64_t i = begin; i < end; ++i) {
            if (sampling == Sampling::sphere_equal) {
                double u = 2.0 * uniform53(rng()) - 1.0;
                const double v = std::sqrt(std::max(0.0, 1.0 - u * u));
                const double phi = 2.0 * kPi * uniform53(rng());
                PartyKernel k2{}, k3{};
                bool have2 = false, have3 = false;
                for (std::size_t k = 0; k < np; ++k) {
                    if (shape.dims[k] == 2) {
                        if (!have2) k2 = party_kernel(2, u, v, phi), have2 = true;
                        ks[k] = k2;
                    } else {
                        if (!have3) k3 = party_kernel(3, u, v, phi), have3 = true;
                        ks[k] = k3;
                    }
                }
            } else {
                for (std::size_t k = 0; k < np; ++k) ks[k] = draw(shape.dims[k]);
            }
            const double w = ev(std::span<const PartyKernel>(ks.data(), np));
            const double x = integrand == Integrand::negative_part ? 0.5 * (std::abs(w) - w) : w;
            ++s.n;
            const double delta = x - s.mean;
            s.mean += delta / static_cast<double>(s.n);
            s.m2 += delta * (x - s.mean);
        }
        stats[blk] = s;
    };

    const auto nblocks = static_cast<std::int64_t>(blocks);
#pragma omp parallel for schedule(static) if (opt.parallel)
    for (std::int64_t blk = 0; blk < nblocks; ++blk) run_block(static_cast<std::uint64_t>(blk));

    BlockStats total;
    for (const auto& s : stats) total = merge(total, s);
    const double n = static_cast<double>(total.n);
    NegativityEstimate out;
    out.value = weight * total.mean;
    out.stderr_ = weight * std::sqrt(std::max(0.0, total.m2) / (n - 1.0)) / std::sqrt(n);
    out.method = method;
    out.samples = opt.samples;
    out.seed = opt.seed;
    return out;
}

double dimension_product(const SubsystemShape& shape) {
    double p = 1.0;
    for (auto d : shape.dims) p *= static_cast<double>(d);
    return p;
}

}  // namespace

NegativityEstimate negativity_full_mc(const ComplexMatrix& rho, const SubsystemShape& shape, const McOptions& opt) {
    return run_mc(rho, shape, opt, McTag::negativity_full, Sampling::sphere_full, Integrand::negative_part,
                  dimension_product(shape), NegativityMethod::monte_carlo_full);
}

NegativityEstimate negativity_full_mc(const CellState& s, const McOptions& opt) {
    return negativity_full_mc(s.rho, s.shape, opt);
}

NegativityEstimate integral_full_mc(const ComplexMatrix& rho, const SubsystemShape& shape, const McOptions& opt) {
    return run_mc(rho, shape, opt, McTag::integral_full, Sampling::sphere_full, Integrand::value,
                  dimension_product(shape), NegativityMethod::monte_carlo_full);
}

NegativityEstimate negativity_equal_angle_mc(const ComplexMatrix& rho, const SubsystemShape& shape,
                                             const McOptions& opt) {
    return run_mc(rho, shape, opt, McTag::negativity_equal, Sampling::sphere_equal, Integrand::negative_part, 2.0,
                  NegativityMethod::monte_carlo_equal_angle);
}

NegativityEstimate wigner_avg_full_mc(const ComplexMatrix& rho, const SubsystemShape& shape, const McOptions& opt) {
    return run_mc(rho, shape, opt, McTag::average_box, Sampling::box_full, Integrand::value, 1.0,
                  NegativityMethod::monte_carlo_full);
}

}  // namespace atih
