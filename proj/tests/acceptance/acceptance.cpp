// Acceptance checks. Each criterion prints indented detail lines followed by
// exactly one "PASS <id> ..." or "FAIL <id> ..." line; the exit status is 0
// only for PASS.
//
//   atih_acceptance <id> [--cache DIR]        id: 1 2 3 4 5 6 7a 7b 7c 7d 8a 8b 9
//   atih_acceptance prepare half|one [--cache DIR]
//   atih_acceptance all [--cache DIR]
//
// Criteria 7 and 8 read 64x64 scans from DIR/half and DIR/one; prepare writes
// them and reuses an existing scan whose manifest matches the configuration.

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <set>

#include "atih/entanglement.hpp"
#include "atih/phase_space.hpp"
#include "atih/scan.hpp"
#include "oracle.hpp"

namespace {

using namespace atih;
namespace fs = std::filesystem;

constexpr double kPi = std::numbers::pi;

struct Verdict {
    bool pass = false;
    std::string summary;
};

template <class... A>
void detail(const char* fmt, A... args) {
    std::printf("  ");
    std::printf(fmt, args...);
    std::printf("\n");
}

void detail(const char* text) { std::printf("  %s\n", text); }

std::string format(const char* fmt, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, fmt, args...);
    return buf;
}

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

ModelParams random_params(SpinCase c, std::mt19937_64& rng, double scale) {
    std::uniform_real_distribution<double> u(-scale, scale);
    ModelParams p;
    p.spin_case = c;
    p.J = u(rng);
    p.Jx = u(rng);
    p.Jy = c == SpinCase::half_half ? u(rng) : p.Jx;
    p.Jz = u(rng);
    p.h = u(rng);
    p.h0 = u(rng);
    return p;
}

ComplexMatrix pure(const std::vector<cplx>& v) {
    const std::size_t n = v.size();
    ComplexMatrix r(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) r(i, j) = v[i] * std::conj(v[j]);
    return r;
}

std::vector<cplx> random_vector(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    std::vector<cplx> v(n);
    double norm = 0.0;
    for (auto& x : v) norm += std::norm(x = cplx(g(rng), g(rng)));
    for (auto& x : v) x /= std::sqrt(norm);
    return v;
}

ComplexMatrix local_unitary(const SubsystemShape& shape, std::mt19937_64& rng) {
    ComplexMatrix u = oracle::random_unitary(shape.dims[0], rng);
    for (std::size_t k = 1; k < shape.parties(); ++k) u = tensor_product(u, oracle::random_unitary(shape.dims[k], rng));
    return u;
}

// ---------------------------------------------------------------- 1

Verdict criterion_1() {
    Stopwatch sw;
    constexpr std::array<std::pair<double, double>, 4> pairs{{{0.5, 0.5}, {0.5, -0.5}, {-0.5, 0.5}, {-0.5, -0.5}}};
    double worst_e = 0.0, worst_r = 0.0;
    for (auto c : {SpinCase::half_half, SpinCase::half_one}) {
        std::mt19937_64 rng(c == SpinCase::half_half ? 1001 : 1002);
        double max_e = 0.0, max_r = 0.0;
        for (int t = 0; t < 100; ++t) {
            const auto p = random_params(c, rng, 2.0);
            const auto [s, s1] = pairs[t % 4];
            const auto spec = edge_spectrum(p, s, s1);
            const auto h = edge_hamiltonian(p, s, s1);
            std::vector<double> e;
            for (const auto& l : spec.levels) e.push_back(l.energy);
            std::sort(e.begin(), e.end());
            max_e = std::max(max_e, oracle::max_diff(e, oracle::eigenvalues(h)));
            for (const auto& l : spec.levels) {
                const auto hv = h * ComplexMatrix::column(l.state);
                double res = 0.0;
                for (std::size_t k = 0; k < l.state.size(); ++k) res += std::norm(hv(k, 0) - l.energy * l.state[k]);
                max_r = std::max(max_r, std::sqrt(res));
            }
        }
        detail("%-9s 100 draws: max |E - E_dense| = %.3e, max |H v - E v| = %.3e", std::string(to_string(c)).c_str(),
               max_e, max_r);
        worst_e = std::max(worst_e, max_e);
        worst_r = std::max(worst_r, max_r);
    }
    const double t = sw.seconds();
    return {worst_e < 1e-10 && worst_r < 1e-10 && t < 5.0,
            format("spectrum exactness: energy %.2e, residual %.2e (tol 1e-10), %.2f s (limit 5 s)", worst_e, worst_r,
                   t)};
}

// ---------------------------------------------------------------- 2

Verdict criterion_2() {
    Stopwatch sw;
    int sets = 0, gapped = 0, non_monotone = 0;
    double worst_f = 0.0, worst_ss = 0.0;
    for (auto c : {SpinCase::half_half, SpinCase::half_one}) {
        std::mt19937_64 rng(c == SpinCase::half_half ? 2001 : 2002);
        for (int t = 0; t < 10; ++t, ++sets) {
            const auto p = random_params(c, rng, 1.5);
            const double f = free_energy(p, 1.0);
            double prev = std::numeric_limits<double>::infinity(), gap = 0.0;
            bool monotone = true;
            oracle::RingResult ring;
            for (int n = 4; n <= 10; ++n) {
                ring = oracle::ring_enumeration(p, 1.0, n);
                gap = std::abs(-ring.log_z / n - f);
                if (gap > prev * (1.0 + 1e-9) + 1e-14) monotone = false;
                prev = gap;
            }
            non_monotone += monotone ? 0 : 1;
            const double ratio = transfer_data(p, 1.0).ratio();
            const double ss_gap = std::abs(ring.sigma_sigma - correlator_exact(p, 1.0, Correlator::sigma_sigma, 1));
            const bool is_gapped = std::abs(ratio) <= 0.2;
            if (is_gapped) {
                ++gapped;
                worst_f = std::max(worst_f, gap);
                worst_ss = std::max(worst_ss, ss_gap);
            }
            detail("%-9s set %2d: lambda-/lambda+ = %+.3f, F gap(N=10) = %.2e, <ss> gap(N=10) = %.2e, %s%s",
                   std::string(to_string(c)).c_str(), t, ratio, gap, ss_gap, monotone ? "monotone" : "NOT monotone",
                   is_gapped ? ", gapped" : "");
        }
    }
    const double secs = sw.seconds();
    const bool ok = non_monotone == 0 && gapped > 0 && worst_f < 1e-6 && worst_ss < 1e-6 && secs < 30.0;
    return {ok, format("ring enumeration: %d/%d sets monotone, %d gapped (|ratio| <= 0.2) with F gap %.2e and <ss> "
                       "gap %.2e (tol 1e-6), %.1f s (limit 30 s)",
                       sets - non_monotone, sets, gapped, worst_f, worst_ss, secs)};
}

// ---------------------------------------------------------------- 3

struct PartyRule {
    std::vector<double> theta, phi, weight;
};

// Gauss-Legendre in theta, trapezoid in phi, per-party measure (d/2pi) sin(2 theta).
PartyRule party_rule(std::size_t d, std::size_t n_theta, std::size_t n_phi) {
    PartyRule r;
    const auto gl = gauss_legendre_rule(n_theta, 0.0, kPi / 2);
    for (std::size_t i = 0; i < n_theta; ++i)
        for (std::size_t j = 0; j < n_phi; ++j) {
            r.theta.push_back(gl.nodes[i]);
            r.phi.push_back(2 * kPi * static_cast<double>(j) / static_cast<double>(n_phi));
            r.weight.push_back(gl.weights[i] * (2 * kPi / n_phi) * (d / (2 * kPi)) * std::sin(2 * gl.nodes[i]));
        }
    return r;
}

void for_each_node(const SubsystemShape& shape, const std::function<void(const AngleSet&, double)>& f) {
    std::vector<PartyRule> rules;
    for (auto d : shape.dims) rules.push_back(party_rule(d, 16, 8));
    std::vector<std::size_t> idx(shape.parties(), 0);
    while (true) {
        AngleSet ang;
        double w = 1.0;
        for (std::size_t k = 0; k < idx.size(); ++k) {
            ang.theta.push_back(rules[k].theta[idx[k]]);
            ang.phi.push_back(rules[k].phi[idx[k]]);
            w *= rules[k].weight[idx[k]];
        }
        f(ang, w);
        std::size_t k = 0;
        while (k < idx.size() && ++idx[k] == rules[k].theta.size()) idx[k++] = 0;
        if (k == idx.size()) break;
    }
}

AngleSet random_angles(std::size_t parties, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> t(0.0, kPi / 2), p(0.0, 2 * kPi);
    AngleSet a;
    for (std::size_t k = 0; k < parties; ++k) {
        a.theta.push_back(t(rng));
        a.phi.push_back(p(rng));
    }
    return a;
}

std::string shape_name(const SubsystemShape& s) {
    std::string out = "[";
    for (std::size_t k = 0; k < s.parties(); ++k) out += (k ? "," : "") + std::to_string(s.dims[k]);
    return out + "]";
}

Verdict criterion_3() {
    Stopwatch sw;
    std::mt19937_64 rng(3001);
    const std::vector<SubsystemShape> shapes{{{2}}, {{3}}, {{2, 2}}};
    bool ok = true;
    std::vector<std::string> failed;
    auto clause = [&](const std::string& name, double err, double tol) {
        const bool pass = err < tol;
        detail("%-32s %.3e (tol %.0e) %s", name.c_str(), err, tol, pass ? "ok" : "VIOLATED");
        if (!pass) failed.push_back(name);
        ok &= pass;
    };

    for (const auto& shape : shapes) {
        const auto tag = shape_name(shape);
        double tr = 0.0;
        for (int i = 0; i < 100; ++i) {
            const auto k = kernel_composite(shape, random_angles(shape.parties(), rng));
            tr = std::max(tr, std::abs(k.trace() - cplx(1.0)));
        }
        clause("trace " + tag, tr, 1e-12);

        ComplexMatrix integral(shape.total(), shape.total());
        for_each_node(shape, [&](const AngleSet& a, double w) { integral += kernel_composite(shape, a) * cplx(w); });
        clause("normalization " + tag, max_abs_diff(integral, ComplexMatrix::identity(shape.total())), 1e-8);

        double third = 0.0;
        for (int i = 0; i < 50; ++i) {
            const auto a = random_angles(shape.parties(), rng);
            std::uniform_real_distribution<double> psi(0.0, 2 * kPi);
            ComplexMatrix ref = reference::kernel_single(shape.dims[0], a.theta[0], a.phi[0], psi(rng));
            for (std::size_t k = 1; k < shape.parties(); ++k)
                ref = tensor_product(ref, reference::kernel_single(shape.dims[k], a.theta[k], a.phi[k], psi(rng)));
            third = std::max(third, max_abs_diff(kernel_composite(shape, a), ref));
        }
        clause("third-angle invariance " + tag, third, 1e-12);

        const auto a = oracle::random_hermitian(shape.total(), rng);
        const auto b = oracle::random_hermitian(shape.total(), rng);
        double overlap = 0.0;
        for_each_node(shape, [&](const AngleSet& ang, double w) {
            overlap += w * wigner_value(a, shape, ang) * wigner_value(b, shape, ang);
        });
        const double tr_ab = (a * b).trace().real();
        detail("overlap %s: integral %.9f vs Tr(AB) %.9f", tag.c_str(), overlap, tr_ab);
        clause("overlap rule " + tag, std::abs(overlap - tr_ab), 1e-6);
    }

    double fact = 0.0;
    for (const SubsystemShape& shape : {SubsystemShape{{2, 2}}, SubsystemShape{{2, 3}}, SubsystemShape{{3, 3}}}) {
        const auto r1 = oracle::random_density(shape.dims[0], 2, rng);
        const auto r2 = oracle::random_density(shape.dims[1], 1, rng);
        const auto prod = tensor_product(r1, r2);
        for (int i = 0; i < 50; ++i) {
            const auto ang = random_angles(2, rng);
            const double w1 = wigner_value(r1, {{shape.dims[0]}}, {{ang.theta[0]}, {ang.phi[0]}, false});
            const double w2 = wigner_value(r2, {{shape.dims[1]}}, {{ang.theta[1]}, {ang.phi[1]}, false});
            fact = std::max(fact, std::abs(wigner_value(prod, shape, ang) - w1 * w2));
        }
    }
    clause("product factorization [2,2],[2,3],[3,3]", fact, 1e-12);

    const double secs = sw.seconds();
    ok &= secs < 60.0;
    std::string which;
    for (const auto& f : failed) which += (which.empty() ? "" : "; ") + f;
    return {ok, format("kernel conformance: %s, %.1f s (limit 60 s)",
                       failed.empty() ? "all clauses hold" : ("violated: " + which).c_str(), secs)};
}

// ---------------------------------------------------------------- 4

Verdict criterion_4() {
    bool ok = true;
    const double expected = (2.0 - std::sqrt(3.0)) / (2.0 * std::sqrt(3.0));
    double worst_basis = 0.0;
    for (int b = 0; b < 2; ++b) {
        ComplexMatrix rho(2, 2);
        rho(b, b) = 1.0;
        const double v = negativity_equal_angle(rho, {{2}}).value;
        detail("qubit |%d> equal-angle negativity %.12f (expected %.12f)", b, v, expected);
        worst_basis = std::max(worst_basis, std::abs(v - expected));
    }
    ok &= worst_basis < 1e-6;

    bool mixed_zero = true;
    for (const SubsystemShape& shape : {SubsystemShape{{2}}, SubsystemShape{{3}}, SubsystemShape{{2, 2, 2, 2}},
                                        SubsystemShape{{2, 3, 3, 2}}}) {
        const auto n = shape.total();
        const auto rho = ComplexMatrix::identity(n) * cplx(1.0 / static_cast<double>(n));
        McOptions mc;
        mc.samples = 20000;
        const double q = negativity_equal_angle(rho, shape).value;
        const auto m = negativity_full_mc(rho, shape, mc);
        detail("maximally mixed %-9s: quadrature %.3g, Monte Carlo %.3g +- %.3g", shape_name(shape).c_str(), q, m.value,
               m.stderr_);
        mixed_zero &= q == 0.0 && m.value == 0.0 && m.stderr_ == 0.0;
    }
    ok &= mixed_zero;

    bool norm_ok = true;
    std::mt19937_64 rng(4001);
    std::vector<std::pair<std::string, CellState>> states;
    states.emplace_back("spin-1/2 cell (0.5, 6.0)", assembled_state(params_from_xy(SpinCase::half_half, 0.5, 6.0)));
    states.emplace_back("spin-1 cell (4.0, 5.5)", assembled_state(params_from_xy(SpinCase::half_one, 4.0, 5.5)));
    CellState rnd;
    rnd.shape = {{2, 3, 3, 2}};
    rnd.rho = oracle::random_density(36, 4, rng);
    states.emplace_back("random rank-4 [2,3,3,2]", rnd);
    for (const auto& [name, s] : states) {
        McOptions mc;
        mc.samples = 200000;
        mc.seed = 4;
        const auto e = integral_full_mc(s.rho, s.shape, mc);
        const double z = std::abs(e.value - 1.0) / e.stderr_;
        detail("%-26s int W = %.6f +- %.6f (%.2f stderr)", name.c_str(), e.value, e.stderr_, z);
        norm_ok &= z < 3.0;
    }
    ok &= norm_ok;
    return {ok, format("negativity oracles: basis-state error %.2e (tol 1e-6), maximally mixed %s, MC normalization %s",
                       worst_basis, mixed_zero ? "exactly 0" : "NOT 0", norm_ok ? "within 3 stderr" : "OUTSIDE 3 stderr")};
}

// ---------------------------------------------------------------- 5

Verdict criterion_5() {
    const auto s = assembled_state(params_from_xy(SpinCase::half_half, 0.5, 6.0));
    detail("state: spin-1/2 cell at (x, y) = (0.5, 6.0), label %s, LBC %.4f",
           std::string(to_string(cell_ground_state(s.source_params).label.name)).c_str(),
           lbc_tau(psd_project(s)));
    std::vector<double> scaled;
    for (std::uint64_t n : {1000ull, 10000ull, 100000ull}) {
        McOptions mc;
        mc.samples = n;
        mc.seed = 5;
        const auto e = negativity_full_mc(s, mc);
        scaled.push_back(e.stderr_ * std::sqrt(static_cast<double>(n)));
        detail("N = %6llu: negativity %.6f +- %.6f, stderr * sqrt(N) = %.5f", static_cast<unsigned long long>(n),
               e.value, e.stderr_, scaled.back());
    }
    double worst = 0.0;
    for (double v : scaled) worst = std::max(worst, std::abs(v / scaled.back() - 1.0));
    return {worst <= 0.2, format("MC convergence: stderr * sqrt(N) deviates %.1f%% from the N = 1e5 value (limit 20%%)",
                                 100.0 * worst)};
}

// ---------------------------------------------------------------- 6

Verdict criterion_6() {
    std::mt19937_64 rng(6001);
    const double h = 1.0 / std::sqrt(2.0);
    const double bell = wootters_concurrence(pure({h, 0, 0, h}));
    detail("Bell state concurrence %.15f", bell);

    double product = 0.0;
    for (int i = 0; i < 20; ++i)
        product = std::max(product, wootters_concurrence(tensor_product(oracle::random_density(2, 1 + i % 2, rng),
                                                                        oracle::random_density(2, 1, rng))));
    detail("max concurrence over 20 product states %.3e", product);

    std::vector<cplx> zero(16, 0.0);
    zero[0] = 1.0;
    const double t0 = lbc(pure(zero), {{2, 2, 2, 2}}).tau;
    detail("tau(|0000>) %.3e", t0);

    double lu = 0.0;
    for (const SubsystemShape& shape : {SubsystemShape{{2, 2, 2, 2}}, SubsystemShape{{2, 3, 3, 2}}}) {
        for (int i = 0; i < 4; ++i) {
            const auto rho = pure(random_vector(shape.total(), rng));
            const auto u = local_unitary(shape, rng);
            const double a = lbc(rho, shape).tau, b = lbc(u * rho * u.adjoint(), shape).tau;
            lu = std::max(lu, std::abs(a - b));
        }
    }
    detail("max |tau(U rho U^dag) - tau(rho)| over 8 random pure states, local U: %.3e", lu);

    std::vector<cplx> ghz(16, 0.0);
    ghz[0] = ghz[15] = h;
    const double g1 = lbc(pure(ghz), {{2, 2, 2, 2}}).tau, g2 = lbc(pure(ghz), {{2, 2, 2, 2}}).tau;
    const double g3 = lbc(pure(ghz), {{2, 2, 2, 2}}, LbcRoute::reference).tau;
    detail("GHZ tau %.15f, rerun %.15f, reference route %.15f", g1, g2, g3);

    const bool ok = std::abs(bell - 1.0) < 1e-12 && product < 1e-10 && t0 < 1e-10 && lu < 1e-8 &&
                    std::abs(g1 - 1.0) < 1e-10 && std::abs(g1 - g2) < 1e-10;
    return {ok, format("entanglement: Bell %.1e from 1, product %.1e, |0000> %.1e, LU change %.1e, GHZ %.1e from 1",
                       std::abs(bell - 1.0), product, t0, lu, std::abs(g1 - 1.0))};
}

// ---------------------------------------------------------------- scans

ScanConfig structure_config(SpinCase c) {
    ScanConfig cfg;
    cfg.spin_case = c;
    cfg.nx = cfg.ny = 64;
    cfg.beta = kGroundStateBeta;
    cfg.mc_samples = kQuickMcSamples;
    cfg.seed = 0;
    if (c == SpinCase::half_half)
        cfg.quantities = {Quantity::phase_label, Quantity::wigner_avg_equal_angle, Quantity::negativity_full_mc,
                          Quantity::lbc};
    else
        cfg.quantities = {Quantity::phase_label, Quantity::wigner_avg_equal_angle, Quantity::wigner_avg_full_mc,
                          Quantity::negativity_full_mc};
    return cfg;
}

bool same_scan(const ScanConfig& a, const ScanConfig& b) {
    return a.spin_case == b.spin_case && a.nx == b.nx && a.ny == b.ny && a.x_min == b.x_min && a.x_max == b.x_max &&
           a.y_min == b.y_min && a.y_max == b.y_max && a.beta == b.beta && a.mc_samples == b.mc_samples &&
           a.seed == b.seed && a.quantities == b.quantities && a.state_mode == b.state_mode &&
           a.quad_resolution == b.quad_resolution;
}

constexpr double kScanBudgetSeconds = 1800.0;

int prepare(const std::string& which, const fs::path& cache) {
    const auto c = which == "one" ? SpinCase::half_one : SpinCase::half_half;
    const auto cfg = structure_config(c);
    const auto dir = cache / which;
    double wall = 0.0;
    bool cached = false;
    if (fs::exists(dir / "manifest.json") && fs::exists(dir / "data.csv")) {
        try {
            const auto old = load_result(dir);
            cached = same_scan(old.config, cfg);
            wall = old.wall_time_s;
        } catch (const std::exception&) {
            cached = false;
        }
    }
    if (!cached) {
        const auto r = run_scan(cfg);
        write_outputs(r, dir);
        wall = r.wall_time_s;
    }
    const bool ok = wall < kScanBudgetSeconds;
    std::printf("%s scan-%s 64x64 %s scan %s in %s, wall %.1f s (budget %.0f s)\n", ok ? "PASS" : "FAIL",
                which.c_str(), std::string(to_string(c)).c_str(), cached ? "reused" : "written", dir.c_str(), wall,
                kScanBudgetSeconds);
    return ok ? 0 : 1;
}

// Label grid of a finished scan. A point is interior when it and its eight
// neighbours carry the same non-degenerate label.
struct Field {
    const ScanResult* r = nullptr;
    std::size_t nx = 0, ny = 0;
    std::vector<Phase> phase;
    std::vector<bool> interior;

    explicit Field(const ScanResult& res) : r(&res), nx(res.config.nx), ny(res.config.ny) {
        for (const auto& rec : res.records) phase.push_back(rec.phase);
        interior.assign(phase.size(), false);
        for (std::size_t iy = 1; iy + 1 < ny; ++iy)
            for (std::size_t ix = 1; ix + 1 < nx; ++ix) {
                const auto p = phase[iy * nx + ix];
                bool same = p != Phase::DEGENERATE;
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx) same &= phase[(iy + dy) * nx + ix + dx] == p;
                interior[iy * nx + ix] = same;
            }
    }

    std::map<Phase, std::vector<std::size_t>> regions(std::size_t min_points = 10) const {
        std::map<Phase, std::vector<std::size_t>> out;
        for (std::size_t i = 0; i < phase.size(); ++i)
            if (interior[i]) out[phase[i]].push_back(i);
        std::erase_if(out, [&](const auto& kv) { return kv.second.size() < min_points; });
        return out;
    }
};

ScanResult load_scan(const fs::path& cache, const std::string& which) {
    const auto dir = cache / which;
    const auto r = load_result(dir);
    if (!same_scan(r.config, structure_config(which == "one" ? SpinCase::half_one : SpinCase::half_half)))
        throw std::runtime_error("cached scan in " + dir.string() + " does not match; run 'prepare " + which + "'");
    return r;
}

struct Stats {
    double mean = 0.0, stdev = 0.0;
};

Stats stats(const std::vector<double>& v, const std::vector<std::size_t>& idx) {
    Stats s;
    for (auto i : idx) s.mean += v[i];
    s.mean /= static_cast<double>(idx.size());
    for (auto i : idx) s.stdev += (v[i] - s.mean) * (v[i] - s.mean);
    s.stdev = std::sqrt(s.stdev / static_cast<double>(idx.size()));
    return s;
}

std::string name(Phase p) { return std::string(to_string(p)); }

// Schmidt rank of the Heisenberg-pair state of every ground-manifold member.
enum class EdgeClass { product, bell, mixed };

EdgeClass edge_class(const ModelParams& p) {
    const auto gs = cell_ground_state(p);
    const std::size_t d = heisenberg_dim(p.spin_case);
    std::set<int> ranks;
    for (const auto& m : gs.members) {
        const auto spec = edge_spectrum(p, m.sigma_i, m.sigma_i1);
        for (const auto& l : spec.levels) {
            if (l.tag != m.level) continue;
            Eigen::MatrixXcd a(d, d);
            for (std::size_t i = 0; i < d; ++i)
                for (std::size_t j = 0; j < d; ++j) a(i, j) = l.state[i * d + j];
            const auto sv = Eigen::JacobiSVD<Eigen::MatrixXcd>(a).singularValues();
            int rank = 0;
            for (Eigen::Index k = 0; k < sv.size(); ++k) rank += sv[k] > 1e-8 * sv[0] ? 1 : 0;
            ranks.insert(rank);
        }
    }
    if (ranks.size() == 1 && *ranks.begin() == 1) return EdgeClass::product;
    if (!ranks.empty() && *ranks.begin() >= 2) return EdgeClass::bell;
    return EdgeClass::mixed;
}

std::map<Phase, EdgeClass> classify_regions(const ScanResult& r, const Field& f) {
    std::map<Phase, EdgeClass> out;
    for (const auto& [ph, idx] : f.regions()) {
        std::set<EdgeClass> seen;
        for (auto i : idx) seen.insert(edge_class(params_from_xy(r.config.spin_case, r.records[i].x, r.records[i].y)));
        out[ph] = seen.size() == 1 ? *seen.begin() : EdgeClass::mixed;
    }
    return out;
}

const char* class_name(EdgeClass c) {
    return c == EdgeClass::product ? "product" : c == EdgeClass::bell ? "Bell-type" : "mixed";
}

// ---------------------------------------------------------------- 7

Verdict criterion_7a(const fs::path& cache) {
    const auto r = load_scan(cache, "half");
    const Field f(r);
    const auto xs = r.config.xs();
    const double dx = xs[1] - xs[0];
    std::size_t found = 0;
    double worst = 0.0;
    for (std::size_t iy = 0; iy < f.ny; ++iy) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t ix = 0; ix + 1 < f.nx; ++ix) {
            const auto a = f.phase[iy * f.nx + ix], b = f.phase[iy * f.nx + ix + 1];
            if (a == b || a == Phase::DEGENERATE || b == Phase::DEGENERATE) continue;
            best = std::min(best, std::abs(0.5 * (xs[ix] + xs[ix + 1]) - kPi));
        }
        if (best <= dx) {
            ++found;
            worst = std::max(worst, best);
        }
    }
    detail("grid spacing %.5f; label change between columns %zu and %zu brackets x = pi", dx, f.nx / 2 - 1, f.nx / 2);
    return {found == f.ny, format("label boundary at x = pi found in %zu/%zu rows, max offset %.4f (limit one cell %.4f)",
                                  found, f.ny, worst, dx)};
}

Verdict criterion_7b(const fs::path& cache) {
    const auto r = load_scan(cache, "half");
    const Field f(r);
    const auto w = r.values("wigner_avg_equal_angle");
    double lo = std::numeric_limits<double>::infinity(), hi = -lo, worst_sd = 0.0;
    for (const auto& [ph, idx] : f.regions()) {
        const auto s = stats(w, idx);
        detail("%-8s %4zu interior points: mean %+.5f, std %.5f", name(ph).c_str(), idx.size(), s.mean, s.stdev);
        lo = std::min(lo, s.mean);
        hi = std::max(hi, s.mean);
        worst_sd = std::max(worst_sd, s.stdev);
    }
    const double spread = hi - lo;
    return {worst_sd < 0.1 * spread,
            format("equal-angle average W: max within-region std %.5f vs 10%% of between-region spread %.5f",
                   worst_sd, 0.1 * spread)};
}

Verdict criterion_7c(const fs::path& cache) {
    const auto r = load_scan(cache, "half");
    const Field f(r);
    const auto lbc_values = r.values("lbc");
    const auto classes = classify_regions(r, f);
    std::size_t prod_bad = 0, prod_n = 0, bell_bad = 0, bell_n = 0;
    double prod_max = 0.0, bell_min = std::numeric_limits<double>::infinity();
    for (const auto& [ph, idx] : f.regions()) {
        const auto cls = classes.at(ph);
        std::size_t bad = 0;
        double mx = 0.0, mn = std::numeric_limits<double>::infinity();
        for (auto i : idx) {
            const double v = lbc_values[i];
            mx = std::isnan(v) ? mx : std::max(mx, v);
            mn = std::isnan(v) ? mn : std::min(mn, v);
            if (cls == EdgeClass::product) bad += !(v < 1e-8);
            if (cls == EdgeClass::bell) bad += !(v > 0.1);
        }
        detail("%-8s %-9s edge, %4zu interior points: LBC in [%.3e, %.3e], %zu outside the bound", name(ph).c_str(),
               class_name(cls), idx.size(), mn, mx, bad);
        if (cls == EdgeClass::product) prod_bad += bad, prod_n += idx.size(), prod_max = std::max(prod_max, mx);
        if (cls == EdgeClass::bell) bell_bad += bad, bell_n += idx.size(), bell_min = std::min(bell_min, mn);
    }
    // Same product-region points with the zero-temperature oracle state.
    double oracle_max = 0.0;
    for (const auto& [ph, idx] : f.regions())
        if (classes.at(ph) == EdgeClass::product)
            for (auto i : idx)
                oracle_max = std::max(oracle_max, lbc_tau(ground_state_oracle(
                                                      params_from_xy(r.config.spin_case, r.records[i].x, r.records[i].y))));
    detail("diagnostic: ground-state oracle LBC over the same product-region points, max %.3e", oracle_max);
    const bool ok = prod_n > 0 && bell_n > 0 && prod_bad == 0 && bell_bad == 0;
    return {ok, format("LBC: product regions %zu/%zu points < 1e-8 (max %.2e), Bell-edge regions %zu/%zu points > 0.1 "
                       "(min %.3f)",
                       prod_n - prod_bad, prod_n, prod_max, bell_n - bell_bad, bell_n, bell_min)};
}

Verdict criterion_7d(const fs::path& cache) {
    const auto r = load_scan(cache, "half");
    const Field f(r);
    const auto neg = r.values("negativity_full_mc");
    const auto se = r.stderrs("negativity_full_mc");
    const auto classes = classify_regions(r, f);
    std::size_t prod_ok = 0, prod_n = 0, bell_ok = 0, bell_n = 0;
    for (const auto& [ph, idx] : f.regions()) {
        const auto cls = classes.at(ph);
        const auto s = stats(neg, idx);
        std::size_t above = 0;
        for (auto i : idx) above += neg[i] > 3.0 * se[i];
        detail("%-8s %-9s edge: mean MC negativity %.4f, %zu/%zu points above 3 stderr", name(ph).c_str(),
               class_name(cls), s.mean, above, idx.size());
        if (cls == EdgeClass::product) prod_ok += idx.size() - above, prod_n += idx.size();
        if (cls == EdgeClass::bell) bell_ok += above, bell_n += idx.size();
    }
    const bool ok = prod_n > 0 && bell_n > 0 && prod_ok == prod_n && bell_ok == bell_n;
    return {ok, format("full-space MC negativity: product regions %zu/%zu within 3 stderr of 0, Bell-edge regions "
                       "%zu/%zu above 3 stderr",
                       prod_ok, prod_n, bell_ok, bell_n)};
}

// ---------------------------------------------------------------- 8

double separation(const Stats& a, const Stats& b) {
    const double d = std::abs(a.mean - b.mean), s = std::hypot(a.stdev, b.stdev);
    return s > 0.0 ? d / s : (d > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
}

Verdict criterion_8a(const fs::path& cache) {
    const auto r = load_scan(cache, "one");
    const Field f(r);
    const auto eq = r.values("wigner_avg_equal_angle");
    const auto box = r.values("wigner_avg_full_mc");
    const auto regions = f.regions();
    std::map<Phase, std::pair<Stats, Stats>> st;
    for (const auto& [ph, idx] : regions) {
        st[ph] = {stats(eq, idx), stats(box, idx)};
        detail("%-8s %4zu interior points: equal-angle %+.5f +- %.5f, full-space %.5f +- %.5f", name(ph).c_str(),
               idx.size(), st[ph].first.mean, st[ph].first.stdev, st[ph].second.mean, st[ph].second.stdev);
    }
    std::size_t pairs = 0, hits = 0, eq_sep = 0, box_sep = 0;
    for (auto a = st.begin(); a != st.end(); ++a)
        for (auto b = std::next(a); b != st.end(); ++b) {
            const double se = separation(a->second.first, b->second.first);
            const double sb = separation(a->second.second, b->second.second);
            ++pairs;
            eq_sep += se >= 1.0;
            box_sep += sb >= 1.0;
            hits += se < 1.0 && sb >= 1.0;
            detail("%-8s vs %-8s separation: equal-angle %8.3f, full-space %6.3f", name(a->first).c_str(),
                   name(b->first).c_str(), se, sb);
        }
    return {hits > 0, format("region pairs (separation index >= 1): equal-angle separates %zu/%zu, full-space %zu/%zu, "
                             "pairs only the full-space average separates: %zu",
                             eq_sep, pairs, box_sep, pairs, hits)};
}

Verdict criterion_8b(const fs::path& cache) {
    const auto r = load_scan(cache, "one");
    const Field f(r);
    const auto neg = r.values("negativity_full_mc");
    const auto se = r.stderrs("negativity_full_mc");
    std::size_t want_n = 0, want_ok = 0, rest_n = 0, rest_ok = 0;
    for (const auto& [ph, idx] : f.regions()) {
        const bool qfo12 = ph == Phase::QFO_I || ph == Phase::QFO_II;
        const bool other = ph == Phase::FRU || ph == Phase::FRU_I || ph == Phase::FRU_II || ph == Phase::FRU_III ||
                           ph == Phase::FRU_IV || ph == Phase::QFO_III;
        std::size_t above = 0;
        for (auto i : idx) above += neg[i] > 3.0 * se[i];
        const auto s = stats(neg, idx);
        detail("%-8s mean MC negativity %.4f (typical stderr %.4f), %zu/%zu points above 3 stderr", name(ph).c_str(),
               s.mean, se[idx.front()], above, idx.size());
        if (qfo12) want_n += idx.size(), want_ok += above;
        if (other) rest_n += idx.size(), rest_ok += idx.size() - above;
    }
    const bool ok = want_n > 0 && rest_n > 0 && want_ok == want_n && rest_ok == rest_n;
    return {ok, format("QFO I/II %zu/%zu points above 3 stderr; FRU/QFO III %zu/%zu points within 3 stderr of 0",
                       want_ok, want_n, rest_ok, rest_n)};
}

// ---------------------------------------------------------------- 9

Verdict criterion_9() {
    bool ok = true;
    for (auto c : {SpinCase::half_half, SpinCase::half_one}) {
        ScanConfig cfg;
        cfg.spin_case = c;
        cfg.nx = cfg.ny = c == SpinCase::half_half ? 16 : 10;
        cfg.mc_samples = kQuickMcSamples;
        cfg.seed = 9;
        apply_config_value(cfg, "quantities", "all");
        const auto reference = csv_text(run_scan(cfg, false));
        std::string status = "serial";
        bool same = true;
        for (int w : {1, 4, 8}) {
            cfg.workers = w;
            const bool eq = csv_text(run_scan(cfg, true)) == reference;
            same &= eq;
            status += format(", %d workers %s", w, eq ? "identical" : "DIFFERENT");
        }
        detail("%-9s %zux%zu, all quantities, %zu CSV bytes: %s", std::string(to_string(c)).c_str(), cfg.nx, cfg.ny,
               reference.size(), status.c_str());
        ok &= same;
    }
    return {ok, ok ? "CSV bit-identical across serial and 1/4/8 workers" : "CSV differs between worker counts"};
}

// ---------------------------------------------------------------- driver

const std::vector<std::string> kIds{"1", "2", "3", "4", "5", "6", "7a", "7b", "7c", "7d", "8a", "8b", "9"};

Verdict run(const std::string& id, const fs::path& cache) {
    if (id == "1") return criterion_1();
    if (id == "2") return criterion_2();
    if (id == "3") return criterion_3();
    if (id == "4") return criterion_4();
    if (id == "5") return criterion_5();
    if (id == "6") return criterion_6();
    if (id == "7a") return criterion_7a(cache);
    if (id == "7b") return criterion_7b(cache);
    if (id == "7c") return criterion_7c(cache);
    if (id == "7d") return criterion_7d(cache);
    if (id == "8a") return criterion_8a(cache);
    if (id == "8b") return criterion_8b(cache);
    if (id == "9") return criterion_9();
    throw std::invalid_argument("unknown criterion '" + id + "'");
}

int report(const std::string& id, const fs::path& cache) {
    Verdict v;
    try {
        v = run(id, cache);
    } catch (const std::exception& e) {
        v = {false, std::string("error: ") + e.what()};
    }
    std::printf("%s %-3s %s\n", v.pass ? "PASS" : "FAIL", id.c_str(), v.summary.c_str());
    std::fflush(stdout);
    return v.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance criteria"};
    std::vector<std::string> args;
    std::string cache = "acceptance_cache";
    app.add_option("args", args, "criterion id, 'all', or 'prepare half|one'")->required();
    app.add_option("--cache", cache, "Directory holding the structure scans");
    CLI11_PARSE(app, argc, argv);

    if (args[0] == "prepare") {
        if (args.size() != 2 || (args[1] != "half" && args[1] != "one")) {
            std::fprintf(stderr, "usage: prepare half|one\n");
            return 2;
        }
        return prepare(args[1], cache);
    }
    if (args[0] == "all") {
        int failed = prepare("half", cache) + prepare("one", cache);
        for (const auto& id : kIds) failed += report(id, cache);
        return failed == 0 ? 0 : 1;
    }
    int failed = 0;
    for (const auto& id : args) failed += report(id, cache);
    return failed == 0 ? 0 : 1;
}
