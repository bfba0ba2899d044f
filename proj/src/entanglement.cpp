#include "atih/entanglement.hpp"

#include <algorithm>
#include <cmath>

namespace atih {

namespace {

void check_psd(const ComplexMatrix& rho, const char* context) {
    const double lo = hermitian_eigenvalues(rho).front();
    if (lo < -kTol.psd_clamp) throw NotPsdError(lo, context);
}

double concurrence_from(const ComplexMatrix& sqrt_rho, const ComplexMatrix& tilde) {
    auto r = sqrt_rho * tilde * sqrt_rho;
    r = (r + r.adjoint()) * cplx(0.5);
    auto ev = hermitian_eigenvalues(r);
    std::vector<double> l;
    for (double v : ev) l.push_back(std::sqrt(std::max(v, 0.0)));
    std::sort(l.begin(), l.end(), std::greater<>());
    double c = l[0];
    for (std::size_t k = 1; k < std::min<std::size_t>(4, l.size()); ++k) c -= l[k];
    return std::max(0.0, c);
}

// sqrt(rho) with eigenvalues below 1e-14 of the largest set to zero, so that
// rounding noise in the null space is not lifted to O(1e-8)
ComplexMatrix truncated_sqrt(const ComplexMatrix& rho) {
    const auto eig = hermitian_eig((rho + rho.adjoint()) * cplx(0.5));
    const double cut = 1e-14 * std::max(eig.values.back(), 0.0);
    const std::size_t n = rho.rows();
    ComplexMatrix out(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        if (eig.values[k] <= cut) continue;
        const double w = std::sqrt(eig.values[k]);
        for (std::size_t i = 0; i < n; ++i) {
            const cplx vi = eig.vectors(i, k) * w;
            for (std::size_t j = 0; j < n; ++j) out(i, j) += vi * std::conj(eig.vectors(j, k));
        }
    }
    return out;
}

}  // namespace

double wootters_concurrence_unchecked(const ComplexMatrix& m) {
    if (m.rows() != 4 || m.cols() != 4) throw std::invalid_argument("wootters_concurrence: 4x4 input required");
    // l_i are the singular values of X = Psi^T (sy (x) sy) Psi, Psi_k = sqrt(p_k) v_k,
    // read off the Hermitian dilation [[0, X], [X^dagger, 0]] without a square root
    const auto eig = hermitian_eig((m + m.adjoint()) * cplx(0.5));
    const double pmax = eig.values.back();
    if (pmax <= 0.0) return 0.0;
    std::vector<std::array<cplx, 4>> psi;
    for (std::size_t k = 0; k < 4; ++k) {
        if (eig.values[k] <= 1e-14 * pmax) continue;
        const double w = std::sqrt(eig.values[k]);
        std::array<cplx, 4> col;
        for (std::size_t a = 0; a < 4; ++a) col[a] = eig.vectors(a, k) * w;
        psi.push_back(col);
    }
    // (sy (x) sy)_{a, 3-a} = sign[a]
    static constexpr std::array<double, 4> sign{-1.0, 1.0, 1.0, -1.0};
    const std::size_t r = psi.size();
    ComplexMatrix dil(2 * r, 2 * r);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j) {
            cplx x = 0.0;
            for (std::size_t a = 0; a < 4; ++a) x += psi[i][a] * sign[a] * psi[j][3 - a];
            dil(i, r + j) = x;
            dil(r + j, i) = std::conj(x);
        }
    const auto ev = hermitian_eigenvalues(dil);
    double c = ev[2 * r - 1];
    for (std::size_t k = 2 * r - 1; k-- > r;) c -= std::max(ev[k], 0.0);
    return std::max(0.0, c);
}

double wootters_concurrence(const ComplexMatrix& rho) {
    if (rho.rows() != 4 || rho.cols() != 4) throw std::invalid_argument("wootters_concurrence: 4x4 input required");
    if (std::abs(rho.trace() - cplx(1.0)) > kTol.reconstruction)
        throw std::invalid_argument("wootters_concurrence: trace must be 1");
    check_psd(rho, "wootters_concurrence");
    return wootters_concurrence_unchecked(rho);
}

GeneratorSet so_generators(std::size_t d) {
    if (d < 2) throw std::invalid_argument("so_generators: d must be >= 2");
    GeneratorSet g;
    g.dim = d;
    for (std::size_t j = 0; j < d; ++j)
        for (std::size_t k = j + 1; k < d; ++k) {
            ComplexMatrix m(d, d);
            m(j, k) = 1.0;
            m(k, j) = -1.0;
            g.pairs.emplace_back(j, k);
            g.matrices.push_back(std::move(m));
        }
    return g;
}

std::vector<Bipartition> bipartitions(const SubsystemShape& shape) {
    const std::size_t n = shape.parties();
    if (n < 2) throw std::invalid_argument("bipartitions: at least 2 parties required");
    if (n > 20) throw std::invalid_argument("bipartitions: too many parties");
    std::vector<Bipartition> out;
    auto dim_of = [&](const std::vector<std::size_t>& side) {
        std::size_t d = 1;
        for (auto k : side) d *= shape.dims[k];
        return d;
    };
    for (std::size_t size = 1; 2 * size <= n; ++size) {
        // lexicographic subsets of the given size
        std::vector<std::size_t> idx(size);
        for (std::size_t k = 0; k < size; ++k) idx[k] = k;
        while (true) {
            const bool half = 2 * size == n;
            if (!half || idx[0] == 0) {
                std::vector<std::size_t> rest;
                for (std::size_t k = 0; k < n; ++k)
                    if (std::find(idx.begin(), idx.end(), k) == idx.end()) rest.push_back(k);
                Bipartition b;
                if (idx[0] == 0) {
                    b.side_a = idx;
                    b.side_b = rest;
                } else {
                    b.side_a = rest;
                    b.side_b = idx;
                }
                b.d_a = dim_of(b.side_a);
                b.d_b = dim_of(b.side_b);
                out.push_back(std::move(b));
            }
            std::size_t k = size;
            while (k > 0 && idx[k - 1] == n - size + k - 1) --k;
            if (k == 0) break;
            ++idx[k - 1];
            for (std::size_t t = k; t < size; ++t) idx[t] = idx[t - 1] + 1;
        }
    }
    return out;
}

std::vector<Bipartition> bipartitions(std::size_t n_parties) {
    return bipartitions(SubsystemShape{std::vector<std::size_t>(n_parties, 2)});
}

LbcResult lbc(const ComplexMatrix& rho, const SubsystemShape& shape, LbcRoute route) {
    shape.check_matches(rho.rows());
    if (std::abs(rho.trace() - cplx(1.0)) > kTol.reconstruction) throw std::invalid_argument("lbc: trace must be 1");
    check_psd(rho, "lbc");

    const auto splits = bipartitions(shape);
    const double d = static_cast<double>(*std::min_element(shape.dims.begin(), shape.dims.end()));
    const double m = static_cast<double>(splits.size());
    LbcResult res;
    res.prefactor = d / (2.0 * m * (d - 1.0));
    res.per_bipartition.assign(splits.size(), 0.0);

    for (std::size_t p = 0; p < splits.size(); ++p) {
        const auto& b = splits[p];
        std::vector<std::size_t> perm = b.side_a;
        perm.insert(perm.end(), b.side_b.begin(), b.side_b.end());
        const auto r = permute_subsystems(rho, shape, perm);
        const auto ga = so_generators(b.d_a);
        const auto gb = so_generators(b.d_b);
        double sum = 0.0;
        if (route == LbcRoute::fast) {
            // S = L_a (x) L_b is supported on span{j,k} (x) span{j',k'}; the nonzero
            // spectrum of rho rho~ is that of the 4x4 principal block.
            ComplexMatrix block(4, 4);
            for (const auto& [ja, ka] : ga.pairs)
                for (const auto& [jb, kb] : gb.pairs) {
                    const std::array<std::size_t, 4> idx{ja * b.d_b + jb, ja * b.d_b + kb, ka * b.d_b + jb,
                                                         ka * b.d_b + kb};
                    for (std::size_t x = 0; x < 4; ++x)
                        for (std::size_t y = 0; y < 4; ++y) block(x, y) = r(idx[x], idx[y]);
                    const double c = wootters_concurrence_unchecked(block);
                    sum += c * c;
                }
        } else {
            const auto sq = truncated_sqrt(r);
            const auto rc = r.conj();
            for (const auto& la : ga.matrices)
                for (const auto& lb : gb.matrices) {
                    const auto s = tensor_product(la, lb);
                    const double c = concurrence_from(sq, s * rc * s);
                    sum += c * c;
                }
        }
        res.per_bipartition[p] = sum;
    }
    double total = 0.0;
    for (double v : res.per_bipartition) total += v;
    res.tau = std::sqrt(res.prefactor * total);
    return res;
}

double lbc_tau(const CellState& s, LbcRoute route) { return lbc(s.rho, s.shape, route).tau; }

}  // namespace atih
