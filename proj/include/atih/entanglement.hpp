#pragma once

// Two-qubit Wootters concurrence and the multipartite lower-bound concurrence
//   tau = sqrt( d / (2 m (d - 1)) * sum_p sum_{alpha beta} (C^p_{alpha beta})^2 )
// over the m = 2^(N-1) - 1 bipartitions p of an N-party state. C^p_{alpha beta}
// uses rho~ = S rho* S with S = L_alpha (x) L_beta built from the SO(d)
// generators of the two sides.
//
// d convention: the global prefactor uses the smallest party dimension
// (d = 2 for both cells), since the two sides of a split generally differ.

#include <vector>

#include "atih/cell_state.hpp"
#include "atih/numerics.hpp"

namespace atih {

/// C = max(0, l1 - l2 - l3 - l4), l_i = sqrt(eig(sqrt(rho) rho~ sqrt(rho))) descending,
/// rho~ = (sy (x) sy) rho* (sy (x) sy). Throws NotPsdError for eigenvalues below -1e-8.
double wootters_concurrence(const ComplexMatrix& rho);

/// Same formula without trace or PSD validation, for unnormalized 4x4 blocks.
double wootters_concurrence_unchecked(const ComplexMatrix& m);

struct GeneratorSet {
    std::size_t dim = 0;
    std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (j, k), j < k
    std::vector<ComplexMatrix> matrices;                     // E_jk - E_kj
};

/// All E_jk - E_kj, j < k, lexicographic.
GeneratorSet so_generators(std::size_t d);

struct Bipartition {
    std::vector<std::size_t> side_a;  // contains party 0
    std::vector<std::size_t> side_b;
    std::size_t d_a = 0;
    std::size_t d_b = 0;
};

/// Canonical enumeration of the 2^(n-1) - 1 splits: single parties first, then
/// pairs, and so on; for n = 4 the order is i|abj, a|ibj, b|iaj, j|iab, ia|bj,
/// ib|aj, ij|ab. Party dimensions come from shape.
std::vector<Bipartition> bipartitions(const SubsystemShape& shape);
std::vector<Bipartition> bipartitions(std::size_t n_parties);

enum class LbcRoute {
    fast,       // 4x4 principal block per generator pair
    reference,  // dense sqrt(rho) S rho* S sqrt(rho) per generator pair
};

struct LbcResult {
    double tau = 0.0;
    double prefactor = 0.0;                // d / (2 m (d - 1))
    std::vector<double> per_bipartition;   // sum_{alpha beta} C^2 per split
};

/// Lower-bound concurrence of a PSD, unit-trace state. Throws NotPsdError for
/// eigenvalues below -1e-8 (apply psd_project first).
LbcResult lbc(const ComplexMatrix& rho, const SubsystemShape& shape, LbcRoute route = LbcRoute::fast);
double lbc_tau(const CellState& s, LbcRoute route = LbcRoute::fast);

}  // namespace atih
