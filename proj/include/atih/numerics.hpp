#pragma once

// Dense complex linear algebra and quadrature used throughout the library.
// Matrices here are at most 36x36, so everything is row-major and dense.

#include <complex>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace atih {

using cplx = std::complex<double>;

/// Numerical tolerances shared by all modules.
struct Tolerances {
    double hermiticity = 1e-10;
    double psd_clamp = 1e-8;
    double reconstruction = 1e-9;
    double degeneracy = 1e-10;
    double psd_hard = 1e-3;
    double imag_residue = 1e-8;
};

inline constexpr Tolerances kTol{};

class ComplexMatrix {
public:
    ComplexMatrix() = default;
    ComplexMatrix(std::size_t rows, std::size_t cols);
    ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries);
    ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> rows);

    static ComplexMatrix identity(std::size_t n);
    static ComplexMatrix diagonal(std::span<const double> d);
    static ComplexMatrix column(std::span<const cplx> v);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool square() const noexcept { return rows_ == cols_; }

    cplx& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    const cplx& operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    std::span<cplx> data() noexcept { return data_; }
    std::span<const cplx> data() const noexcept { return data_; }

    ComplexMatrix adjoint() const;
    ComplexMatrix conj() const;
    ComplexMatrix transpose() const;
    cplx trace() const;

    /// max |A - A^dagger| over all entries.
    double hermiticity_defect() const;

    ComplexMatrix& operator+=(const ComplexMatrix& o);
    ComplexMatrix& operator-=(const ComplexMatrix& o);
    ComplexMatrix& operator*=(cplx s);

    friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
    friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
    friend ComplexMatrix operator*(ComplexMatrix a, cplx s) { return a *= s; }
    friend ComplexMatrix operator*(cplx s, ComplexMatrix a) { return a *= s; }
    friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);

    bool operator==(const ComplexMatrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cplx> data_;
};

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);

/// Per-party dimensions of a composite system, e.g. {2,2,2,2} or {2,3,3,2}.
struct SubsystemShape {
    std::vector<std::size_t> dims;

    std::size_t total() const noexcept;
    std::size_t parties() const noexcept { return dims.size(); }
    /// Throws std::invalid_argument if total() != n.
    void check_matches(std::size_t n) const;
    bool operator==(const SubsystemShape&) const = default;
};

class NotHermitianError : public std::invalid_argument {
public:
    NotHermitianError(double defect);
    double defect() const noexcept { return defect_; }

private:
    double defect_;
};

class NotPsdError : public std::domain_error {
public:
    NotPsdError(double min_eigenvalue, const std::string& context);
    double min_eigenvalue() const noexcept { return min_eig_; }

private:
    double min_eig_;
};

/// Kronecker product; the left factor indexes the coarse blocks.
ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b);

struct EigenDecomposition {
    std::vector<double> values;  // ascending
    ComplexMatrix vectors;       // columns are eigenvectors
};

/// Cyclic complex Jacobi. Rejects inputs with hermiticity defect above tol.
EigenDecomposition hermitian_eig(const ComplexMatrix& a, double tol = kTol.hermiticity);

/// Eigenvalues only; same algorithm without accumulating eigenvectors.
std::vector<double> hermitian_eigenvalues(const ComplexMatrix& a, double tol = kTol.hermiticity);

/// Principal square root of a PSD Hermitian matrix. Eigenvalues in
/// [-clamp_tol, 0) are treated as zero; anything lower throws NotPsdError.
ComplexMatrix psd_sqrt(const ComplexMatrix& a, double clamp_tol = kTol.psd_clamp);

/// Reorder parties: party k of the result is party perm[k] of the input.
ComplexMatrix permute_subsystems(const ComplexMatrix& rho, const SubsystemShape& shape,
                                 std::span<const std::size_t> perm);

/// Shape after permute_subsystems with the same perm.
SubsystemShape permute_shape(const SubsystemShape& shape, std::span<const std::size_t> perm);

struct QuadratureRule {
    std::vector<double> nodes;    // on [-1, 1]
    std::vector<double> weights;
};

/// Gauss-Legendre rule with n nodes (n >= 2). Rules are cached and thread-safe.
const QuadratureRule& gauss_legendre_rule(std::size_t n);

/// Gauss-Legendre nodes and weights mapped to [a, b].
QuadratureRule gauss_legendre_rule(std::size_t n, double a, double b);

double gauss_legendre(const std::function<double(double)>& f, double a, double b, std::size_t nodes);

}  // namespace atih
