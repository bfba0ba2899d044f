#include "atih/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <numeric>
#include <sstream>

namespace atih {

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, cplx{0.0, 0.0}) {}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (data_.size() != rows_ * cols_) {
        throw std::invalid_argument("ComplexMatrix: entry count does not match rows*cols");
    }
}

ComplexMatrix::ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) throw std::invalid_argument("ComplexMatrix: ragged initializer");
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const double> d) {
    ComplexMatrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
}

ComplexMatrix ComplexMatrix::column(std::span<const cplx> v) {
    return ComplexMatrix(v.size(), 1, std::vector<cplx>(v.begin(), v.end()));
}

ComplexMatrix ComplexMatrix::adjoint() const {
    ComplexMatrix r(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) r(j, i) = std::conj((*this)(i, j));
    return r;
}

ComplexMatrix ComplexMatrix::conj() const {
    ComplexMatrix r(*this);
    for (auto& x : r.data_) x = std::conj(x);
    return r;
}

ComplexMatrix ComplexMatrix::transpose() const {
    ComplexMatrix r(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
    return r;
}

cplx ComplexMatrix::trace() const {
    cplx t{0.0, 0.0};
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
    return t;
}

double ComplexMatrix::hermiticity_defect() const {
    if (!square()) return std::numeric_limits<double>::infinity();
    double d = 0.0;
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = i; j < cols_; ++j)
            d = std::max(d, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
    return d;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& o) {
    if (o.rows_ != rows_ || o.cols_ != cols_) throw std::invalid_argument("ComplexMatrix: shape mismatch in +");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& o) {
    if (o.rows_ != rows_ || o.cols_ != cols_) throw std::invalid_argument("ComplexMatrix: shape mismatch in -");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(cplx s) {
    for (auto& x : data_) x *= s;
    return *this;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols_ != b.rows_) throw std::invalid_argument("ComplexMatrix: shape mismatch in *");
    ComplexMatrix r(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i) {
        for (std::size_t k = 0; k < a.cols_; ++k) {
            const cplx aik = a(i, k);
            if (aik == cplx{}) continue;
            for (std::size_t j = 0; j < b.cols_; ++j) r(i, j) += aik * b(k, j);
        }
    }
    return r;
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return std::numeric_limits<double>::infinity();
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a.data()[i] - b.data()[i]));
    return d;
}

std::size_t SubsystemShape::total() const noexcept {
    return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
}

void SubsystemShape::check_matches(std::size_t n) const {
    if (dims.empty() || total() != n) {
        std::ostringstream os;
        os << "subsystem shape with total dimension " << total() << " does not describe a " << n << "-dimensional space";
        throw std::invalid_argument(os.str());
    }
}

NotHermitianError::NotHermitianError(double defect)
    : std::invalid_argument("matrix is not Hermitian: max|A - A^dagger| = " + std::to_string(defect)),
      defect_(defect) {}

NotPsdError::NotPsdError(double min_eigenvalue, const std::string& context)
    : std::domain_error(context + ": minimum eigenvalue " + std::to_string(min_eigenvalue) + " below tolerance"),
      min_eig_(min_eigenvalue) {}

ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix r(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) {
            const cplx aij = a(i, j);
            if (aij == cplx{}) continue;
            for (std::size_t k = 0; k < b.rows(); ++k)
                for (std::size_t l = 0; l < b.cols(); ++l) r(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
        }
    return r;
}

namespace {

// In-place cyclic Jacobi on a Hermitian matrix. On return the diagonal of a
// holds the eigenvalues; if v is non-null it accumulates the eigenvectors.
void jacobi_sweeps(ComplexMatrix& a, ComplexMatrix* v) {
    const std::size_t n = a.rows();
    double scale = 0.0;
    for (const auto& x : a.data()) scale = std::max(scale, std::abs(x));
    if (scale == 0.0) return;

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += std::norm(a(p, q));
        if (std::sqrt(off) <= 1e-17 * scale) break;

        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const cplx apq = a(p, q);
                const double r = std::abs(apq);
                if (r <= 1e-300 || r <= 1e-18 * scale) {
                    a(p, q) = 0.0;
                    a(q, p) = 0.0;
                    continue;
                }
                const cplx phase = apq / r;  // e^{i alpha}
                const cplx cphase = std::conj(phase);
                const double app = a(p, p).real();
                const double aqq = a(q, q).real();
                const double theta = (aqq - app) / (2.0 * r);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                // Columns: A <- A G with G e_p = c e_p - s conj(phase) e_q, G e_q = s e_p + c conj(phase) e_q.
                for (std::size_t k = 0; k < n; ++k) {
                    const cplx akp = a(k, p);
                    const cplx akq = a(k, q);
                    a(k, p) = c * akp - s * cphase * akq;
                    a(k, q) = s * akp + c * cphase * akq;
                }
                // Rows: A <- G^dagger A.
                for (std::size_t k = 0; k < n; ++k) {
                    const cplx apk = a(p, k);
                    const cplx aqk = a(q, k);
                    a(p, k) = c * apk - s * phase * aqk;
                    a(q, k) = s * apk + c * phase * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                a(p, p) = a(p, p).real();
                a(q, q) = a(q, q).real();

                if (v) {
                    for (std::size_t k = 0; k < n; ++k) {
                        const cplx vkp = (*v)(k, p);
                        const cplx vkq = (*v)(k, q);
                        (*v)(k, p) = c * vkp - s * cphase * vkq;
                        (*v)(k, q) = s * vkp + c * cphase * vkq;
                    }
                }
            }
        }
    }
}

void check_hermitian(const ComplexMatrix& a, double tol) {
    if (!a.square()) throw std::invalid_argument("hermitian_eig: matrix is not square");
    const double defect = a.hermiticity_defect();
    if (defect > tol) throw NotHermitianError(defect);
}

ComplexMatrix symmetrized(const ComplexMatrix& a) {
    ComplexMatrix h(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) h(i, j) = 0.5 * (a(i, j) + std::conj(a(j, i)));
    return h;
}

}  // namespace

EigenDecomposition hermitian_eig(const ComplexMatrix& a, double tol) {
    check_hermitian(a, tol);
    const std::size_t n = a.rows();
    ComplexMatrix work = symmetrized(a);
    ComplexMatrix v = ComplexMatrix::identity(n);
    jacobi_sweeps(work, &v);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return work(i, i).real() < work(j, j).real(); });

    EigenDecomposition out;
    out.values.resize(n);
    out.vectors = ComplexMatrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = work(order[k], order[k]).real();
        for (std::size_t r = 0; r < n; ++r) out.vectors(r, k) = v(r, order[k]);
    }
    return out;
}

std::vector<double> hermitian_eigenvalues(const ComplexMatrix& a, double tol) {
    check_hermitian(a, tol);
    ComplexMatrix work = symmetrized(a);
    jacobi_sweeps(work, nullptr);
    std::vector<double> vals(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) vals[i] = work(i, i).real();
    std::sort(vals.begin(), vals.end());
    return vals;
}

ComplexMatrix psd_sqrt(const ComplexMatrix& a, double clamp_tol) {
    const auto eig = hermitian_eig(a);
    const std::size_t n = a.rows();
    if (n > 0 && eig.values.front() < -clamp_tol) throw NotPsdError(eig.values.front(), "psd_sqrt");
    ComplexMatrix r(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        const double s = std::sqrt(std::max(0.0, eig.values[k]));
        if (s == 0.0) continue;
        for (std::size_t i = 0; i < n; ++i) {
            const cplx vik = eig.vectors(i, k) * s;
            for (std::size_t j = 0; j < n; ++j) r(i, j) += vik * std::conj(eig.vectors(j, k));
        }
    }
    return r;
}

SubsystemShape permute_shape(const SubsystemShape& shape, std::span<const std::size_t> perm) {
    SubsystemShape out;
    out.dims.reserve(perm.size());
    for (auto p : perm) out.dims.push_back(shape.dims.at(p));
    return out;
}

ComplexMatrix permute_subsystems(const ComplexMatrix& rho, const SubsystemShape& shape,
                                 std::span<const std::size_t> perm) {
    if (!rho.square()) throw std::invalid_argument("permute_subsystems: matrix is not square");
    shape.check_matches(rho.rows());
    const std::size_t np = shape.parties();
    if (perm.size() != np) throw std::invalid_argument("permute_subsystems: permutation length mismatch");
    std::vector<bool> seen(np, false);
    for (auto p : perm) {
        if (p >= np || seen[p]) throw std::invalid_argument("permute_subsystems: not a permutation");
        seen[p] = true;
    }

    const std::size_t n = rho.rows();
    const SubsystemShape out_shape = permute_shape(shape, perm);

    // new_index[old] for every basis state.
    std::vector<std::size_t> new_index(n);
    std::vector<std::size_t> digits(np);
    for (std::size_t idx = 0; idx < n; ++idx) {
        std::size_t rem = idx;
        for (std::size_t k = np; k-- > 0;) {
            digits[k] = rem % shape.dims[k];
            rem /= shape.dims[k];
        }
        std::size_t out = 0;
        for (std::size_t k = 0; k < np; ++k) out = out * out_shape.dims[k] + digits[perm[k]];
        new_index[idx] = out;
    }

    ComplexMatrix r(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) r(new_index[i], new_index[j]) = rho(i, j);
    return r;
}

namespace {

QuadratureRule compute_gauss_legendre(std::size_t n) {
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const std::size_t m = (n + 1) / 2;
    for (std::size_t i = 0; i < m; ++i) {
        double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0;
            double p1 = x;
            for (std::size_t k = 2; k <= n; ++k) {
                const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
                p0 = p1;
                p1 = pk;
            }
            dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
    return rule;
}

}  // namespace

const QuadratureRule& gauss_legendre_rule(std::size_t n) {
    if (n < 2) throw std::invalid_argument("gauss_legendre: need at least 2 nodes");
    static std::mutex mu;
    static std::map<std::size_t, QuadratureRule> cache;
    std::lock_guard lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, compute_gauss_legendre(n)).first;
    return it->second;
}

QuadratureRule gauss_legendre_rule(std::size_t n, double a, double b) {
    QuadratureRule r = gauss_legendre_rule(n);
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (b + a);
    for (std::size_t i = 0; i < n; ++i) {
        r.nodes[i] = mid + half * r.nodes[i];
        r.weights[i] *= half;
    }
    return r;
}

double gauss_legendre(const std::function<double(double)>& f, double a, double b, std::size_t nodes) {
    const auto rule = gauss_legendre_rule(nodes, a, b);
    double s = 0.0;
    for (std::size_t i = 0; i < nodes; ++i) s += rule.weights[i] * f(rule.nodes[i]);
    return s;
}

}  // namespace atih
