#include "kspec/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "kspec/errors.hpp"

namespace kspec {

Matrix::Matrix(std::size_t n) : n_(n), data_(n * n) {
    if (n == 0) throw InvalidInput("matrix dimension must be positive");
}

Matrix::Matrix(std::size_t n, std::vector<cplx> entries) : n_(n), data_(std::move(entries)) {
    if (n == 0) throw InvalidInput("matrix dimension must be positive");
    if (data_.size() != n * n) throw InvalidInput("matrix entry count does not match n*n");
}

Matrix::Matrix(std::initializer_list<std::initializer_list<cplx>> rows) : n_(rows.size()) {
    if (n_ == 0) throw InvalidInput("matrix dimension must be positive");
    data_.reserve(n_ * n_);
    for (const auto& row : rows) {
        if (row.size() != n_) throw InvalidInput("matrix must be square");
        data_.insert(data_.end(), row.begin(), row.end());
    }
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::diagonal(std::span<const cplx> d) {
    Matrix m(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
}

Matrix Matrix::diagonal(std::span<const double> d) {
    Matrix m(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
}

Matrix Matrix::adjoint() const {
    Matrix m(n_);
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j) m(j, i) = std::conj((*this)(i, j));
    return m;
}

Matrix Matrix::hermitian_part() const {
    Matrix m(n_);
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j)
            m(i, j) = 0.5 * ((*this)(i, j) + std::conj((*this)(j, i)));
    return m;
}

cplx Matrix::trace() const {
    cplx t = 0.0;
    for (std::size_t i = 0; i < n_; ++i) t += (*this)(i, i);
    return t;
}

double Matrix::frobenius_norm() const {
    double s = 0.0;
    for (const auto& v : data_) s += std::norm(v);
    return std::sqrt(s);
}

double Matrix::max_abs() const {
    double m = 0.0;
    for (const auto& v : data_) m = std::max(m, std::abs(v));
    return m;
}

bool Matrix::all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](const cplx& v) {
        return std::isfinite(v.real()) && std::isfinite(v.imag());
    });
}

Matrix& Matrix::operator+=(const Matrix& o) {
    if (o.n_ != n_) throw InvalidInput("dimension mismatch in matrix addition");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
}

Matrix& Matrix::operator-=(const Matrix& o) {
    if (o.n_ != n_) throw InvalidInput("dimension mismatch in matrix subtraction");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
}

Matrix& Matrix::operator*=(cplx s) {
    for (auto& v : data_) v *= s;
    return *this;
}

void Matrix::add_scaled(const Matrix& b, cplx s) {
    if (b.n_ != n_) throw InvalidInput("dimension mismatch in matrix addition");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += s * b.data_[k];
}

Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.n_ != b.n_) throw InvalidInput("dimension mismatch in matrix product");
    const std::size_t n = a.n_;
    Matrix c(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            const cplx aik = a(i, k);
            if (aik == cplx(0.0)) continue;
            for (std::size_t j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

std::vector<cplx> operator*(const Matrix& a, std::span<const cplx> x) {
    if (x.size() != a.n_) throw InvalidInput("dimension mismatch in matrix-vector product");
    std::vector<cplx> y(a.n_);
    for (std::size_t i = 0; i < a.n_; ++i) {
        cplx s = 0.0;
        for (std::size_t j = 0; j < a.n_; ++j) s += a(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

namespace {

void require_finite(const Matrix& a) {
    if (a.size() == 0) throw InvalidInput("empty matrix");
    if (!a.all_finite()) throw InvalidInput("matrix has non-finite entries");
}

double off_diagonal_norm(const Matrix& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j)
            if (i != j) s += std::norm(a(i, j));
    return std::sqrt(s);
}

// LU with partial pivoting, in place. Returns false on an exactly zero pivot.
struct LU {
    Matrix lu;
    std::vector<std::size_t> perm;
    bool ok = true;

    explicit LU(const Matrix& a) : lu(a), perm(a.size()) {
        const std::size_t n = a.size();
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        for (std::size_t k = 0; k < n; ++k) {
            std::size_t p = k;
            double best = std::abs(lu(k, k));
            for (std::size_t i = k + 1; i < n; ++i) {
                if (std::abs(lu(i, k)) > best) {
                    best = std::abs(lu(i, k));
                    p = i;
                }
            }
            if (best == 0.0) {
                ok = false;
                return;
            }
            if (p != k) {
                for (std::size_t j = 0; j < n; ++j) std::swap(lu(k, j), lu(p, j));
                std::swap(perm[k], perm[p]);
            }
            const cplx pivot = lu(k, k);
            for (std::size_t i = k + 1; i < n; ++i) {
                const cplx factor = lu(i, k) / pivot;
                lu(i, k) = factor;
                if (factor == cplx(0.0)) continue;
                for (std::size_t j = k + 1; j < n; ++j) lu(i, j) -= factor * lu(k, j);
            }
        }
    }

    std::vector<cplx> solve(std::span<const cplx> b) const {
        const std::size_t n = lu.size();
        std::vector<cplx> x(n);
        for (std::size_t i = 0; i < n; ++i) x[i] = b[perm[i]];
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < i; ++j) x[i] -= lu(i, j) * x[j];
        for (std::size_t i = n; i-- > 0;) {
            for (std::size_t j = i + 1; j < n; ++j) x[i] -= lu(i, j) * x[j];
            x[i] /= lu(i, i);
        }
        return x;
    }

    Matrix solve(const Matrix& b) const {
        const std::size_t n = lu.size();
        Matrix x(n);
        std::vector<cplx> col(n);
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t i = 0; i < n; ++i) col[i] = b(i, j);
            const auto sol = solve(col);
            for (std::size_t i = 0; i < n; ++i) x(i, j) = sol[i];
        }
        return x;
    }
};

LU checked_lu(const Matrix& a) {
    require_finite(a);
    LU f(a);
    if (!f.ok) throw SingularMatrix("matrix is singular (zero pivot)");
    return f;
}

void check_condition(const Matrix& a, const Matrix& a_inv) {
    const double cond = spectral_norm(a) * spectral_norm(a_inv);
    if (!std::isfinite(cond) || cond > kSingularityThreshold)
        throw SingularMatrix("matrix is numerically singular (condition estimate " +
                             std::to_string(cond) + ")");
}

}  // namespace

HermitianEigen hermitian_eigen(const Matrix& input) {
    require_finite(input);
    const std::size_t n = input.size();
    Matrix a = input.hermitian_part();
    Matrix v = Matrix::identity(n);
    const double scale = a.frobenius_norm();
    const double target = 1e-14 * scale;

    for (int sweep = 0; sweep < 100 && off_diagonal_norm(a) > target; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const cplx apq = a(p, q);
                const double mag = std::abs(apq);
                if (mag == 0.0) continue;
                const double app = a(p, p).real();
                const double aqq = a(q, q).real();
                const double tau = (aqq - app) / (2.0 * mag);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                // J = Φ·P with Φ = diag(1, conj(e)) making the (p,q) entry real.
                const cplx e = apq / mag;
                const cplx jpp = c;
                const cplx jpq = s;
                const cplx jqp = -s * std::conj(e);
                const cplx jqq = c * std::conj(e);
                // a <- a J
                for (std::size_t k = 0; k < n; ++k) {
                    const cplx akp = a(k, p);
                    const cplx akq = a(k, q);
                    a(k, p) = akp * jpp + akq * jqp;
                    a(k, q) = akp * jpq + akq * jqq;
                }
                // a <- J* a
                for (std::size_t k = 0; k < n; ++k) {
                    const cplx apk = a(p, k);
                    const cplx aqk = a(q, k);
                    a(p, k) = std::conj(jpp) * apk + std::conj(jqp) * aqk;
                    a(q, k) = std::conj(jpq) * apk + std::conj(jqq) * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                a(p, p) = a(p, p).real();
                a(q, q) = a(q, q).real();
                for (std::size_t k = 0; k < n; ++k) {
                    const cplx vkp = v(k, p);
                    const cplx vkq = v(k, q);
                    v(k, p) = vkp * jpp + vkq * jqp;
                    v(k, q) = vkp * jpq + vkq * jqq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });
    HermitianEigen out{std::vector<double>(n), Matrix(n)};
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = a(order[k], order[k]).real();
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
    }
    return out;
}

double spectral_norm(const Matrix& a) {
    require_finite(a);
    if (a.size() == 1) return std::abs(a(0, 0));
    const double scale = a.max_abs();
    if (scale == 0.0) return 0.0;
    // Scale to avoid overflow in a*a.
    const Matrix b = a * cplx(1.0 / scale);
    const auto eig = hermitian_eigen(b.adjoint() * b);
    return scale * std::sqrt(std::max(0.0, eig.values.back()));
}

double smallest_singular_value(const Matrix& a) {
    require_finite(a);
    if (a.size() == 1) return std::abs(a(0, 0));
    const double scale = a.max_abs();
    if (scale == 0.0) return 0.0;
    const Matrix b = a * cplx(1.0 / scale);
    const auto eig = hermitian_eigen(b.adjoint() * b);
    return scale * std::sqrt(std::max(0.0, eig.values.front()));
}

Matrix inverse(const Matrix& a) {
    const LU f = checked_lu(a);
    Matrix inv = f.solve(Matrix::identity(a.size()));
    check_condition(a, inv);
    return inv;
}

Matrix solve(const Matrix& a, const Matrix& b) {
    if (b.size() != a.size()) throw InvalidInput("dimension mismatch in solve");
    const LU f = checked_lu(a);
    return f.solve(b);
}

std::vector<cplx> solve(const Matrix& a, std::span<const cplx> b) {
    if (b.size() != a.size()) throw InvalidInput("dimension mismatch in solve");
    const LU f = checked_lu(a);
    return f.solve(b);
}

PolarFactors polar_decompose(const Matrix& a) {
    require_finite(a);
    const std::size_t n = a.size();
    // Singularity check on the original matrix before forming a*a.
    const Matrix a_inv = inverse(a);
    (void)a_inv;

    const auto eig = hermitian_eigen(a.adjoint() * a);
    const Matrix& v = eig.vectors;
    std::vector<double> root(n), inv_root(n);
    for (std::size_t k = 0; k < n; ++k) {
        if (eig.values[k] <= 0.0) throw SingularMatrix("a*a is not positive definite");
        root[k] = std::sqrt(eig.values[k]);
        inv_root[k] = 1.0 / root[k];
    }
    const Matrix vh = v.adjoint();
    Matrix g = v * Matrix::diagonal(std::span<const double>(root)) * vh;
    const Matrix g_inv = v * Matrix::diagonal(std::span<const double>(inv_root)) * vh;
    g = g.hermitian_part();
    return PolarFactors{a * g_inv, std::move(g)};
}

double hermitian_part_max_eig(const Matrix& a) {
    return hermitian_eigen(a).values.back();
}

double hermitian_part_min_eig(const Matrix& a) {
    return hermitian_eigen(a).values.front();
}

SingularTriple top_singular_triple(const Matrix& a) {
    require_finite(a);
    const std::size_t n = a.size();
    const auto eig = hermitian_eigen(a.adjoint() * a);
    std::vector<cplx> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = eig.vectors(i, n - 1);
    std::vector<cplx> u = a * std::span<const cplx>(v);
    double norm = 0.0;
    for (const auto& x : u) norm += std::norm(x);
    norm = std::sqrt(norm);
    if (norm == 0.0) {
        u.assign(n, 0.0);
        u[0] = 1.0;
    } else {
        for (auto& x : u) x /= norm;
    }
    return SingularTriple{norm, std::move(u), std::move(v)};
}

}  // namespace kspec
