#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace kspec {

using cplx = std::complex<double>;

/**
 * Dense square complex matrix, row-major.
 *
 * Sizes are small (tens, at most a few hundred), so everything is stored
 * in one contiguous vector and algorithms are plain O(n^3) loops.
 */
class Matrix {
public:
    Matrix() = default;
    explicit Matrix(std::size_t n);
    Matrix(std::size_t n, std::vector<cplx> entries);
    Matrix(std::initializer_list<std::initializer_list<cplx>> rows);

    static Matrix identity(std::size_t n);
    static Matrix diagonal(std::span<const cplx> d);
    static Matrix diagonal(std::span<const double> d);

    std::size_t size() const { return n_; }

    cplx& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
    const cplx& operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

    std::span<const cplx> data() const { return data_; }
    std::span<cplx> data() { return data_; }

    Matrix adjoint() const;
    /// (A + A*)/2
    Matrix hermitian_part() const;
    cplx trace() const;
    double frobenius_norm() const;
    double max_abs() const;
    bool all_finite() const;

    Matrix& operator+=(const Matrix& o);
    Matrix& operator-=(const Matrix& o);
    Matrix& operator*=(cplx s);

    friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
    friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
    friend Matrix operator*(Matrix a, cplx s) { return a *= s; }
    friend Matrix operator*(cplx s, Matrix a) { return a *= s; }
    friend Matrix operator*(const Matrix& a, const Matrix& b);
    friend std::vector<cplx> operator*(const Matrix& a, std::span<const cplx> x);

    /// a += s * b without a temporary.
    void add_scaled(const Matrix& b, cplx s);

    bool operator==(const Matrix&) const = default;

private:
    std::size_t n_ = 0;
    std::vector<cplx> data_;
};

struct PolarFactors {
    Matrix unitary;   // U
    Matrix positive;  // G, Hermitian positive definite, A = U G
};

struct HermitianEigen {
    std::vector<double> values;  // ascending
    Matrix vectors;              // columns are eigenvectors
};

/// Cyclic Jacobi for Hermitian input; only the Hermitian part of `a` is used.
HermitianEigen hermitian_eigen(const Matrix& a);

/// Largest singular value.
double spectral_norm(const Matrix& a);

/// Smallest singular value, from the eigenvalues of a*a (absolute accuracy ~ sqrt(eps)·‖a‖).
double smallest_singular_value(const Matrix& a);

/// Throws SingularMatrix when ‖a‖·‖a⁻¹‖ exceeds 1e13.
Matrix inverse(const Matrix& a);

/// Solves a·x = b for a right-hand side matrix b.
Matrix solve(const Matrix& a, const Matrix& b);

std::vector<cplx> solve(const Matrix& a, std::span<const cplx> b);

PolarFactors polar_decompose(const Matrix& a);

/// Largest eigenvalue of (a + a*)/2.
double hermitian_part_max_eig(const Matrix& a);

/// Smallest eigenvalue of (a + a*)/2.
double hermitian_part_min_eig(const Matrix& a);

/// Top singular triple (σ, u, v) with a·v = σ·u.
struct SingularTriple {
    double sigma;
    std::vector<cplx> left;
    std::vector<cplx> right;
};
SingularTriple top_singular_triple(const Matrix& a);

/// Condition number threshold above which a matrix counts as singular.
inline constexpr double kSingularityThreshold = 1e13;

}  // namespace kspec
