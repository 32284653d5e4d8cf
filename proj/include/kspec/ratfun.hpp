#pragma once

#include <memory>
#include <vector>

#include "kspec/linalg.hpp"

namespace kspec {

/**
 * f(z) = z^low · p(z) / q(z) with p, q given by ascending coefficient lists.
 *
 * A Laurent polynomial Σ_{k=low}^{low+m-1} c_k z^k is stored with p = c and
 * q = 1, so the pole at the origin stays exact. Trailing zero coefficients
 * are trimmed on construction.
 */
class RationalFunction {
public:
    RationalFunction(std::vector<cplx> numerator, std::vector<cplx> denominator = {1.0},
                     int laurent_low = 0);

    static RationalFunction constant(cplx value) { return RationalFunction({value}); }
    static RationalFunction polynomial(std::vector<cplx> coeffs) { return RationalFunction(std::move(coeffs)); }
    /// Σ coeffs[j] z^{low + j}
    static RationalFunction laurent(int low, std::vector<cplx> coeffs) {
        return RationalFunction(std::move(coeffs), {1.0}, low);
    }

    const std::vector<cplx>& numerator() const { return num_; }
    const std::vector<cplx>& denominator() const { return den_; }
    int laurent_low() const { return low_; }
    bool denominator_is_one() const { return den_.size() == 1 && den_[0] == cplx(1.0); }

    /// Finite poles: roots of q, and 0 when low < 0.
    const std::vector<cplx>& poles() const { return *poles_; }
    /// True when some pole lies in { 1/R ≤ |z| ≤ R }.
    bool has_pole_in_annulus(double R) const;

    /// Evaluation without the pole-distance check.
    cplx value(cplx z) const;
    cplx derivative(cplx z) const;

    RationalFunction operator*(const RationalFunction& other) const;
    RationalFunction scaled(cplx s) const;

private:
    std::vector<cplx> num_;
    std::vector<cplx> den_;
    int low_;
    std::shared_ptr<const std::vector<cplx>> poles_;
};

class MatrixRationalFunction {
public:
    MatrixRationalFunction(std::size_t dim, std::vector<RationalFunction> entries);

    std::size_t dim() const { return dim_; }
    const RationalFunction& operator()(std::size_t i, std::size_t j) const { return entries_[i * dim_ + j]; }
    const std::vector<RationalFunction>& entries() const { return entries_; }

    Matrix value(cplx z) const;
    bool has_pole_in_annulus(double R) const;

private:
    std::size_t dim_;
    std::vector<RationalFunction> entries_;
};

/// Roots of an ascending coefficient list (Aberth iteration).
std::vector<cplx> polynomial_roots(const std::vector<cplx>& coeffs);

cplx eval_scalar(const RationalFunction& f, cplx z);

/// p(A)·q(A)⁻¹ (times A^low), Horner's scheme in the matrix argument.
Matrix eval_matrix(const RationalFunction& f, const Matrix& a);

cplx derivative_at(const RationalFunction& f, cplx z);

inline constexpr int kDefaultBoundarySamples = 4096;

/**
 * Sup norm on the annulus {1/R ≤ |z| ≤ R}, from `samples` equispaced points
 * on each boundary circle followed by golden-section refinement around the
 * largest local maxima. A lower estimate of the true norm.
 */
double sup_norm_annulus(const RationalFunction& f, double R, int samples = kDefaultBoundarySamples);
double sup_norm_annulus(const MatrixRationalFunction& f, double R, int samples = kDefaultBoundarySamples);

/// Same as sup_norm_annulus, also reporting the largest unrefined sample.
struct BoundarySup {
    double value;
    double best_sample;
};
BoundarySup boundary_sup(const RationalFunction& f, double R, int samples);

}  // namespace kspec
