#pragma once

#include <cstdint>
#include <random>

#include "kspec/linalg.hpp"
#include "kspec/ratfun.hpp"

namespace kspec::estimator {

/// Boundary samples per circle for certified sup norms of reported ratios.
inline constexpr int kCertifySamples = 65536;
/// Boundary samples per circle used inside searches.
inline constexpr int kSearchSamples = 4096;

std::uint64_t splitmix64(std::uint64_t x);
/// Per-trial seed from (seed, trial index), independent of execution order.
std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t index);

/// [[1, R - 1/R], [0, 1]]: ‖A‖ = ‖A⁻¹‖ = R.
Matrix jordan_witness(double R);

/// Haar-like unitary from the orthonormalized columns of a complex Gaussian matrix.
Matrix random_unitary(std::size_t n, std::mt19937_64& rng);

/// A = U·G with random unitary U and random Hermitian G whose spectrum is
/// uniform in [(1+δ)/R, (1-δ)R], δ = 1e-3. Deterministic per (n, R, seed).
Matrix random_admissible(std::size_t n, double R, std::uint64_t seed);

/// Random Laurent polynomial Σ_{k=-degree}^{degree} c_k z^k with c_k scaled
/// by R^{-|k|} so all terms have comparable size on the annulus.
RationalFunction random_laurent(int degree, double R, std::mt19937_64& rng);

struct RatioResult {
    double ratio = 0.0;
    RationalFunction f = RationalFunction::constant(1.0);
    int samples = 0;
    /// (refined sup - best raw sample) / refined sup.
    double sampling_slack = 0.0;
    /// Residual of the operator evaluation (zero for the direct p(A)q(A)⁻¹ route).
    double quadrature_residual = 0.0;
    /// Sampling slack below 1e-6.
    bool certified = false;
};

/// ‖f(A)‖ / ‖f‖_X on X = {1/R ≤ |z| ≤ R}.
RatioResult ratio(const Matrix& a, double R, const RationalFunction& f, int samples = kCertifySamples);

struct SearchOptions {
    int max_starts = 4;
    /// Cap on evaluations spent in one start; independent of the budget.
    long per_start_cap = 60000;
    /// Evaluations charged for one convex step.
    int convex_step_cost = 400;
    /// Boundary samples per circle inside the convex step.
    int convex_samples = 256;
    int search_samples = kSearchSamples;
    int certify_samples = kCertifySamples;
};

struct SearchResult {
    RatioResult best;
    bool converged = false;
    long evaluations = 0;
    std::uint64_t seed = 0;
};

/**
 * Best ratio over Laurent polynomials with indices in [-degree, degree].
 *
 * Each start alternates two moves: a convex step that, for the current top
 * singular pair (u, v) of f(A), minimizes ‖f‖ on the boundary samples subject
 * to u*f(A)v = 1, and a coordinate search over real and imaginary parts of
 * the coefficients. Every candidate costs one evaluation against `budget`.
 * The evaluation sequence does not depend on the budget, so the result is
 * nondecreasing in it.
 */
SearchResult maximize_ratio(const Matrix& a, double R, int degree, long budget, std::uint64_t seed,
                            const SearchOptions& options = {});

struct ExtremalResult {
    /// |f'(1)| / ‖f‖_X with a certified sup norm: a lower estimate.
    double value = 0.0;
    /// 1 / (certified lower bound on the sampled minimax error): upper
    /// estimate for the sampled problem at this degree.
    double upper_estimate = 0.0;
    RationalFunction f = RationalFunction::constant(0.0);
    bool converged = false;
    int iterations = 0;
};

/// max |f'(1)| / ‖f‖_X over Laurent f with f(1) = 0, solved as the minimax
/// problem min ‖f‖ subject to f(1) = 0, f'(1) = 1 on `samples` points per circle.
ExtremalResult extremal_derivative(double R, int degree, int samples, int max_iterations = 400);

/// ‖(F_ij(A))‖ / ‖F‖_X for a matrix of rational functions.
double complete_ratio(const Matrix& a, double R, const MatrixRationalFunction& F,
                      int samples = kCertifySamples);

}  // namespace kspec::estimator
